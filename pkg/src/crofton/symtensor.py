"""Dense symmetric tensor algebra over R^d.

A rank-p symmetric tensor is stored by one coefficient per multi-index
m = (m_1, ..., m_d) with sum(m) = p, in ascending lexicographic order.
The coefficient c_m is the value of the multilinear form on the multiset
basis element (e_1 taken m_1 times, ..., e_d taken m_d times), so the
associated homogeneous polynomial is

    T(y, ..., y) = sum_m multinomial(p; m) * c_m * y^m.

With this convention the symmetric product is a multi-index convolution
of polynomial coefficients, and the coefficients of a vector power v^p
are just the monomials v^m.
"""

from __future__ import annotations

import json
import math
from functools import lru_cache

import numpy as np

MAX_RANK = 8

# default coefficientwise comparison tolerances
ATOL = 1e-12
RTOL = 1e-10


@lru_cache(maxsize=None)
def multi_indices(dim: int, rank: int) -> tuple[tuple[int, ...], ...]:
    """All multi-indices of the given total degree, ascending lexicographic."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if rank == 0:
        return ((0,) * dim,)
    if dim == 1:
        return ((rank,),)
    out = []
    for first in range(rank + 1):
        for rest in multi_indices(dim - 1, rank - first):
            out.append((first,) + rest)
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def index_lookup(dim: int, rank: int) -> dict[tuple[int, ...], int]:
    return {m: i for i, m in enumerate(multi_indices(dim, rank))}


def num_coeffs(dim: int, rank: int) -> int:
    return math.comb(dim + rank - 1, rank)


@lru_cache(maxsize=None)
def multinomials(dim: int, rank: int) -> np.ndarray:
    """multinomial(rank; m) for every multi-index, as a float vector."""
    vals = [math.factorial(rank) // math.prod(math.factorial(k) for k in m)
            for m in multi_indices(dim, rank)]
    a = np.array(vals, dtype=float)
    a.setflags(write=False)
    return a


@lru_cache(maxsize=None)
def product_table(dim: int, p: int, q: int) -> np.ndarray:
    """Dense (C_p, C_q, C_{p+q}) table so that the symmetric product is

    out = einsum('i...,j...,ijk->k...', A, B, table)

    in multiset-coefficient convention.
    """
    mi_p = multi_indices(dim, p)
    mi_q = multi_indices(dim, q)
    look = index_lookup(dim, p + q)
    wp = multinomials(dim, p)
    wq = multinomials(dim, q)
    wpq = multinomials(dim, p + q)
    tab = np.zeros((len(mi_p), len(mi_q), num_coeffs(dim, p + q)))
    for i, a in enumerate(mi_p):
        for j, b in enumerate(mi_q):
            k = look[tuple(x + y for x, y in zip(a, b))]
            tab[i, j, k] = wp[i] * wq[j] / wpq[k]
    tab.setflags(write=False)
    return tab


@lru_cache(maxsize=None)
def contract_table(dim: int, r: int, s: int) -> tuple[np.ndarray, np.ndarray]:
    """Index map D and weights w for contraction of a rank r+s tensor with a
    rank-r tensor: out[u] = sum_m w[m] * S[m] * T[D[m, u]]."""
    mi_r = multi_indices(dim, r)
    mi_s = multi_indices(dim, s)
    look = index_lookup(dim, r + s)
    D = np.empty((len(mi_r), len(mi_s)), dtype=np.intp)
    for i, a in enumerate(mi_r):
        for j, b in enumerate(mi_s):
            D[i, j] = look[tuple(x + y for x, y in zip(a, b))]
    D.setflags(write=False)
    return D, multinomials(dim, r)


class SymTensor:
    """Immutable dense symmetric tensor."""

    __slots__ = ("dim", "rank", "coeffs")

    def __init__(self, dim: int, rank: int, coeffs: np.ndarray):
        if rank < 0 or rank > MAX_RANK:
            raise ValueError(f"rank {rank} outside supported range 0..{MAX_RANK}")
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (num_coeffs(dim, rank),):
            raise ValueError("coefficient vector has wrong length")
        coeffs = coeffs.copy()
        coeffs.setflags(write=False)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, *a):
        raise AttributeError("SymTensor is immutable")

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero(dim: int, rank: int) -> "SymTensor":
        return SymTensor(dim, rank, np.zeros(num_coeffs(dim, rank)))

    @staticmethod
    def scalar(dim: int, value: float) -> "SymTensor":
        return SymTensor(dim, 0, np.array([float(value)]))

    @staticmethod
    def from_vector(v) -> "SymTensor":
        return vector_power(v, 1)

    # -- basic algebra ------------------------------------------------

    def _check_same_dim(self, other: "SymTensor"):
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")

    def __add__(self, other: "SymTensor") -> "SymTensor":
        self._check_same_dim(other)
        if self.rank != other.rank:
            raise ValueError("rank mismatch in addition")
        return SymTensor(self.dim, self.rank, self.coeffs + other.coeffs)

    def __sub__(self, other: "SymTensor") -> "SymTensor":
        self._check_same_dim(other)
        if self.rank != other.rank:
            raise ValueError("rank mismatch in subtraction")
        return SymTensor(self.dim, self.rank, self.coeffs - other.coeffs)

    def __mul__(self, c: float) -> "SymTensor":
        return SymTensor(self.dim, self.rank, self.coeffs * float(c))

    __rmul__ = __mul__

    def __neg__(self) -> "SymTensor":
        return self * -1.0

    def sym_product(self, other: "SymTensor") -> "SymTensor":
        self._check_same_dim(other)
        p, q = self.rank, other.rank
        if p + q > MAX_RANK:
            raise ValueError(f"product rank {p + q} exceeds cap {MAX_RANK}")
        tab = product_table(self.dim, p, q)
        out = np.einsum("i,j,ijk->k", self.coeffs, other.coeffs, tab)
        return SymTensor(self.dim, p + q, out)

    def power(self, n: int) -> "SymTensor":
        out = SymTensor.scalar(self.dim, 1.0)
        for _ in range(n):
            out = out.sym_product(self)
        return out

    def contract(self, other: "SymTensor") -> "SymTensor":
        """Contraction with a lower-rank tensor: plugs `other` into the
        first `other.rank` slots."""
        self._check_same_dim(other)
        r = other.rank
        s = self.rank - r
        if s < 0:
            raise ValueError("contraction rank exceeds tensor rank")
        D, w = contract_table(self.dim, r, s)
        out = np.einsum("m,mu->u", w * other.coeffs, self.coeffs[D])
        return SymTensor(self.dim, s, out)

    # -- evaluation and transformation ---------------------------------

    def __call__(self, *vectors) -> float:
        """Evaluate the multilinear form on rank-many vectors."""
        if len(vectors) != self.rank:
            raise ValueError("need exactly rank vectors")
        t = self
        for v in vectors:
            t = t.contract(SymTensor.from_vector(v))
        return float(t.coeffs[0])

    def poly(self, y) -> float:
        """Evaluate the associated homogeneous polynomial T(y,...,y)."""
        y = np.asarray(y, dtype=float)
        mono = np.array([np.prod(y ** np.array(m)) for m in multi_indices(self.dim, self.rank)])
        return float(np.dot(multinomials(self.dim, self.rank) * self.coeffs, mono))

    def transform(self, M) -> "SymTensor":
        """Pushforward along a linear map with matrix M (shape (d_out, d_in)):
        the result acts as T'(u_1,..,u_p) = T(M^T u_1, .., M^T u_p)."""
        M = np.asarray(M, dtype=float)
        if M.shape[1] != self.dim:
            raise ValueError("matrix shape incompatible with tensor dimension")
        d_out = M.shape[0]
        w = multinomials(self.dim, self.rank)
        out = np.zeros(num_coeffs(d_out, self.rank))
        for i, m in enumerate(multi_indices(self.dim, self.rank)):
            if self.coeffs[i] == 0.0:
                continue
            term = np.array([1.0])
            prank = 0
            for axis, mult in enumerate(m):
                col = vector_power(M[:, axis], 1).coeffs
                for _ in range(mult):
                    tab = product_table(d_out, prank, 1)
                    term = np.einsum("i,j,ijk->k", term, col, tab)
                    prank += 1
            out += w[i] * self.coeffs[i] * term
        return SymTensor(d_out, self.rank, out)

    # -- comparison and serialization ----------------------------------

    def allclose(self, other: "SymTensor", atol: float = ATOL, rtol: float = RTOL) -> bool:
        self._check_same_dim(other)
        if self.rank != other.rank:
            return False
        scale = max(np.max(np.abs(self.coeffs)), np.max(np.abs(other.coeffs)), 0.0)
        return bool(np.all(np.abs(self.coeffs - other.coeffs) <= atol + rtol * scale))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0

    def to_json(self) -> str:
        coeffs = {",".join(map(str, m)): self.coeffs[i]
                  for i, m in enumerate(multi_indices(self.dim, self.rank))
                  if self.coeffs[i] != 0.0}
        return json.dumps({"dim": self.dim, "rank": self.rank, "coeffs": coeffs},
                          sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "SymTensor":
        obj = json.loads(text)
        dim, rank = obj["dim"], obj["rank"]
        coeffs = np.zeros(num_coeffs(dim, rank))
        look = index_lookup(dim, rank)
        for key, val in obj["coeffs"].items():
            m = tuple(int(t) for t in key.split(","))
            if sum(m) != rank or len(m) != dim:
                raise ValueError(f"bad multi-index {key}")
            coeffs[look[m]] = float(val)
        return SymTensor(dim, rank, coeffs)

    def __repr__(self):
        return f"SymTensor(dim={self.dim}, rank={self.rank})"


# -- module-level operations (the public surface) -----------------------


def sym_product(a: SymTensor, b: SymTensor) -> SymTensor:
    return a.sym_product(b)


def vector_power(v, p: int) -> SymTensor:
    """p-fold symmetric power of a vector; rank-0 power is the scalar 1."""
    if p < 0:
        raise ValueError("negative power")
    v = np.asarray(v, dtype=float)
    if p == 0:
        return SymTensor.scalar(v.size, 1.0)
    coeffs = np.array([np.prod(v ** np.array(m)) for m in multi_indices(v.size, p)])
    return SymTensor(v.size, p, coeffs)


def metric_tensor(frame) -> SymTensor:
    """Metric tensor Q(L) = sum_i w_i^2 of the span of an orthonormal frame.

    The frame is given as rows; orthonormality is required.
    """
    frame = np.atleast_2d(np.asarray(frame, dtype=float))
    gram = frame @ frame.T
    if not np.allclose(gram, np.eye(frame.shape[0]), atol=1e-10):
        raise ValueError("frame is not orthonormal")
    d = frame.shape[1]
    out = np.zeros(num_coeffs(d, 2))
    look = index_lookup(d, 2)
    for w in frame:
        for i in range(d):
            for j in range(i, d):
                m = [0] * d
                m[i] += 1
                m[j] += 1
                out[look[tuple(m)]] += w[i] * w[j]
    return SymTensor(d, 2, out)


def ambient_metric(d: int) -> SymTensor:
    return metric_tensor(np.eye(d))


def contract(t: SymTensor, s: SymTensor) -> SymTensor:
    return t.contract(s)


# -- batched raw-coefficient helpers ------------------------------------
#
# Hot loops (boundary cubature, Monte Carlo sections) work on coefficient
# arrays of shape (n_coeffs, M) directly, bypassing SymTensor objects.


def batch_vector_power(V: np.ndarray, p: int) -> np.ndarray:
    """Coefficients of v^p for a batch of vectors V of shape (M, d);
    returns shape (C_p, M)."""
    M, d = V.shape
    if p == 0:
        return np.ones((1, M))
    pw = [np.ones((d, M))]
    for _ in range(p):
        pw.append(pw[-1] * V.T)
    out = np.empty((num_coeffs(d, p), M))
    for i, m in enumerate(multi_indices(d, p)):
        acc = np.ones(M)
        for axis, mult in enumerate(m):
            if mult:
                acc = acc * pw[mult][axis]
        out[i] = acc
    return out


def batch_product(A: np.ndarray, B: np.ndarray, dim: int, p: int, q: int) -> np.ndarray:
    """Symmetric product on batched coefficient arrays (C_p, M) x (C_q, M)."""
    tab = product_table(dim, p, q)
    return np.einsum("im,jm,ijk->km", A, B, tab)


def batch_contract(T: np.ndarray, S: np.ndarray, dim: int, r: int, s: int) -> np.ndarray:
    """Contract batched rank r+s coefficients T with batched rank-r S."""
    D, w = contract_table(dim, r, s)
    return np.einsum("im,ium->um", w[:, None] * S, T[D])


def batch_scale(A: np.ndarray, c: np.ndarray) -> np.ndarray:
    return A * c[None, :]
