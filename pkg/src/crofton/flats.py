"""Linear and affine flats: frames, projections, generalized sine, and
Haar / motion-invariant sampling.

RNG contract: every Monte Carlo sample i draws from a counter-based
stream derived from (seed, i), so results are independent of execution
order and worker count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .specfun import ball_volume, grassmann_total

FRAME_TOL = 1e-12


def orthonormalize(rows: np.ndarray) -> np.ndarray:
    """Modified Gram-Schmidt with one re-orthogonalization pass."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    out = []
    for v in rows:
        w = v.copy()
        for q in out:
            w -= np.dot(w, q) * q
        for q in out:
            w -= np.dot(w, q) * q
        norm = np.linalg.norm(w)
        if norm < 1e-12 * max(1.0, np.linalg.norm(v)):
            raise np.linalg.LinAlgError("rank-deficient frame")
        out.append(w / norm)
    return np.array(out) if out else rows.reshape(0, rows.shape[1])


@dataclass(frozen=True, eq=False)
class LinearFlat:
    """A linear subspace given by an orthonormal frame (rows)."""

    frame: np.ndarray

    def __post_init__(self):
        frame = np.asarray(self.frame, dtype=float)
        if frame.ndim != 2:
            raise ValueError("frame must be a (subdim, dim) array")
        gram = frame @ frame.T
        if frame.shape[0] and not np.allclose(gram, np.eye(frame.shape[0]),
                                              atol=1e-10):
            raise ValueError("frame rows are not orthonormal")
        frame = frame.copy()
        frame.setflags(write=False)
        object.__setattr__(self, "frame", frame)

    @staticmethod
    def trusted(frame: np.ndarray) -> "LinearFlat":
        """Construct without the orthonormality check (hot paths hand in
        frames that are orthonormal by construction)."""
        obj = object.__new__(LinearFlat)
        frame.setflags(write=False)
        object.__setattr__(obj, "frame", frame)
        return obj

    @property
    def dim(self) -> int:
        return self.frame.shape[1]

    @property
    def subdim(self) -> int:
        return self.frame.shape[0]

    def contains(self, x, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float)
        r = x - self.frame.T @ (self.frame @ x)
        return np.linalg.norm(r) <= tol * max(1.0, np.linalg.norm(x))

    @staticmethod
    def full(d: int) -> "LinearFlat":
        return LinearFlat(np.eye(d))

    @staticmethod
    def trivial(d: int) -> "LinearFlat":
        return LinearFlat(np.zeros((0, d)))

    def complement(self) -> "LinearFlat":
        d, j = self.dim, self.subdim
        if j == 0:
            return LinearFlat.full(d)
        if j == d:
            return LinearFlat.trivial(d)
        # null space of the frame via full SVD
        _, _, vt = np.linalg.svd(self.frame, full_matrices=True)
        return LinearFlat.trusted(vt[j:].copy())


@dataclass(frozen=True, eq=False)
class AffineFlat:
    """base + offset with the offset orthogonal to the base."""

    base: LinearFlat
    offset: np.ndarray

    def __post_init__(self):
        off = np.asarray(self.offset, dtype=float)
        if off.shape != (self.base.dim,):
            raise ValueError("offset has wrong shape")
        if self.base.subdim:
            resid = self.base.frame @ off
            if np.linalg.norm(resid) > 1e-9 * max(1.0, np.linalg.norm(off)):
                raise ValueError("offset is not orthogonal to the base")
        off = off.copy()
        off.setflags(write=False)
        object.__setattr__(self, "offset", off)

    @staticmethod
    def trusted(base: LinearFlat, offset: np.ndarray) -> "AffineFlat":
        obj = object.__new__(AffineFlat)
        offset.setflags(write=False)
        object.__setattr__(obj, "base", base)
        object.__setattr__(obj, "offset", offset)
        return obj

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def subdim(self) -> int:
        return self.base.subdim


def as_affine(flat) -> AffineFlat:
    if isinstance(flat, AffineFlat):
        return flat
    return AffineFlat.trusted(flat, np.zeros(flat.dim))


def project(x, flat: LinearFlat) -> np.ndarray:
    """Orthogonal projection of x onto the flat."""
    x = np.asarray(x, dtype=float)
    if flat.subdim == 0:
        return np.zeros_like(x)
    return flat.frame.T @ (flat.frame @ x)


def normalize_project(x, flat: LinearFlat) -> np.ndarray:
    p = project(x, flat)
    norm = np.linalg.norm(p)
    if norm < 1e-14:
        raise ValueError("projection vanishes; cannot normalize")
    return p / norm


def span_with(flat: LinearFlat, x) -> LinearFlat:
    """The span of the flat and one additional vector."""
    x = np.asarray(x, dtype=float)
    resid = x - project(x, flat)
    norm = np.linalg.norm(resid)
    if norm < 1e-12 * max(1.0, np.linalg.norm(x)):
        raise ValueError("vector already lies in the flat")
    return LinearFlat(np.vstack([flat.frame, resid / norm]) if flat.subdim
                      else (resid / norm)[None, :])


def generalized_sine(a: LinearFlat, b: LinearFlat) -> float:
    """Generalized sine G(A, B) of two subspaces.

    Computed from principal angles: the generic intersection dimension
    m0 = max(0, dim A + dim B - d) is skipped and the sines of the
    remaining (largest) principal angles are multiplied.  In generic
    position this is the volume of the parallelepiped spanned by the
    merged extended bases; in degenerate position (intersection larger
    than generic) it vanishes, which is what the hyperplane identity
    G(hyperplane, L_k) = |p(n | L_k)| requires.
    """
    if a.dim != b.dim:
        raise ValueError("ambient dimension mismatch")
    p, q = a.subdim, b.subdim
    if min(p, q) == 0:
        return 1.0
    m0 = max(0, p + q - a.dim)
    sv = np.linalg.svd(a.frame @ b.frame.T, compute_uv=False)  # descending
    kept = np.clip(sv[m0:], 0.0, 1.0)
    return float(np.prod(np.sqrt(1.0 - kept * kept)))


# -- sampling ------------------------------------------------------------


def rng_for_sample(seed: int, index: int) -> np.random.Generator:
    """Counter-based per-sample stream: Philox keyed by (seed, index)."""
    key = ((int(seed) & (2 ** 64 - 1)) << 64) | (int(index) & (2 ** 64 - 1))
    return np.random.Generator(np.random.Philox(key=key))


def sample_linear(d: int, j: int, rng: np.random.Generator) -> LinearFlat:
    """Haar-uniform j-dimensional linear subspace of R^d."""
    if not 0 <= j <= d:
        raise ValueError("need 0 <= j <= d")
    if j == 0:
        return LinearFlat.trivial(d)
    g = rng.standard_normal((j, d))
    return LinearFlat.trusted(orthonormalize(g))


def sample_linear_within(s: LinearFlat, j: int,
                         rng: np.random.Generator) -> LinearFlat:
    """Haar-uniform j-dimensional subspace of the given flat."""
    if j > s.subdim:
        raise ValueError("requested dimension exceeds the flat's")
    if j == 0:
        return LinearFlat.trivial(s.dim)
    if j == s.subdim:
        return s
    g = rng.standard_normal((j, s.subdim))
    return LinearFlat.trusted(orthonormalize(g @ s.frame))


def sample_affine_hitting(body, j: int, rng: np.random.Generator):
    """One importance sample (E, weight) for integrals over affine
    j-flats meeting the body.

    The linear part is Haar; the offset is uniform in a ball of the
    body's circumradius inside the orthogonal complement, which always
    covers the body's shadow.  The estimator of int f(E) dE over flats
    meeting X is the sample mean of weight * f(E) * 1{X cap E nonempty}.
    """
    d = body.dim
    if not 0 < j < d:
        raise ValueError("need 0 < j < d")
    center, radius = body.circumsphere()
    base = sample_linear(d, j, rng)
    comp = base.complement()
    m = d - j
    # uniform point in the unit m-ball
    u = rng.standard_normal(m)
    u /= np.linalg.norm(u)
    t = rng.random() ** (1.0 / m)
    y_local = radius * t * u
    offset = comp.frame.T @ y_local + project(center, comp)
    weight = grassmann_total(d, j) * ball_volume(m) * radius ** m
    return AffineFlat.trusted(base, offset), weight
