"""Right-hand sides of the rotational and affine Crofton formulas.

Each evaluator turns the section-average on the left of a formula into
a weighted boundary integral of the body, with inner sphere or
Grassmannian integrals resolved in closed form where the formula
provides one, and by Monte Carlo where it does not.

alpha denotes the sine of the angle between a boundary point x and its
outer normal n.  Hypergeometric weights at alpha = 1 are limits; this is
implemented by clamping alpha^2 just below 1, since the terms that
diverge there carry positive powers of <x, n> and vanish in the limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Callable

import numpy as np
from scipy.special import hyp2f1, roots_jacobi

from . import symtensor as st
from .bodies import ConvexBody, Polytope, sphere_quadrature, validate_rotational
from .flats import AffineFlat, LinearFlat, generalized_sine, rng_for_sample, \
    sample_linear, sample_linear_within
from .minkowski import _cached_cubature, elementary_symmetric_excluding, phi, \
    phi_generalized, top_curvature_quadrature, xi
from .specfun import a_constant, c_affine, chi_constant, f_integral, \
    grassmann_total, sphere_area
from .symtensor import SymTensor, ambient_metric

ALPHA_SQ_CLAMP = 1.0 - 1e-13


@dataclass(frozen=True)
class PsiFunction:
    """Scalar weight psi(flat, x, n) for the general formulas."""
    name: str
    fn: Callable
    uses_flat: bool = False
    uses_normal: bool = False
    bound: float | None = None

    def __call__(self, flat, x, n) -> float:
        return float(self.fn(flat, x, n))


PSI_REGISTRY = {
    "one": PsiFunction("one", lambda flat, x, n: 1.0, bound=1.0),
    "sq_norm": PsiFunction("sq_norm", lambda flat, x, n: float(x @ x)),
    "axis_normal": PsiFunction("axis_normal", lambda flat, x, n: float(n[0]),
                               uses_normal=True, bound=1.0),
    "flat_dist_sq": PsiFunction(
        "flat_dist_sq", lambda flat, x, n: float(flat.offset @ flat.offset),
        uses_flat=True),
}


def _alpha_split(x: np.ndarray, n: np.ndarray):
    """alpha^2 and the decomposition n = n_x + n_perp along x."""
    norm_sq = np.einsum("md,md->m", x, x)
    dot = np.einsum("md,md->m", x, n)
    alpha_sq = np.clip(1.0 - dot * dot / norm_sq, 0.0, 1.0)
    n_x = (dot / norm_sq)[:, None] * x
    n_perp = n - n_x
    return alpha_sq, dot, n_x, n_perp


def _q_perp_both(x: np.ndarray, n_perp: np.ndarray, alpha_sq: np.ndarray,
                 d: int) -> np.ndarray:
    """Batched metric tensor of the subspace orthogonal to both x and n.

    Where alpha ~ 0 the normalized component of n orthogonal to x is
    noise, but every use multiplies these coefficients by a positive
    power of alpha.
    """
    q = np.broadcast_to(ambient_metric(d).coeffs[:, None],
                        (st.num_coeffs(d, 2), x.shape[0]))
    xhat = x / np.linalg.norm(x, axis=1)[:, None]
    alpha = np.sqrt(alpha_sq)
    vhat = n_perp / np.maximum(alpha, 1e-30)[:, None]
    return q - st.batch_vector_power(xhat, 2) - st.batch_vector_power(vhat, 2)


# -- rotational formulas -----------------------------------------------------


def rot_rhs_surface(body: ConvexBody, j: int, r: int, s: int,
                    order: int = 64) -> SymTensor:
    """Rotational average of the top-index sectional Minkowski tensor on
    j-subspaces through the origin (1 < j < d), as a single integral
    against the body's top curvature measure."""
    d = body.dim
    if not 1 < j < d:
        raise ValueError("need 1 < j < d")
    validate_rotational(body)
    x, n, w = top_curvature_quadrature(body, order)
    alpha_sq, _, n_x, n_perp = _alpha_split(x, n)
    m_arr = np.minimum(alpha_sq, ALPHA_SQ_CLAMP)
    norm_x = np.linalg.norm(x, axis=1)

    nx_pow = [st.batch_vector_power(n_x, a) for a in range(s + 1)]
    np_pow = [st.batch_vector_power(n_perp, b) for b in range(s + 1)]
    q_perp = _q_perp_both(x, n_perp, alpha_sq, d)
    q_pow = [np.ones((1, x.shape[0]))]
    for i in range(s // 2):
        q_pow.append(st.batch_product(q_pow[-1], q_perp, d, 2 * i, 2))

    acc = np.zeros((st.num_coeffs(d, s), x.shape[0]))
    for l in range(s // 2 + 1):
        for b in range(s - 2 * l + 1):
            a = s - 2 * l - b
            coef = (2.0 * sphere_area(2 * l + d - 2) / sphere_area(2 * l + 1)
                    * math.factorial(s)
                    / (math.factorial(a) * math.factorial(b)
                       * math.factorial(2 * l)))
            fv = np.asarray(f_integral(d, j, s, l, b, m_arr))
            term = st.batch_product(nx_pow[a], np_pow[b], d, a, b)
            term = st.batch_product(term, q_pow[l], d, a + b, 2 * l)
            acc += coef * (fv * alpha_sq ** l)[None, :] * term

    xr = st.batch_vector_power(x, r)
    total = st.batch_product(xr, acc, d, r, s)
    weights = w * norm_x ** (j - d)
    pref = (sphere_area(1) * grassmann_total(d - 3, j - 2)
            / (math.factorial(r) * math.factorial(s) * sphere_area(s + 1)))
    return SymTensor(d, r + s, pref * np.einsum("cm,m->c", total, weights))


def rot_rhs_lines(body: ConvexBody, r: int, s: int, order: int = 64) -> SymTensor:
    """Rotational average of sectional tensors on lines through the
    origin: a boundary integral of x^{r+s} sign(<x,n>)^s |<x,n>| / |x|^{d+s}."""
    d = body.dim
    validate_rotational(body)
    x, n, w = top_curvature_quadrature(body, order)
    w = w * sphere_area(1)  # back to plain boundary measure
    dot = np.einsum("md,md->m", x, n)
    norm_x = np.linalg.norm(x, axis=1)
    factor = np.sign(dot) ** s * np.abs(dot) / norm_x ** (d + s)
    coeffs = np.einsum("cm,m->c", st.batch_vector_power(x, r + s), w * factor)
    pref = 1.0 / (math.factorial(r) * math.factorial(s) * sphere_area(s + 1))
    return SymTensor(d, r + s, pref * coeffs)


def rot_rhs_hyperplanes(body: ConvexBody, k: int, r: int, s: int,
                        order: int = 64) -> SymTensor:
    """Rotational average of index-k sectional tensors on hyperplanes
    through the origin, k < d-2, with the inner sphere integral expanded
    into hypergeometric terms.  Smooth bodies only."""
    d = body.dim
    if d < 3:
        raise ValueError("need d >= 3")
    if not 0 <= k < d - 2:
        raise ValueError("need k < d - 2 (the top index belongs to the "
                         "surface-tensor route)")
    validate_rotational(body)
    if isinstance(body, Polytope):
        raise TypeError("hyperplane route needs curvature data (smooth body)")
    cub = _cached_cubature(body, order)
    x, n, w = cub.x, cub.n, cub.weight
    m = x.shape[0]
    alpha_sq, _, _, n_perp = _alpha_split(x, n)
    m_arr = np.minimum(alpha_sq, ALPHA_SQ_CLAMP)
    alpha = np.sqrt(alpha_sq)
    # v = unit component of n orthogonal to x; any unit tangent vector
    # works where x and n are parallel (the combination is v-independent)
    vhat = np.where(alpha[:, None] > 1e-7,
                    n_perp / np.maximum(alpha, 1e-30)[:, None],
                    cub.dirs[:, 0, :])
    qfull = np.broadcast_to(ambient_metric(d).coeffs[:, None],
                            (st.num_coeffs(d, 2), m))
    xhat = x / np.linalg.norm(x, axis=1)[:, None]
    q_xv = qfull - st.batch_vector_power(xhat, 2) - st.batch_vector_power(vhat, 2)
    e_excl = elementary_symmetric_excluding(cub.kappas)

    n_pow = [st.batch_vector_power(n, a) for a in range(s + 1)]
    acc = np.zeros((st.num_coeffs(d, s), m))
    for b in range(s + 1):
        a = s - b
        jb = np.zeros((st.num_coeffs(d, b + 2), m))
        for p in range((b + 2) // 2 + 1):
            q_exp = b + 2 - 2 * p
            coef = (2.0 * math.comb(b + 2, 2 * p)
                    * sphere_area(2 * p + d - 2) / sphere_area(2 * p + 1)
                    * math.exp(math.lgamma((b + q_exp + 1) / 2)
                               + math.lgamma((2 * p + d - 2) / 2)
                               - math.lgamma((2 * b + d + 1) / 2)))
            f2 = hyp2f1((d - 1 - k + s) / 2.0, (b + q_exp + 1) / 2.0,
                        (2 * b + d + 1) / 2.0, m_arr)
            vq = st.batch_vector_power(vhat, q_exp)
            qp = np.ones((1, m))
            for i in range(p):
                qp = st.batch_product(qp, q_xv, d, 2 * i, 2)
            jb += coef * f2[None, :] * st.batch_product(vq, qp, d, q_exp, 2 * p)
        jb *= (alpha ** b)[None, :]
        inner = np.zeros((st.num_coeffs(d, b), m))
        for i in range(d - 1):
            ai2 = st.batch_vector_power(cub.dirs[:, i, :], 2)
            inner += e_excl[i, d - 2 - k][None, :] * \
                st.batch_contract(jb, ai2, d, 2, b)
        acc += math.comb(s, a) * (-1) ** b * \
            st.batch_product(n_pow[a], inner, d, a, b)

    xr = st.batch_vector_power(x, r)
    total = st.batch_product(xr, acc, d, r, s)
    weights = w / np.linalg.norm(x, axis=1)
    pref = 1.0 / (2.0 * math.factorial(r) * math.factorial(s)
                  * sphere_area(d - 1 - k + s))
    return SymTensor(d, r + s, pref * np.einsum("cm,m->c", total, weights))


def rot_rhs_general(body: ConvexBody, psi: PsiFunction, j: int, k: int,
                    order: int = 24, inner_samples: int = 64, seed: int = 0):
    """General rotational formula for a scalar weight psi: boundary
    cubature outside, Monte Carlo over the subspaces of the orthogonal
    complement of x inside.  Returns (value, standard_error)."""
    d = body.dim
    if not 0 <= k < j < d:
        raise ValueError("need 0 <= k < j < d")
    validate_rotational(body)
    x_arr, n_arr, w_arr, kappas, dirs = _support_arrays(body, j, k, order)
    n_inner = 1 if j == 1 else inner_samples
    total = 0.0
    var = 0.0
    c_inner = grassmann_total(d - 1, j - 1)
    for i in range(x_arr.shape[0]):
        x, n, w = x_arr[i], n_arr[i], w_arr[i]
        norm_x = float(np.linalg.norm(x))
        xhat = x / norm_x
        x_perp = LinearFlat(np.linalg.svd(xhat[None, :])[2][1:])
        rng = rng_for_sample(seed, i)
        vals = np.empty(n_inner)
        for t in range(n_inner):
            mflat = sample_linear_within(x_perp, j - 1, rng)
            frame = np.vstack([mflat.frame, xhat[None, :]])
            vals[t] = c_inner * _rot_inner_term(
                frame, x, n, kappas[i] if kappas is not None else None,
                dirs[i] if dirs is not None else None, j, k, d, psi)
        mean = float(vals.mean())
        total += w * norm_x ** (j - d) * mean
        if n_inner > 1:
            var += (w * norm_x ** (j - d)) ** 2 * float(vals.var(ddof=1)) / n_inner
    pref = 1.0 / sphere_area(j - k)
    return pref * total, pref * math.sqrt(var)


def _support_arrays(body, j, k, order):
    if isinstance(body, Polytope):
        if k != j - 1:
            raise TypeError("curvature products require a smooth body")
        x, n, w = top_curvature_quadrature(body, order)
        return x, n, w * sphere_area(1), None, None
    cub = _cached_cubature(body, order)
    return cub.x, cub.n, cub.weight, cub.kappas, cub.dirs


def _rot_inner_term(frame, x, n, kappas, dirs, j, k, d, psi):
    p_n = frame @ n
    p_norm = float(np.linalg.norm(p_n))
    if p_norm < 1e-14:
        return 0.0
    lflat = LinearFlat(frame)
    psi_val = psi(AffineFlat(lflat, np.zeros(d)), x, frame.T @ p_n / p_norm)
    if k == j - 1:
        return p_norm * psi_val
    acc = 0.0
    for subset in combinations(range(d - 1), j - 1 - k):
        rest = [t for t in range(d - 1) if t not in subset]
        g = generalized_sine(lflat, LinearFlat(dirs[rest]))
        acc += (math.prod(kappas[list(subset)])
                * g * g / p_norm ** (j - k) * psi_val)
    return acc


# -- affine formulas ----------------------------------------------------------


def aff_rhs_general(body: ConvexBody, psi: PsiFunction, j: int, k: int,
                    order: int = 24, inner_samples: int = 64, seed: int = 0):
    """General affine formula for a scalar weight psi(E, x, n): boundary
    cubature outside, Monte Carlo over all j-subspaces inside.  Returns
    (value, standard_error)."""
    d = body.dim
    if not 0 <= k < j < d:
        raise ValueError("need 0 <= k < j < d")
    x_arr, n_arr, w_arr, kappas, dirs = _support_arrays(body, j, k, order)
    total = 0.0
    var = 0.0
    c_j = grassmann_total(d, j)
    for i in range(x_arr.shape[0]):
        x, n, w = x_arr[i], n_arr[i], w_arr[i]
        rng = rng_for_sample(seed, i)
        vals = np.empty(inner_samples)
        for t in range(inner_samples):
            lflat = sample_linear(d, j, rng)
            p_n = lflat.frame @ n
            p_norm = float(np.linalg.norm(p_n))
            if p_norm < 1e-14:
                vals[t] = 0.0
                continue
            offset = x - lflat.frame.T @ (lflat.frame @ x)
            psi_val = psi(AffineFlat(lflat, offset), x,
                          lflat.frame.T @ p_n / p_norm)
            if k == j - 1:
                acc = p_norm * psi_val
            else:
                acc = 0.0
                for subset in combinations(range(d - 1), j - 1 - k):
                    rest = [t_ for t_ in range(d - 1) if t_ not in subset]
                    g = generalized_sine(lflat, LinearFlat(dirs[i][rest]))
                    acc += (math.prod(kappas[i][list(subset)])
                            * g * g / p_norm ** (j - k) * psi_val)
            vals[t] = c_j * acc
        total += w * float(vals.mean())
        var += w * w * float(vals.var(ddof=1)) / inner_samples
    pref = 1.0 / sphere_area(j - k)
    return pref * total, pref * math.sqrt(var)


def aff_rhs_psi_xn(body: ConvexBody, psi: PsiFunction, j: int, k: int,
                   order: int = 32, radial_nodes: int = 24,
                   sphere_order: int = 24) -> float:
    """Affine formula for a weight psi(x, n) independent of the flat:
    boundary cubature with an inner half-sphere quadrature whose
    Gauss-Jacobi polar rule absorbs the singular weight exactly."""
    d = body.dim
    if not 0 <= k < j < d:
        raise ValueError("need 0 <= k < j < d")
    if psi.uses_flat:
        raise ValueError("psi must not depend on the flat here")
    if isinstance(body, Polytope):
        raise TypeError("half-sphere route needs curvature data (smooth body)")
    cub = _cached_cubature(body, order)
    e_excl = elementary_symmetric_excluding(cub.kappas)
    a_j, b_j = (d - j - 2) / 2.0, k / 2.0
    u, wu = roots_jacobi(radial_nodes, a_j, b_j)
    y = (u + 1.0) / 2.0
    t_nodes = np.sqrt(y)
    t_weights = wu * 2.0 ** (-(a_j + b_j + 1.0)) * 0.5
    w_pts, w_wts = sphere_quadrature(d - 1, sphere_order)
    proj_sq = w_pts ** 2  # <w, a_l>^2 in the principal frame
    total = 0.0
    for i in range(cub.x.shape[0]):
        x, n = cub.x[i], cub.n[i]
        w_amb = w_pts @ cub.dirs[i]  # unit vectors in the tangent hyperplane
        inner = np.zeros(d - 1)
        for it, t in enumerate(t_nodes):
            z = t * n[None, :] + math.sqrt(1.0 - t * t) * w_amb
            psi_vals = np.array([psi(None, x, z[mm]) for mm in range(z.shape[0])])
            inner += t_weights[it] * ((w_wts * psi_vals) @ proj_sq)
        total += cub.weight[i] * float(e_excl[:, j - k - 1, i] @ inner)
    return c_affine(d, j, k) / sphere_area(j - k) * total


def aff_rhs_minkowski(body: ConvexBody, j: int, k: int, r: int, s: int,
                      order: int = 64) -> SymTensor:
    """Affine average of sectional Minkowski tensors as a finite linear
    combination of ambient Minkowski tensors.

    Smooth bodies use the full combination including generalized
    tensors.  Polytopes support the pure-tensor reductions: r = 0 (any
    k), or k = j - 1 (any r; on the top ambient index the generalized
    terms collapse into ordinary ones).
    """
    d = body.dim
    if not 0 <= k < j < d:
        raise ValueError("need 0 <= k < j < d")
    kk = d - j + k
    pref = (c_affine(d, j, k) * math.pi ** ((d - 1) / 2.0)
            / (2.0 * sphere_area(j - k + s)
               * math.gamma((d - j + 2 + k + s) / 2.0)))
    q = ambient_metric(d)
    smooth = not isinstance(body, Polytope)
    if not smooth and r > 0 and k != j - 1:
        raise TypeError(
            "polytope route supports r = 0 or the top sectional index only "
            "(generalized tensors of polytopes are not implemented)")
    out = SymTensor.zero(d, r + s)
    if smooth and not (r == 0 or k == j - 1):
        for p in range(s // 2 + 1):
            chi = chi_constant(d, j, k, s, p)
            term = (d - j + k) * q.power(p).sym_product(
                phi(body, kk, r, s - 2 * p, order))
            if p >= 1:
                term = term + 2 * p * q.power(p - 1).sym_product(
                    phi_generalized(body, kk, r, s - 2 * p, order))
            out = out + chi * term
    else:
        for p in range(s // 2 + 1):
            coef = ((d - j + k + 2 * p) * chi_constant(d, j, k, s, p)
                    - 4.0 * math.pi * (p + 1) * (s - 2 * p)
                    * chi_constant(d, j, k, s, p + 1))
            out = out + coef * q.power(p).sym_product(
                phi(body, kk, r, s - 2 * p, order))
    return pref * out


def aff_rhs_minkowski_generalized(body: ConvexBody, j: int, k: int, r: int,
                                  s: int, order: int = 64) -> SymTensor:
    """The smooth-body combination with explicit generalized tensors,
    exposed separately so both routes can be cross-checked."""
    d = body.dim
    if isinstance(body, Polytope):
        raise TypeError("needs a smooth body")
    kk = d - j + k
    pref = (c_affine(d, j, k) * math.pi ** ((d - 1) / 2.0)
            / (2.0 * sphere_area(j - k + s)
               * math.gamma((d - j + 2 + k + s) / 2.0)))
    q = ambient_metric(d)
    out = SymTensor.zero(d, r + s)
    for p in range(s // 2 + 1):
        chi = chi_constant(d, j, k, s, p)
        term = (d - j + k) * q.power(p).sym_product(
            phi(body, kk, r, s - 2 * p, order))
        if p >= 1:
            term = term + 2 * p * q.power(p - 1).sym_product(
                phi_generalized(body, kk, r, s - 2 * p, order))
        out = out + chi * term
    return pref * out


def aff_rhs_harmonic(body: ConvexBody, j: int, r: int, s: int,
                     order: int = 64) -> SymTensor:
    """Affine average of the sectional harmonic tensors (top sectional
    index): a single multiple of the ambient harmonic Minkowski tensor."""
    d = body.dim
    if d < 3 or not 1 <= j < d:
        raise ValueError("need d >= 3 and 1 <= j < d")
    coef = (a_constant(s, j, d) * grassmann_total(d - 2, j - 1)
            * sphere_area(d - 1))
    return coef * xi(body, d - 1, r, s, order)
