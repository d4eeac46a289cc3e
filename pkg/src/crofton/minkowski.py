"""Minkowski tensors of convex bodies.

Ambient tensors, tensors computed intrinsically on a section and pushed
to ambient coordinates, the generalized variant with a tangential
metric factor, harmonic variants, and the checker for the linear
dependences among their total measures.

Smooth bodies integrate over boundary cubature; the normal-bundle
tangent structure turns every curvature-weighted integrand into an
elementary symmetric polynomial of the principal curvatures against
plain surface measure.  Polytopes integrate face by face against the
product of face measure and normal-cone measure.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

from . import symtensor as st
from .bodies import (Ball, BoundaryCubature, ConvexBody, Ellipsoid, FaceData,
                     Polytope, boundary_cubature, polytope_faces)
from .flats import as_affine
from .specfun import sphere_area
from .symtensor import SymTensor, ambient_metric

TWO_PI = 2.0 * math.pi


# -- small numeric helpers -------------------------------------------------


def elementary_symmetric(vals: np.ndarray) -> np.ndarray:
    """e_0..e_n of each row of vals (M, n); returns (n+1, M)."""
    m, n = vals.shape
    e = np.zeros((n + 1, m))
    e[0] = 1.0
    for i in range(n):
        for deg in range(i + 1, 0, -1):
            e[deg] += vals[:, i] * e[deg - 1]
    return e


def elementary_symmetric_excluding(vals: np.ndarray) -> np.ndarray:
    """e_0..e_{n-1} of each row with one entry removed; (n, n, M) indexed
    [excluded, degree]."""
    m, n = vals.shape
    out = np.zeros((n, n, m))
    for i in range(n):
        idx = [j for j in range(n) if j != i]
        out[i] = elementary_symmetric(vals[:, idx])
    return out


@lru_cache(maxsize=64)
def _cached_cubature(body: ConvexBody, order: int) -> BoundaryCubature:
    return boundary_cubature(body, order)


@lru_cache(maxsize=32)
def _cached_sphere_rule(d: int, order: int):
    from .bodies import sphere_quadrature
    u, w = sphere_quadrature(d, order)
    u.setflags(write=False)
    w.setflags(write=False)
    return u, w


@lru_cache(maxsize=None)
def _gl01(n: int):
    x, w = leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


@lru_cache(maxsize=None)
def _metric_power_coeffs(d: int, i: int) -> np.ndarray:
    return ambient_metric(d).power(i).coeffs


def harmonic_basis(d: int, s: int, u) -> SymTensor:
    """Rank-s tensor whose coordinates are degree-s spherical harmonics
    of the unit vector u: an alternating sum of metric powers times
    powers of u."""
    if d < 2 or s < 0:
        raise ValueError("need d >= 2 and s >= 0")
    u = np.asarray(u, dtype=float)
    coeffs = np.zeros(st.num_coeffs(d, s))
    usq = float(u @ u)
    for i, c in _harmonic_terms(d, s):
        qp = _metric_power_coeffs(d, i)
        up = st.vector_power(u, s - 2 * i).coeffs
        tab = st.product_table(d, 2 * i, s - 2 * i)
        coeffs += c * usq ** i * np.einsum("i,j,ijk->k", qp, up, tab)
    return SymTensor(d, s, coeffs)


@lru_cache(maxsize=None)
def _harmonic_terms(d: int, s: int) -> tuple[tuple[int, float], ...]:
    out = []
    for i in range(s // 2 + 1):
        c = ((-1) ** i * math.gamma(d / 2.0 + s - 1 - i)
             / (4 ** i * math.factorial(i) * math.factorial(s - 2 * i)))
        out.append((i, c))
    return tuple(out)


def _batch_ns(n_amb: np.ndarray, s: int, d: int, harmonic: bool) -> np.ndarray:
    """Batched coefficients of n^s, or of the harmonic replacement."""
    if not harmonic:
        return st.batch_vector_power(n_amb, s)
    m = n_amb.shape[0]
    out = np.zeros((st.num_coeffs(d, s), m))
    for i, c in _harmonic_terms(d, s):
        up = st.batch_vector_power(n_amb, s - 2 * i)
        qp = np.broadcast_to(_metric_power_coeffs(d, i)[:, None],
                             (st.num_coeffs(d, 2 * i), m))
        out += c * st.batch_product(qp, up, d, 2 * i, s - 2 * i)
    return out


def _weighted_xrns(x: np.ndarray, n: np.ndarray, w: np.ndarray,
                   r: int, s: int, d: int, harmonic: bool = False) -> np.ndarray:
    """sum_i w_i * coeffs(x_i^r n_i^s); the tensor-valued cubature core."""
    xr = st.batch_vector_power(x, r)
    ns = _batch_ns(n, s, d, harmonic)
    return np.einsum("cm,m->c", st.batch_product(xr, ns, d, r, s), w)


# -- curvature measure quadratures -----------------------------------------


def top_curvature_quadrature(body: ConvexBody, order: int):
    """(x, n, w) with sum w_i f(x_i, n_i) approximating the integral of f
    against the top generalized curvature measure (index d-1).  Works for
    smooth bodies and polytopes; for the latter only facets contribute."""
    if isinstance(body, Polytope):
        x, n, w = _facet_quadrature(body, order)
        return x, n, w / sphere_area(1)
    cub = _cached_cubature(body, order)
    return cub.x, cub.n, cub.weight / sphere_area(1)


def _facet_quadrature(body: Polytope, order: int):
    """Quadrature of the boundary of a polytope (d = 2 or 3), refined
    enough for smooth non-polynomial integrands."""
    d = body.dim
    xs, ns, ws = [], [], []
    if d == 2:
        t, wt = _gl01(max(8, order // 4))
        for face in polytope_faces(body):
            if face.k != 1:
                continue
            p, q = face.vertices
            seg = q - p
            pts = p[None, :] + t[:, None] * seg[None, :]
            xs.append(pts)
            ns.append(np.broadcast_to(face.cone_normals[0], pts.shape))
            ws.append(wt * np.linalg.norm(seg))
        return np.vstack(xs), np.vstack(ns), np.concatenate(ws)
    if d != 3:
        raise NotImplementedError("facet quadrature for d in {2, 3}")
    subdiv = 2 if order <= 48 else 3
    ngl = max(6, order // 8)
    for face in polytope_faces(body):
        if face.k != 2:
            continue
        verts = face.vertices
        centroid = verts.mean(axis=0)
        for i in range(verts.shape[0]):
            tri = np.array([centroid, verts[i],
                            verts[(i + 1) % verts.shape[0]]])
            p, w = _triangle_quadrature(tri, subdiv, ngl)
            xs.append(p)
            ns.append(np.broadcast_to(face.cone_normals[0], p.shape))
            ws.append(w)
    return np.vstack(xs), np.vstack(ns), np.concatenate(ws)


def _triangle_quadrature(tri: np.ndarray, subdiv: int, ngl: int):
    """Duffy-type Gauss rule on a triangle, with uniform subdivision."""
    tris = [tri]
    for _ in range(subdiv):
        nxt = []
        for t in tris:
            m01, m12, m20 = (t[0] + t[1]) / 2, (t[1] + t[2]) / 2, (t[2] + t[0]) / 2
            nxt += [np.array([t[0], m01, m20]), np.array([m01, t[1], m12]),
                    np.array([m20, m12, t[2]]), np.array([m01, m12, m20])]
        tris = nxt
    u, wu = _gl01(ngl)
    uu, vv = np.meshgrid(u, u, indexing="ij")
    ww = np.outer(wu, wu).ravel()
    uu, vv = uu.ravel(), vv.ravel()
    pts, wts = [], []
    for t in tris:
        e1, e2 = t[1] - t[0], t[2] - t[1]
        p = t[0][None, :] + uu[:, None] * e1[None, :] + (uu * vv)[:, None] * e2[None, :]
        area2 = np.linalg.norm(np.cross(e1, t[2] - t[0]))
        pts.append(p)
        wts.append(ww * uu * area2)
    return np.vstack(pts), np.concatenate(wts)


# -- ambient Minkowski tensors ----------------------------------------------


def phi_coeffs(body: ConvexBody, k: int, r: int, s: int, order: int = 64,
               harmonic: bool = False) -> np.ndarray:
    d = body.dim
    if k == d:
        if s != 0:
            raise ValueError("homogeneity index d requires s = 0")
        if harmonic:
            raise ValueError("no harmonic variant of the volume tensor")
        return _volume_tensor(body, r).coeffs
    if not 0 <= k <= d - 1:
        raise ValueError("need 0 <= k <= d")
    norm = 1.0 / (math.factorial(r) * math.factorial(s) * sphere_area(d - k + s))
    if isinstance(body, Polytope):
        return norm * _polytope_lambda_moment(body, k, r, s, harmonic)
    cub = _cached_cubature(body, order)
    e = elementary_symmetric(cub.kappas)[d - 1 - k]
    return norm * _weighted_xrns(cub.x, cub.n, cub.weight * e, r, s, d, harmonic)


def phi(body: ConvexBody, k: int, r: int, s: int, order: int = 64) -> SymTensor:
    """Minkowski tensor of homogeneity k integrating x^r n^s; k = d with
    s = 0 gives the volume tensor."""
    return SymTensor(body.dim, r + s, phi_coeffs(body, k, r, s, order))


def intrinsic_volume(body: ConvexBody, k: int, order: int = 64) -> float:
    return float(phi_coeffs(body, k, 0, 0, order)[0])


def phi_generalized_coeffs(body: ConvexBody, k: int, r: int, s: int,
                           order: int = 64) -> np.ndarray:
    d = body.dim
    if not 1 <= k <= d - 1:
        raise ValueError("need 1 <= k <= d - 1")
    if isinstance(body, Polytope):
        raise TypeError("generalized tensors are implemented for smooth bodies")
    cub = _cached_cubature(body, order)
    m = cub.x.shape[0]
    e_excl = elementary_symmetric_excluding(cub.kappas)  # (d-1, d-1, M)
    xr = st.batch_vector_power(cub.x, r)
    ns = st.batch_vector_power(cub.n, s)
    base = st.batch_product(xr, ns, d, r, s)
    acc = np.zeros((st.num_coeffs(d, r + s + 2), m))
    for i in range(d - 1):
        ai2 = st.batch_vector_power(cub.dirs[:, i, :], 2)
        acc += st.batch_product(base * e_excl[i, d - 1 - k][None, :], ai2,
                                d, r + s, 2)
    norm = 1.0 / (math.factorial(r) * math.factorial(s) * sphere_area(d - k + s))
    return norm * np.einsum("cm,m->c", acc, cub.weight)


def phi_generalized(body: ConvexBody, k: int, r: int, s: int,
                    order: int = 64) -> SymTensor:
    """Generalized Minkowski tensor with the extra tangential factor
    sum_{i not in I} a_i^2; rank r + s + 2."""
    return SymTensor(body.dim, r + s + 2,
                     phi_generalized_coeffs(body, k, r, s, order))


def xi(body: ConvexBody, k: int, r: int, s: int, order: int = 64) -> SymTensor:
    """Harmonic Minkowski tensor: n^s replaced by the harmonic basis
    tensor of the normal."""
    return SymTensor(body.dim, r + s, phi_coeffs(body, k, r, s, order,
                                                 harmonic=True))


# -- relative (sectional) tensors -------------------------------------------


def phi_relative_coeffs(sec: ConvexBody, k: int, r: int, s: int, embedding,
                        order: int = 32, ambient: bool = True,
                        harmonic: bool = False) -> np.ndarray:
    """Tensor of a section body, computed intrinsically in the flat and
    (by default) pushed forward: positions in ambient coordinates via the
    embedding, normals pushed through the flat's frame."""
    flat = as_affine(embedding)
    j = sec.dim
    if flat.subdim != j:
        raise ValueError("embedding dimension does not match the section body")
    if not 0 <= k < j:
        raise ValueError("need 0 <= k < section dimension")
    if ambient:
        v, q, d = flat.base.frame, flat.offset, flat.dim
    else:
        v, q, d = np.eye(j), np.zeros(j), j
    norm = 1.0 / (math.factorial(r) * math.factorial(s) * sphere_area(j - k + s))
    x_loc, n_loc, w = lambda_samples(sec, k, order)
    x_amb = q[None, :] + x_loc @ v
    n_amb = n_loc @ v
    return norm * _weighted_xrns(x_amb, n_amb, w, r, s, d, harmonic)


def phi_relative(sec: ConvexBody, k: int, r: int, s: int, embedding,
                 order: int = 32, ambient: bool = True) -> SymTensor:
    flat = as_affine(embedding)
    d = flat.dim if ambient else sec.dim
    return SymTensor(d, r + s, phi_relative_coeffs(sec, k, r, s, embedding,
                                                   order, ambient))


def xi_tilde_relative(sec: ConvexBody, r: int, s: int, embedding,
                      order: int = 32) -> SymTensor:
    """Sectional tensor with the ambient harmonic basis applied to the
    section normals (not itself harmonic on the flat); homogeneity index
    is one less than the section dimension."""
    flat = as_affine(embedding)
    return SymTensor(flat.dim, r + s,
                     phi_relative_coeffs(sec, sec.dim - 1, r, s, embedding,
                                         order, ambient=True, harmonic=True))


def lambda_samples(sec: ConvexBody, k: int, order: int = 32):
    """(x, n, w) with sum w f(x, n) equal to sigma_{dim-k} times the
    integral of f against the body's k-th curvature measure; the sigma
    factor cancels against the tensor normalization.

    Balls and ellipsoids avoid the full cubature (no principal frames
    needed), keeping per-section cost low in the Monte Carlo loops.
    """
    j = sec.dim
    if isinstance(sec, Polytope):
        return _polytope_lambda_samples(sec, k, j)
    u, w = _cached_sphere_rule(j, order)
    if isinstance(sec, Ball):
        rho = sec.radius
        x = sec.center[None, :] + rho * u
        scale = math.comb(j - 1, j - 1 - k) * rho ** k
        return x, u, w * scale
    a = sec.semiaxes
    rot = sec.orientation
    m = u / a[None, :]
    m_norm = np.linalg.norm(m, axis=1)
    n0 = m / m_norm[:, None]
    x = sec.center[None, :] + (a[None, :] * u) @ rot.T
    n = n0 @ rot.T
    weight = np.prod(a) * m_norm * w
    if j == 1 or k == j - 1:
        return x, n, weight
    b_diag = 1.0 / a ** 2
    proj = np.eye(j)[None, :, :] - n0[:, :, None] * n0[:, None, :]
    w_op = np.einsum("mij,j,mjk->mik", proj, b_diag, proj) / m_norm[:, None, None]
    kappas = np.linalg.eigvalsh(w_op)[:, 1:]
    e = elementary_symmetric(kappas)[j - 1 - k]
    return x, n, weight * e


def _polytope_lambda_samples(sec: Polytope, k: int, j: int):
    """Discrete/quadrature samples (x, n, w) in flat coordinates with
    sum w f(x, n) = integral of f against sigma_{j-k} * Lambda_k of a
    1- or 2-dimensional polytope (the sigma factor cancels against the
    tensor normalization, which divides by it)."""
    if j == 1:
        lo, hi = float(sec.vertices.min()), float(sec.vertices.max())
        x = np.array([[lo], [hi]])
        n = np.array([[-1.0], [1.0]])
        return x, n, np.array([1.0, 1.0])
    if j != 2:
        raise NotImplementedError("sections of dimension 1 or 2")
    return _polygon_lambda_samples(sec, k)


def _polygon_lambda_samples(sec: Polytope, k: int):
    """Vectorized edge/arc rules for convex polygons (counter-clockwise
    vertex order, re-oriented if needed)."""
    v = sec.vertices
    x0, y0 = v[:, 0], v[:, 1]
    if 0.5 * float(np.sum(x0 * np.roll(y0, -1) - np.roll(x0, -1) * y0)) < 0:
        v = v[::-1]
    nv = v.shape[0]
    edges = np.roll(v, -1, axis=0) - v
    lens = np.linalg.norm(edges, axis=1)
    normals = np.column_stack([edges[:, 1], -edges[:, 0]]) / lens[:, None]
    if k == 1:
        t, wt = _gl01(6)
        x = (v[:, None, :] + t[None, :, None] * edges[:, None, :]).reshape(-1, 2)
        n = np.repeat(normals, t.size, axis=0)
        w = np.outer(lens, wt).ravel()
        return x, n, w
    ang = np.arctan2(normals[:, 1], normals[:, 0])
    prev = np.roll(ang, 1)
    gaps = (ang - prev) % TWO_PI
    t, wt = _gl01(10)
    theta = prev[:, None] + gaps[:, None] * t[None, :]
    n = np.stack([np.cos(theta), np.sin(theta)], axis=2).reshape(-1, 2)
    x = np.repeat(v, t.size, axis=0)
    w = np.outer(gaps, wt).ravel()
    return x, n, w


# -- polytope ambient curvature moments --------------------------------------


def _polytope_lambda_moment(body: Polytope, k: int, r: int, s: int,
                            harmonic: bool) -> np.ndarray:
    """Coefficients of the integral of x^r n^s against sigma_{d-k} *
    Lambda_k for a polytope of dimension <= 3."""
    d = body.dim
    if d == 1:
        if k != 0:
            raise ValueError("1-d polytopes only carry the index-0 measure")
        lo, hi = float(body.vertices.min()), float(body.vertices.max())
        x = np.array([[lo], [hi]])
        n = np.array([[-1.0], [1.0]])
        return _weighted_xrns(x, n, np.ones(2), r, s, 1, harmonic)
    acc = np.zeros(st.num_coeffs(d, r + s))
    for face in polytope_faces(body):
        if face.k != k:
            continue
        fm = _face_position_moment(face, r, d)
        cm = _cone_normal_moment(face, s, d, harmonic)
        tab = st.product_table(d, r, s)
        acc += np.einsum("i,j,ijk->k", fm, cm, tab)
    return acc


def _face_position_moment(face: FaceData, r: int, d: int) -> np.ndarray:
    """Coefficients of the integral of x^r over the face."""
    if face.k == 0:
        return st.vector_power(face.vertices[0], r).coeffs
    if face.k == 1:
        t, wt = _gl01(max(4, (r + 3) // 2))
        p, q = face.vertices
        seg = q - p
        pts = p[None, :] + t[:, None] * seg[None, :]
        return np.einsum("cm,m->c", st.batch_vector_power(pts, r),
                         wt * np.linalg.norm(seg))
    # planar polygon in R^3: fan of triangles, exact simplex moments
    verts = face.vertices
    centroid = verts.mean(axis=0)
    acc = np.zeros(st.num_coeffs(d, r))
    for i in range(verts.shape[0]):
        tri = np.array([centroid, verts[i], verts[(i + 1) % verts.shape[0]]])
        acc += _simplex_moment(tri, r, d)
    return acc


def _simplex_moment(verts: np.ndarray, r: int, d: int) -> np.ndarray:
    """Exact integral of x^r over a simplex (any dimension k := len-1),
    via barycentric expansion: int prod lambda^beta = vol * k! *
    prod(beta!) / (|beta| + k)!."""
    kdim = verts.shape[0] - 1
    if kdim == 2:
        e1, e2 = verts[1] - verts[0], verts[2] - verts[0]
        vol = 0.5 * np.linalg.norm(np.cross(e1, e2)) if d == 3 else \
            0.5 * abs(e1[0] * e2[1] - e1[1] * e2[0])
    elif kdim == 3:
        vol = abs(np.linalg.det(verts[1:] - verts[0])) / 6.0
    elif kdim == 1:
        vol = float(np.linalg.norm(verts[1] - verts[0]))
    else:
        raise NotImplementedError
    out = np.zeros(st.num_coeffs(d, r))
    expansion = _lambda_expansion(verts, r)
    for beta, tensor_coeffs in expansion.items():
        wgt = (vol * math.factorial(kdim)
               * math.prod(math.factorial(b) for b in beta)
               / math.factorial(r + kdim))
        out += wgt * tensor_coeffs
    return out


def _lambda_expansion(verts: np.ndarray, r: int) -> dict:
    """Expand (sum_t lambda_t v_t)^r as {beta: coeffs of prod v_t^{beta_t}}
    with multinomial weights, in multiset tensor coefficients."""
    d = verts.shape[1]
    nv = verts.shape[0]
    if r == 0:
        return {(0,) * nv: np.ones(1)}
    prev = _lambda_expansion(verts, r - 1)
    out: dict[tuple, np.ndarray] = {}
    tab = st.product_table(d, r - 1, 1)
    vcoeffs = [st.vector_power(verts[t], 1).coeffs for t in range(nv)]
    for beta, coeffs in prev.items():
        for t in range(nv):
            nb = list(beta)
            nb[t] += 1
            term = np.einsum("i,j,ijk->k", coeffs, vcoeffs[t], tab)
            key = tuple(nb)
            if key in out:
                out[key] = out[key] + term
            else:
                out[key] = term
    # each beta is reached once per ordering of its factors, so the dict
    # values carry the multinomial coefficients of the expansion already
    return out


def _cone_normal_moment(face: FaceData, s: int, d: int,
                        harmonic: bool) -> np.ndarray:
    """Coefficients of the integral of n^s over the face's normal cone
    intersected with the unit sphere."""
    if face.k == d - 1:
        n = face.cone_normals[0]
        if harmonic:
            return harmonic_basis(d, s, n).coeffs
        return st.vector_power(n, s).coeffs
    if d == 2:  # vertex of a polygon: circular arc
        n0, n1 = face.cone_normals
        a0 = math.atan2(n0[1], n0[0])
        gap = (math.atan2(n1[1], n1[0]) - a0) % TWO_PI
        t, wt = _gl01(max(8, s + 2))
        ang = a0 + t * gap
        pts = np.column_stack([np.cos(ang), np.sin(ang)])
        return np.einsum("cm,m->c", _batch_ns(pts, s, 2, harmonic), wt * gap)
    if face.k == 1:  # edge of a 3-polytope: geodesic arc
        n0, n1 = face.cone_normals
        w = n1 - (n1 @ n0) * n0
        w /= np.linalg.norm(w)
        gap = math.atan2(float(n1 @ w), float(n1 @ n0))
        t, wt = _gl01(max(8, s + 2))
        ang = t * gap
        pts = np.outer(np.cos(ang), n0) + np.outer(np.sin(ang), w)
        return np.einsum("cm,m->c", _batch_ns(pts, s, 3, harmonic), wt * gap)
    # vertex of a 3-polytope: spherical polygon, fan of spherical triangles
    normals = face.cone_normals
    acc = np.zeros(st.num_coeffs(d, s))
    for i in range(1, normals.shape[0] - 1):
        acc += _spherical_triangle_moment(
            np.array([normals[0], normals[i], normals[i + 1]]), s, d, harmonic)
    return acc


def _spherical_triangle_moment(tri: np.ndarray, s: int, d: int,
                               harmonic: bool) -> np.ndarray:
    """Integral of n^s over a spherical triangle via radial projection of
    the chordal triangle: the area element picks up h / |y|^3 with h the
    distance of the chordal plane from the origin."""
    nu = np.cross(tri[1] - tri[0], tri[2] - tri[0])
    nu /= np.linalg.norm(nu)
    h = float(nu @ tri[0])
    if h < 0:
        nu, h = -nu, -h
    if h < 1e-12:
        raise ValueError("degenerate normal cone (angle >= pi)")
    pts, wts = _triangle_quadrature(tri, 2, 10)
    norms = np.linalg.norm(pts, axis=1)
    return np.einsum("cm,m->c", _batch_ns(pts / norms[:, None], s, d, harmonic),
                     wts * h / norms ** 3)


# -- volume tensors ----------------------------------------------------------


@lru_cache(maxsize=None)
def _ball_moment(d: int, p: int) -> SymTensor:
    """Integral of u^p over the unit ball."""
    coeffs = np.zeros(st.num_coeffs(d, p))
    for i, m in enumerate(st.multi_indices(d, p)):
        if any(mi % 2 for mi in m):
            continue
        sphere = 2.0 * math.prod(math.gamma((mi + 1) / 2.0) for mi in m) \
            / math.gamma((p + d) / 2.0)
        coeffs[i] = sphere / (p + d)
    return SymTensor(d, p, coeffs)


def _volume_tensor(body: ConvexBody, p: int) -> SymTensor:
    """Integral of x^p over the body (no factorial normalization)."""
    d = body.dim
    if isinstance(body, Ball):
        out = SymTensor.zero(d, p)
        cp = st.vector_power(body.center, 0)
        for i in range(p + 1):
            mom = _ball_moment(d, i) * (body.radius ** (i + d))
            term = st.vector_power(body.center, p - i).sym_product(mom)
            out = out + math.comb(p, i) * term
        return out
    if isinstance(body, Ellipsoid):
        a_mat = body.orientation @ np.diag(body.semiaxes)
        det = float(np.prod(body.semiaxes))
        out = SymTensor.zero(d, p)
        for i in range(p + 1):
            mom = _ball_moment(d, i).transform(a_mat) * det
            out = out + math.comb(p, i) * st.vector_power(body.center, p - i) \
                .sym_product(mom)
        return out
    # polytope: fan of simplices from the vertex centroid
    verts = body.vertices
    centroid = verts.mean(axis=0)
    out = np.zeros(st.num_coeffs(d, p))
    if d == 1:
        lo, hi = float(verts.min()), float(verts.max())
        t, wt = _gl01(max(4, p // 2 + 2))
        pts = (lo + t * (hi - lo))[:, None]
        return SymTensor(1, p, np.einsum("cm,m->c", st.batch_vector_power(pts, p),
                                         wt * (hi - lo)))
    if d == 2:
        faces = [f for f in polytope_faces(body) if f.k == 1]
        for f in faces:
            tri = np.array([centroid, f.vertices[0], f.vertices[1]])
            out += _simplex_moment(tri, p, 2)
        return SymTensor(2, p, out)
    for f in polytope_faces(body):
        if f.k != 2:
            continue
        fverts = f.vertices
        fc = fverts.mean(axis=0)
        for i in range(fverts.shape[0]):
            tet = np.array([centroid, fc, fverts[i],
                            fverts[(i + 1) % fverts.shape[0]]])
            out += _simplex_moment(tet, p, 3)
    return SymTensor(3, p, out)


# -- linear dependences among total measures ---------------------------------


def check_dependences(body: ConvexBody, k: int, r: int, s: int,
                 order: int = 64) -> dict[str, SymTensor]:
    """Residuals (left minus right) of the linear dependences between
    generalized and ordinary Minkowski tensors.

    Keys: 'top' (k = d-1), 'shift_down' and 'shift_up' (1 <= k <= d-2;
    'shift_up' needs k + r <= d-1), 'r0' (r = 0 specialization).
    """
    d = body.dim
    if s < 2:
        raise ValueError("the dependences require s >= 2")
    q = ambient_metric(d)
    res: dict[str, SymTensor] = {}

    def phi_or_zero(kk, rr, ss):
        if kk < 0 or kk > d - 1:
            return SymTensor.zero(d, rr + ss)
        return phi(body, kk, rr, ss, order)

    if k == d - 1:
        lhs = phi_generalized(body, d - 1, r, s - 2, order)
        rhs = q.sym_product(phi(body, d - 1, r, s - 2, order)) \
            - TWO_PI * s * phi(body, d - 1, r, s, order)
        res["top"] = lhs - rhs
    if 1 <= k <= d - 2:
        lhs = phi_generalized(body, k, r, s - 2, order)
        rhs = SymTensor.zero(d, r + s)
        for l in range(s):
            rhs = rhs + TWO_PI * (s - 1 - l) * phi_or_zero(k - l - 1, r + l + 1,
                                                           s - l - 1)
        for l in range(s - 2):
            rhs = rhs - q.sym_product(phi_or_zero(k - l - 1, r + l + 1, s - l - 3))
        res["shift_down"] = lhs - rhs
        if k + r <= d - 1:
            rhs = SymTensor.zero(d, r + s)
            for l in range(r + 1):
                rhs = rhs + q.sym_product(phi(body, k + l, r - l, s - 2 + l, order))
                rhs = rhs - TWO_PI * (s + l) * phi(body, k + l, r - l, s + l, order)
            res["shift_up"] = lhs - rhs
        if r == 0:
            rhs = q.sym_product(phi(body, k, 0, s - 2, order)) \
                - TWO_PI * s * phi(body, k, 0, s, order)
            res["r0"] = lhs - rhs
    return res
