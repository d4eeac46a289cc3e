"""Convex bodies (ball, ellipsoid, polytope): exact sectioning with flats,
boundary cubature with curvature data, face lattices for polytopes, and
the validity check for the rotational formulas.

Polytope face machinery is implemented for ambient dimension <= 3, which
covers all sections (dimension 1 and 2) and the 3-d test bodies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, HalfspaceIntersection
from scipy.special import roots_jacobi

from .flats import AffineFlat, as_affine

TANGENT_TOL = 1e-9


class DegenerateSectionError(RuntimeError):
    """Flat is tangential (within tolerance) to the body."""


class OriginOnBoundaryError(ValueError):
    """Rotational formulas are undefined when the origin lies on the
    boundary: a polygon with a vertex at the origin already makes the
    right-hand side divergent while the left-hand side stays finite."""


# -- body types ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float)
        c.setflags(write=False)
        object.__setattr__(self, "center", c)
        if self.radius <= 0:
            raise ValueError("radius must be positive")

    @property
    def dim(self) -> int:
        return self.center.size

    def circumsphere(self):
        return self.center, self.radius

    def contains(self, x, tol=1e-12) -> bool:
        return np.linalg.norm(np.asarray(x) - self.center) <= self.radius + tol


@dataclass(frozen=True, eq=False)
class Ellipsoid:
    """Points c + orientation @ diag(semiaxes) @ u, |u| <= 1.  Columns of
    `orientation` are the axis directions."""

    center: np.ndarray
    semiaxes: np.ndarray
    orientation: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float)
        a = np.asarray(self.semiaxes, dtype=float)
        r = np.asarray(self.orientation, dtype=float)
        if np.any(a <= 0):
            raise ValueError("semiaxes must be positive")
        if r.shape != (c.size, c.size) or not np.allclose(r @ r.T, np.eye(c.size),
                                                          atol=1e-10):
            raise ValueError("orientation must be orthogonal")
        for arr in (c, a, r):
            arr.setflags(write=False)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "semiaxes", a)
        object.__setattr__(self, "orientation", r)

    @staticmethod
    def axis_aligned(center, semiaxes) -> "Ellipsoid":
        center = np.asarray(center, dtype=float)
        return Ellipsoid(center, np.asarray(semiaxes, dtype=float),
                         np.eye(center.size))

    @property
    def dim(self) -> int:
        return self.center.size

    def quadratic_matrix(self) -> np.ndarray:
        """M with (x-c)^T M (x-c) <= 1."""
        r = self.orientation
        return r @ np.diag(1.0 / self.semiaxes ** 2) @ r.T

    def circumsphere(self):
        return self.center, float(np.max(self.semiaxes))

    def contains(self, x, tol=1e-12) -> bool:
        delta = np.asarray(x, dtype=float) - self.center
        return float(delta @ self.quadratic_matrix() @ delta) <= 1.0 + tol


@dataclass(frozen=True, eq=False)
class Polytope:
    """V-representation plus H-representation <a_i, x> <= b_i with unit
    normals; the two are kept mutually consistent."""

    vertices: np.ndarray
    normals: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        a = np.atleast_2d(np.asarray(self.normals, dtype=float))
        b = np.asarray(self.offsets, dtype=float)
        if v.ndim != 2 or a.shape[1] != v.shape[1] or b.shape != (a.shape[0],):
            raise ValueError("inconsistent polytope arrays")
        viol = v @ a.T - b[None, :]
        if np.max(viol) > 1e-9 * max(1.0, np.max(np.abs(v))):
            raise ValueError("a vertex violates a halfspace")
        for arr in (v, a, b):
            arr.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "normals", a)
        object.__setattr__(self, "offsets", b)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @staticmethod
    def from_vertices(vertices) -> "Polytope":
        v = np.asarray(vertices, dtype=float)
        d = v.shape[1]
        if d == 1:
            lo, hi = float(np.min(v)), float(np.max(v))
            if hi - lo < 1e-12:
                raise ValueError("degenerate 1-d polytope")
            return Polytope(np.array([[lo], [hi]]),
                            np.array([[1.0], [-1.0]]), np.array([hi, -lo]))
        hull = ConvexHull(v)
        eqs = hull.equations  # rows (a, c): a.x + c <= 0
        norms = np.linalg.norm(eqs[:, :d], axis=1)
        a = eqs[:, :d] / norms[:, None]
        b = -eqs[:, d] / norms
        # merge coplanar qhull facets
        _, keep = np.unique(np.round(np.hstack([a, b[:, None]]), 9),
                            axis=0, return_index=True)
        verts = v[hull.vertices]  # counter-clockwise when d == 2
        return Polytope(verts, a[sorted(keep)], b[sorted(keep)])

    @staticmethod
    def from_halfspaces(normals, offsets) -> "Polytope":
        a = np.atleast_2d(np.asarray(normals, dtype=float))
        b = np.asarray(offsets, dtype=float)
        norms = np.linalg.norm(a, axis=1)
        a, b = a / norms[:, None], b / norms
        d = a.shape[1]
        # Chebyshev center for an interior point
        res = linprog(np.r_[np.zeros(d), -1.0],
                      A_ub=np.hstack([a, np.ones((a.shape[0], 1))]), b_ub=b,
                      bounds=[(None, None)] * d + [(0, None)], method="highs")
        if not res.success or res.x[d] < 1e-10:
            raise ValueError("halfspaces do not bound a full-dimensional polytope")
        hs = HalfspaceIntersection(np.hstack([a, -b[:, None]]), res.x[:d])
        verts = np.unique(np.round(hs.intersections, 12), axis=0)
        return Polytope.from_vertices(verts)

    @staticmethod
    def from_polygon(vertices) -> "Polytope":
        """2-d polytope from counter-clockwise ordered vertices (fast path
        for plane sections, no hull computation)."""
        v = np.asarray(vertices, dtype=float)
        nv = v.shape[0]
        edges = v[(np.arange(nv) + 1) % nv] - v
        if _polygon_area(v) < 0:
            v = v[::-1]
            edges = v[(np.arange(nv) + 1) % nv] - v
        lens = np.linalg.norm(edges, axis=1)
        normals = np.column_stack([edges[:, 1], -edges[:, 0]]) / lens[:, None]
        offsets = np.einsum("ij,ij->i", normals, v)
        return Polytope(v, normals, offsets)

    @staticmethod
    def box(lo, hi) -> "Polytope":
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        d = lo.size
        corners = np.array([[lo[i] if (m >> i) & 1 == 0 else hi[i] for i in range(d)]
                            for m in range(2 ** d)])
        return Polytope.from_vertices(corners)

    def circumsphere(self):
        c = self.vertices.mean(axis=0)
        return c, float(np.max(np.linalg.norm(self.vertices - c, axis=1)))

    def contains(self, x, tol=1e-9) -> bool:
        return bool(np.all(self.normals @ np.asarray(x) <= self.offsets + tol))


ConvexBody = Ball | Ellipsoid | Polytope


def _polygon_area(v: np.ndarray) -> float:
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


# -- sections ------------------------------------------------------------


def section(body: ConvexBody, flat) -> ConvexBody | None:
    """Intersection with a flat, expressed in the flat's own orthonormal
    coordinates (dimension = subdim).  Returns None if the intersection
    is empty; raises DegenerateSectionError within tolerance of tangency
    for smooth bodies."""
    flat = as_affine(flat)
    if flat.subdim < 1:
        raise ValueError("flat must be at least 1-dimensional")
    if flat.dim != body.dim:
        raise ValueError("ambient dimension mismatch")
    if flat.subdim == body.dim:
        return _rebase_full(body, flat)
    if isinstance(body, Ball):
        return _section_ball(body, flat)
    if isinstance(body, Ellipsoid):
        return _section_ellipsoid(body, flat)
    return _section_polytope(body, flat)


def _rebase_full(body, flat: AffineFlat):
    v, q = flat.base.frame, flat.offset
    if isinstance(body, Ball):
        return Ball(v @ (body.center - q), body.radius)
    if isinstance(body, Ellipsoid):
        return Ellipsoid(v @ (body.center - q), body.semiaxes,
                         v @ body.orientation)
    return Polytope((body.vertices - q) @ v.T, body.normals @ v.T,
                    body.offsets - body.normals @ q)


def _section_ball(body: Ball, flat: AffineFlat):
    v, q = flat.base.frame, flat.offset
    delta = body.center - q
    c_loc = v @ delta
    dist_sq = float(delta @ delta - c_loc @ c_loc)
    dist = np.sqrt(max(dist_sq, 0.0))
    if abs(dist - body.radius) < TANGENT_TOL:
        raise DegenerateSectionError("flat is tangent to the ball")
    if dist > body.radius:
        return None
    return Ball(c_loc, float(np.sqrt(body.radius ** 2 - dist ** 2)))


def _section_ellipsoid(body: Ellipsoid, flat: AffineFlat):
    v, q = flat.base.frame, flat.offset
    m = body.quadratic_matrix()
    delta = q - body.center
    a2 = v @ m @ v.T
    rhs = v @ (m @ delta)
    t0 = np.linalg.solve(a2, -rhs)
    level = 1.0 - float(delta @ m @ delta + rhs @ t0)
    if abs(level) < TANGENT_TOL:
        raise DegenerateSectionError("flat is tangent to the ellipsoid")
    if level < 0:
        return None
    evals, evecs = np.linalg.eigh(a2)
    semi = np.sqrt(level / evals)
    if flat.subdim == 1:
        return Ball(t0, float(semi[0]))
    return Ellipsoid(t0, semi, evecs)


def _section_polytope(body: Polytope, flat: AffineFlat):
    v, q = flat.base.frame, flat.offset
    a_loc = body.normals @ v.T
    b_loc = body.offsets - body.normals @ q
    if flat.subdim == 1:
        lo, hi = -np.inf, np.inf
        for ai, bi in zip(a_loc[:, 0], b_loc):
            if abs(ai) < 1e-14:
                if bi < -1e-12:
                    return None
                continue
            t = bi / ai
            if ai > 0:
                hi = min(hi, t)
            else:
                lo = max(lo, t)
        if not np.isfinite(lo) or not np.isfinite(hi) or hi - lo <= 1e-12:
            return None
        return Polytope(np.array([[lo], [hi]]),
                        np.array([[1.0], [-1.0]]), np.array([hi, -lo]))
    if flat.subdim == 2:
        center, radius = body.circumsphere()
        r0 = float(np.linalg.norm(center - q)) + radius + 1.0
        poly = [(-r0, -r0), (r0, -r0), (r0, r0), (-r0, r0)]
        for (a0, a1), bi in zip(a_loc.tolist(), b_loc.tolist()):
            poly = _clip_halfplane(poly, a0, a1, bi)
            if len(poly) < 3:
                return None
        verts = np.array(poly)
        if abs(_polygon_area(verts)) <= 1e-12:
            return None
        return Polytope.from_polygon(verts)
    raise NotImplementedError("polytope sections supported for subdim <= 2")


def _clip_halfplane(poly, a0, a1, b):
    """Sutherland-Hodgman step keeping a0*x + a1*y <= b (scalar math:
    this sits in the Monte Carlo hot path)."""
    out = []
    n = len(poly)
    prev = poly[-1]
    fprev = a0 * prev[0] + a1 * prev[1] - b
    for i in range(n):
        cur = poly[i]
        fcur = a0 * cur[0] + a1 * cur[1] - b
        if fprev <= 0.0:
            out.append(prev)
            if fcur > 0.0:
                t = fprev / (fprev - fcur)
                out.append((prev[0] + t * (cur[0] - prev[0]),
                            prev[1] + t * (cur[1] - prev[1])))
        elif fcur <= 0.0:
            t = fprev / (fprev - fcur)
            out.append((prev[0] + t * (cur[0] - prev[0]),
                        prev[1] + t * (cur[1] - prev[1])))
        prev, fprev = cur, fcur
    return out


# -- boundary cubature ----------------------------------------------------


@dataclass(frozen=True, eq=False)
class SupportSample:
    """One boundary cubature node with curvature data."""
    x: np.ndarray
    n: np.ndarray
    kappas: np.ndarray
    dirs: np.ndarray
    weight: float


@dataclass(frozen=True, eq=False)
class BoundaryCubature:
    """Array-of-struct boundary rule: sum(weight * f(x, n, kappas, dirs))
    approximates the boundary integral of f (against surface measure)."""
    x: np.ndarray        # (M, d)
    n: np.ndarray        # (M, d)
    kappas: np.ndarray   # (M, d-1)
    dirs: np.ndarray     # (M, d-1, d)
    weight: np.ndarray   # (M,)

    def __len__(self):
        return self.weight.size

    def __iter__(self):
        for i in range(len(self)):
            yield SupportSample(self.x[i], self.n[i], self.kappas[i],
                                self.dirs[i], float(self.weight[i]))


def sphere_quadrature(d: int, order: int):
    """Quadrature (points, weights) for integrals over the unit sphere
    S^{d-1}: trapezoid in the circle direction, Gauss-Jacobi in each polar
    angle.  Exact for spherical polynomials of degree < order."""
    if d < 1:
        raise ValueError("d >= 1 required")
    if d == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if d == 2:
        n = max(4, 2 * order)
        ang = 2 * np.pi * (np.arange(n) + 0.5) / n
        pts = np.column_stack([np.cos(ang), np.sin(ang)])
        return pts, np.full(n, 2 * np.pi / n)
    t, wt = roots_jacobi(order, (d - 3) / 2.0, (d - 3) / 2.0)
    sub_pts, sub_w = sphere_quadrature(d - 1, order)
    s = np.sqrt(1.0 - t ** 2)
    pts = np.concatenate([sub_pts[None, :, :] * s[:, None, None],
                          np.broadcast_to(t[:, None, None],
                                          (t.size, sub_pts.shape[0], 1))],
                         axis=2).reshape(-1, d)
    w = (wt[:, None] * sub_w[None, :]).ravel()
    return pts, w


def _tangent_frames(n: np.ndarray) -> np.ndarray:
    """Orthonormal tangent frames completing unit normals n (M, d);
    returns (M, d-1, d) via Householder reflections mapping e_d -> n."""
    m, d = n.shape
    out = np.empty((m, d - 1, d))
    e_last = np.zeros(d)
    e_last[-1] = 1.0
    for i in range(m):
        v = e_last - n[i]
        nv = np.linalg.norm(v)
        if nv < 1e-12:
            out[i] = np.eye(d)[:d - 1]
            continue
        v = v / nv
        h = np.eye(d) - 2.0 * np.outer(v, v)  # maps e_d to n[i]
        out[i] = h[:, :d - 1].T
    return out


def boundary_cubature(body: ConvexBody, order: int) -> BoundaryCubature:
    """Boundary rule with exact normals and principal curvatures.  Only
    smooth bodies carry one; polytopes are handled through their faces."""
    if isinstance(body, Ball):
        return _ball_cubature(body, order)
    if isinstance(body, Ellipsoid):
        return _ellipsoid_cubature(body, order)
    raise TypeError("boundary cubature is defined for smooth bodies only")


def _ball_cubature(body: Ball, order: int) -> BoundaryCubature:
    d, rho = body.dim, body.radius
    u, w = sphere_quadrature(d, order)
    x = body.center[None, :] + rho * u
    kappas = np.full((u.shape[0], d - 1), 1.0 / rho)
    dirs = _tangent_frames(u)
    return BoundaryCubature(x, u, kappas, dirs, w * rho ** (d - 1))


def _ellipsoid_cubature(body: Ellipsoid, order: int) -> BoundaryCubature:
    d = body.dim
    a = body.semiaxes
    rot = body.orientation
    u, w = sphere_quadrature(d, order)
    m = u / a[None, :]                      # D^{-1} u, axis frame
    m_norm = np.linalg.norm(m, axis=1)
    n0 = m / m_norm[:, None]
    x = body.center[None, :] + (a[None, :] * u) @ rot.T
    n = n0 @ rot.T
    weight = np.prod(a) * m_norm * w
    if d == 1:
        return BoundaryCubature(x, n, np.zeros((u.shape[0], 0)),
                                np.zeros((u.shape[0], 0, 1)), weight)
    # shape operator P B P / |m| in the axis frame
    b_diag = 1.0 / a ** 2
    proj = np.eye(d)[None, :, :] - n0[:, :, None] * n0[:, None, :]
    w_op = np.einsum("mij,j,mjk->mik", proj, b_diag, proj) / m_norm[:, None, None]
    evals, evecs = np.linalg.eigh(w_op)
    kappas = evals[:, 1:]
    dirs = np.einsum("ij,mjk->mki", rot, evecs[:, :, 1:])
    return BoundaryCubature(x, n, kappas, dirs, weight)


# -- polytope face lattice -------------------------------------------------


@dataclass(frozen=True, eq=False)
class FaceData:
    """A k-face: spanning vertices plus its normal-cone description
    (facet: one normal; edge: the two adjacent facet normals; vertex:
    the incident facet normals ordered around the cone)."""
    k: int
    vertices: np.ndarray
    cone_normals: np.ndarray


def _order_cycle(points: np.ndarray, axis: np.ndarray, origin) -> np.ndarray:
    """Indices ordering points by angle about an axis through origin."""
    ref = np.zeros(3)
    ref[np.argmin(np.abs(axis))] = 1.0
    u = np.cross(axis, ref)
    u /= np.linalg.norm(u)
    v = np.cross(axis, u)
    rel = points - origin
    return np.argsort(np.arctan2(rel @ v, rel @ u))


def polytope_faces(body: Polytope) -> list[FaceData]:
    """Full face lattice up to dimension d-1 with normal-cone data,
    for ambient dimension 2 or 3."""
    d = body.dim
    if d == 2:
        return _polygon_faces(body)
    if d != 3:
        raise NotImplementedError("face lattice implemented for d in {2, 3}")
    v, a, b = body.vertices, body.normals, body.offsets
    tight = v @ a.T - b[None, :] > -1e-9 * max(1.0, float(np.max(np.abs(v))))
    faces: list[FaceData] = []
    facet_vertex_ids = []
    for f in range(a.shape[0]):
        ids = np.nonzero(tight[:, f])[0]
        if ids.size < 3:
            raise ValueError("facet supported by fewer than 3 vertices")
        order = _order_cycle(v[ids], a[f], v[ids].mean(axis=0))
        ids = ids[order]
        facet_vertex_ids.append(ids)
        faces.append(FaceData(2, v[ids], a[f][None, :]))
    # edges: consecutive vertex pairs along each facet boundary
    edge_facets: dict[tuple[int, int], list[int]] = {}
    for f, ids in enumerate(facet_vertex_ids):
        for i in range(ids.size):
            key = tuple(sorted((ids[i], ids[(i + 1) % ids.size])))
            edge_facets.setdefault(key, []).append(f)
    for (i, j), fs in sorted(edge_facets.items()):
        if len(fs) != 2:
            raise ValueError("non-manifold edge in polytope")
        faces.append(FaceData(1, v[[i, j]], a[list(fs)]))
    # vertices: incident facet normals ordered around the normal cone
    for i in range(v.shape[0]):
        fs = np.nonzero(tight[i])[0]
        if fs.size < 3:
            raise ValueError("vertex incident to fewer than 3 facets")
        axis = a[fs].mean(axis=0)
        axis /= np.linalg.norm(axis)
        order = _order_cycle(a[fs], axis, np.zeros(3))
        faces.append(FaceData(0, v[i][None, :], a[fs[order]]))
    return faces


def _polygon_faces(body: Polytope) -> list[FaceData]:
    v = body.vertices
    centroid = v.mean(axis=0)
    order = np.argsort(np.arctan2(*(v - centroid).T[::-1]))
    v = v[order]
    nv = v.shape[0]
    if _polygon_area(v) < 0:
        v = v[::-1]
    edges = np.roll(v, -1, axis=0) - v
    lens = np.linalg.norm(edges, axis=1)
    normals = np.column_stack([edges[:, 1], -edges[:, 0]]) / lens[:, None]
    faces = [FaceData(1, v[[i, (i + 1) % nv]], normals[i][None, :])
             for i in range(nv)]
    for i in range(nv):
        faces.append(FaceData(0, v[i][None, :],
                              normals[[(i - 1) % nv, i]]))
    return faces


# -- rotational validity ---------------------------------------------------


def origin_boundary_distance(body: ConvexBody) -> float:
    """Distance from the origin to the boundary of the body."""
    if isinstance(body, Ball):
        return abs(float(np.linalg.norm(body.center)) - body.radius)
    if isinstance(body, Ellipsoid):
        g = float(body.center @ body.quadratic_matrix() @ body.center)
        return abs(np.sqrt(g) - 1.0) * float(np.min(body.semiaxes))
    return _polytope_origin_distance(body)


def _polytope_origin_distance(body: Polytope) -> float:
    b = body.offsets
    if np.all(b >= 0):
        return float(np.min(b))  # interior (or on boundary): facet planes
    v = body.vertices
    best = float(np.min(np.linalg.norm(v, axis=1)))
    d = body.dim
    if d >= 2:
        for face in polytope_faces(body):
            if face.k == 1:
                p, q = face.vertices
                e = q - p
                t = np.clip(-(p @ e) / (e @ e), 0.0, 1.0)
                best = min(best, float(np.linalg.norm(p + t * e)))
            elif face.k == 2:
                n = face.cone_normals[0]
                off = n @ face.vertices[0]
                foot = off * n
                if body.contains(foot, tol=1e-9):
                    best = min(best, abs(off))
    return best


def validate_rotational(body: ConvexBody) -> None:
    """Raise OriginOnBoundaryError unless the origin keeps a positive
    distance from the boundary (convexity settles the section-regularity
    condition for almost all subspaces)."""
    if origin_boundary_distance(body) <= TANGENT_TOL:
        raise OriginOnBoundaryError(
            "origin lies on the boundary (within 1e-9); the rotational "
            "section average diverges for such bodies, e.g. any polytope "
            "with a vertex at the origin")


# -- JSON ------------------------------------------------------------------


def body_to_dict(body: ConvexBody) -> dict:
    if isinstance(body, Ball):
        return {"type": "ball", "center": body.center.tolist(),
                "radius": body.radius}
    if isinstance(body, Ellipsoid):
        return {"type": "ellipsoid", "center": body.center.tolist(),
                "semiaxes": body.semiaxes.tolist(),
                "orientation": body.orientation.tolist()}
    return {"type": "polytope", "vertices": body.vertices.tolist()}


def body_from_dict(obj: dict) -> ConvexBody:
    kind = obj["type"]
    if kind == "ball":
        return Ball(np.asarray(obj["center"], dtype=float), float(obj["radius"]))
    if kind == "ellipsoid":
        center = np.asarray(obj["center"], dtype=float)
        orient = np.asarray(obj["orientation"], dtype=float) \
            if "orientation" in obj else np.eye(center.size)
        return Ellipsoid(center, np.asarray(obj["semiaxes"], dtype=float), orient)
    if kind == "polytope":
        if "vertices" in obj:
            return Polytope.from_vertices(np.asarray(obj["vertices"], dtype=float))
        hs = obj["halfspaces"]
        return Polytope.from_halfspaces(np.asarray(hs["A"], dtype=float),
                                        np.asarray(hs["b"], dtype=float))
    raise ValueError(f"unknown body type {kind!r}")
