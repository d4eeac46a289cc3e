"""Monte Carlo left-hand sides of the Crofton formulas.

estimate_rot_lhs averages a sectional functional over Haar-random
subspaces through the origin; estimate_aff_lhs over motion-invariant
affine flats hitting the body (importance sampling against an enclosing
offset ball).  verify() pairs each estimator with the matching
closed-form evaluator and reports per-coordinate agreement.

Sample i always draws from the counter-based stream (seed, i), and
chunk boundaries are fixed by the configuration, so results are
bit-identical regardless of worker count or execution order.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import rhs as rhs_mod
from . import symtensor as st
from .bodies import ConvexBody, DegenerateSectionError, section, \
    validate_rotational
from .flats import as_affine, rng_for_sample, sample_affine_hitting, \
    sample_linear
from .minkowski import lambda_samples, phi_relative_coeffs
from .specfun import grassmann_total, sphere_area
from .symtensor import SymTensor


class CapabilityError(RuntimeError):
    """The requested (body, theorem) combination is not supported."""


# -- functional specifications ----------------------------------------------


@dataclass(frozen=True)
class TensorFunctional:
    """Sectional Minkowski tensor of index k integrating x^r n^s
    (harmonic=True replaces n^s by the ambient harmonic basis tensor)."""
    k: int
    r: int = 0
    s: int = 0
    harmonic: bool = False

    def rank(self) -> int:
        return self.r + self.s


@dataclass(frozen=True)
class PsiFunctional:
    """Scalar sectional valuation with weight psi from the registry."""
    psi: str
    k: int

    def rank(self) -> int:
        return 0


def evaluate_functional(sec, flat, func, d: int, order: int) -> np.ndarray:
    """Value (flat coefficient array) of the sectional functional on one
    section; the empty section gives zero."""
    size = st.num_coeffs(d, func.rank()) if isinstance(func, TensorFunctional) \
        else 1
    if sec is None:
        return np.zeros(size)
    if isinstance(func, TensorFunctional):
        return phi_relative_coeffs(sec, func.k, func.r, func.s, flat,
                                   order=order, ambient=True,
                                   harmonic=func.harmonic)
    psi = rhs_mod.PSI_REGISTRY[func.psi]
    x_loc, n_loc, w = lambda_samples(sec, func.k, order)
    aff = as_affine(flat)
    x_amb = aff.offset[None, :] + x_loc @ aff.base.frame
    n_amb = n_loc @ aff.base.frame
    vals = np.array([psi(aff, x_amb[i], n_amb[i])
                     for i in range(x_amb.shape[0])])
    return np.array([float(w @ vals) / sphere_area(sec.dim - func.k)])


# -- estimator configuration and results -------------------------------------


@dataclass(frozen=True)
class EstimatorConfig:
    n_samples: int = 20_000
    seed: int = 0
    section_order: int = 32
    ci_mult: float = 3.0
    atol: float = 1e-4
    rel_tol: float | None = None
    rel_floor: float = 1e-3
    chunk_size: int = 8192
    workers: int | None = None  # None: CROFTON_WORKERS environment or 1

    def __post_init__(self):
        if self.n_samples < 100:
            raise ValueError("need at least 100 samples")


@dataclass
class Estimate:
    value: np.ndarray
    se: np.ndarray
    n: int
    dim: int
    rank: int
    n_empty: int = 0
    n_degenerate: int = 0

    def tensor(self) -> SymTensor:
        return SymTensor(self.dim, self.rank, self.value)


def _resolve_workers(cfg: EstimatorConfig) -> int:
    if cfg.workers is not None:
        return max(1, cfg.workers)
    return max(1, int(os.environ.get("CROFTON_WORKERS", "1")))


def _one_sample(mode, body, j, func, cfg, i, c_dj):
    """(value, is_empty, is_degenerate) for Monte Carlo sample i."""
    d = body.dim
    rng = rng_for_sample(cfg.seed, i)
    if mode == "rot":
        flat = as_affine(sample_linear(d, j, rng))
        factor = c_dj
    else:
        flat, factor = sample_affine_hitting(body, j, rng)
    degen = False
    try:
        sec = section(body, flat)
    except DegenerateSectionError:
        sec = None
        degen = True
    val = factor * evaluate_functional(sec, flat, func, d, cfg.section_order)
    return val, sec is None, degen


def _run_chunk(args):
    mode, body, j, func, cfg, i0, i1 = args
    d = body.dim
    size = st.num_coeffs(d, func.rank()) if isinstance(func, TensorFunctional) \
        else 1
    total = np.zeros(size)
    total_sq = np.zeros(size)
    n_empty = 0
    n_degen = 0
    c_dj = grassmann_total(d, j)
    for i in range(i0, i1):
        val, empty, degen = _one_sample(mode, body, j, func, cfg, i, c_dj)
        n_empty += empty
        n_degen += degen
        total += val
        total_sq += val * val
    return total, total_sq, n_empty, n_degen


def per_sample_values(mode: str, body: ConvexBody, j: int, func,
                      cfg: EstimatorConfig) -> np.ndarray:
    """All weighted per-sample functional values (n_samples, n_coeffs);
    row i reproduces exactly what the estimator averaged for sample i."""
    d = body.dim
    size = st.num_coeffs(d, func.rank()) if isinstance(func, TensorFunctional) \
        else 1
    c_dj = grassmann_total(d, j)
    out = np.empty((cfg.n_samples, size))
    for i in range(cfg.n_samples):
        out[i] = _one_sample(mode, body, j, func, cfg, i, c_dj)[0]
    return out


def _estimate(mode: str, body: ConvexBody, j: int, func, cfg: EstimatorConfig
              ) -> Estimate:
    d = body.dim
    rank = func.rank()
    n = cfg.n_samples
    chunks = [(mode, body, j, func, cfg, i0, min(i0 + cfg.chunk_size, n))
              for i0 in range(0, n, cfg.chunk_size)]
    workers = _resolve_workers(cfg)
    if workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_chunk, chunks))
    else:
        results = [_run_chunk(c) for c in chunks]
    size = st.num_coeffs(d, rank) if isinstance(func, TensorFunctional) else 1
    total = np.zeros(size)
    total_sq = np.zeros(size)
    n_empty = 0
    n_degen = 0
    for t, tsq, ne, nd in results:
        total = total + t
        total_sq = total_sq + tsq
        n_empty += ne
        n_degen += nd
    mean = total / n
    var = np.maximum(total_sq / n - mean * mean, 0.0) * (n / (n - 1.0))
    return Estimate(mean, np.sqrt(var / n), n, d, rank, n_empty, n_degen)


def estimate_rot_lhs(body: ConvexBody, j: int, func,
                     cfg: EstimatorConfig) -> Estimate:
    """Mean of c_{d,j} * functional(body cap L) over Haar-random
    j-subspaces L through the origin."""
    validate_rotational(body)
    if not 1 <= j <= body.dim - 1:
        raise ValueError("need 1 <= j <= d - 1")
    return _estimate("rot", body, j, func, cfg)


def estimate_aff_lhs(body: ConvexBody, j: int, func,
                     cfg: EstimatorConfig) -> Estimate:
    """Importance-sampled mean of weight * functional(body cap E) over
    affine j-flats; flats missing the body contribute zero."""
    if not 1 <= j <= body.dim - 1:
        raise ValueError("need 1 <= j <= d - 1")
    return _estimate("aff", body, j, func, cfg)


# -- verification -------------------------------------------------------------


ROTATIONAL_THEOREMS = ("rot-surface", "rot-lines", "rot-hyper", "rot-general")
AFFINE_THEOREMS = ("aff-minkowski", "aff-harmonic", "aff-psi", "aff-general")


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    theorem: str
    j: int
    k: int | None = None
    r: int = 0
    s: int = 0
    psi: str | None = None
    n_samples: int | None = None  # default: 2e4 scalar, 1e5 for rank >= 2
    seed: int = 0
    cubature_order: int = 64
    section_order: int = 32
    inner_samples: int = 64
    ci_mult: float = 3.0
    atol: float = 1e-4
    rel_tol: float | None = None
    rel_floor: float = 1e-3
    workers: int | None = None

    def config(self, rank: int = 0) -> EstimatorConfig:
        n = self.n_samples
        if n is None:
            n = 100_000 if rank >= 2 else 20_000
        return EstimatorConfig(n_samples=n, seed=self.seed,
                               section_order=self.section_order,
                               ci_mult=self.ci_mult, atol=self.atol,
                               rel_tol=self.rel_tol, rel_floor=self.rel_floor,
                               workers=self.workers)


@dataclass
class VerificationReport:
    name: str
    theorem: str
    params: dict
    n_samples: int
    coeff_labels: list[str]
    lhs: list[float]
    se: list[float]
    rhs: list[float]
    rhs_se: list[float]
    z_scores: list[float]
    passed: bool
    n_empty: int
    n_degenerate: int
    runtime: float = field(default=0.0, compare=False)

    def to_payload(self) -> dict:
        """Deterministic JSON payload (no timings)."""
        return {
            "schema": "crofton-report/1",
            "experiment": self.name,
            "theorem": self.theorem,
            "params": self.params,
            "n_samples": self.n_samples,
            "coeff_labels": self.coeff_labels,
            "lhs": self.lhs,
            "se": self.se,
            "rhs": self.rhs,
            "rhs_se": self.rhs_se,
            "z_scores": self.z_scores,
            "pass": self.passed,
            "n_empty": self.n_empty,
            "n_degenerate": self.n_degenerate,
        }

    @property
    def z_max(self) -> float:
        return max(self.z_scores) if self.z_scores else 0.0


def _rhs_for(body: ConvexBody, spec: ExperimentSpec):
    """Closed-form side and the matching LHS functional for a theorem
    route; raises CapabilityError for unsupported combinations."""
    d = body.dim
    j, r, s = spec.j, spec.r, spec.s
    try:
        if spec.theorem == "rot-surface":
            func = TensorFunctional(j - 1, r, s)
            t = rhs_mod.rot_rhs_surface(body, j, r, s, spec.cubature_order)
            return func, t.coeffs, np.zeros_like(t.coeffs), t.rank
        if spec.theorem == "rot-lines":
            if j != 1:
                raise CapabilityError("line route requires j = 1")
            func = TensorFunctional(0, r, s)
            t = rhs_mod.rot_rhs_lines(body, r, s, spec.cubature_order)
            return func, t.coeffs, np.zeros_like(t.coeffs), t.rank
        if spec.theorem == "rot-hyper":
            if j != d - 1:
                raise CapabilityError("hyperplane route requires j = d - 1")
            k = spec.k if spec.k is not None else 0
            func = TensorFunctional(k, r, s)
            t = rhs_mod.rot_rhs_hyperplanes(body, k, r, s, spec.cubature_order)
            return func, t.coeffs, np.zeros_like(t.coeffs), t.rank
        if spec.theorem == "rot-general":
            k = spec.k if spec.k is not None else j - 1
            func = PsiFunctional(spec.psi or "one", k)
            val, se = rhs_mod.rot_rhs_general(
                body, rhs_mod.PSI_REGISTRY[func.psi], j, k,
                order=max(16, spec.cubature_order // 2),
                inner_samples=spec.inner_samples, seed=spec.seed + 1)
            return func, np.array([val]), np.array([se]), 0
        if spec.theorem == "aff-minkowski":
            k = spec.k if spec.k is not None else j - 1
            func = TensorFunctional(k, r, s)
            t = rhs_mod.aff_rhs_minkowski(body, j, k, r, s, spec.cubature_order)
            return func, t.coeffs, np.zeros_like(t.coeffs), t.rank
        if spec.theorem == "aff-harmonic":
            func = TensorFunctional(j - 1, r, s, harmonic=True)
            t = rhs_mod.aff_rhs_harmonic(body, j, r, s, spec.cubature_order)
            return func, t.coeffs, np.zeros_like(t.coeffs), t.rank
        if spec.theorem == "aff-psi":
            k = spec.k if spec.k is not None else j - 1
            func = PsiFunctional(spec.psi or "one", k)
            val = rhs_mod.aff_rhs_psi_xn(body, rhs_mod.PSI_REGISTRY[func.psi],
                                         j, k, order=spec.cubature_order // 2,
                                         radial_nodes=24, sphere_order=24)
            return func, np.array([val]), np.array([0.0]), 0
        if spec.theorem == "aff-general":
            k = spec.k if spec.k is not None else j - 1
            func = PsiFunctional(spec.psi or "one", k)
            val, se = rhs_mod.aff_rhs_general(
                body, rhs_mod.PSI_REGISTRY[func.psi], j, k,
                order=max(16, spec.cubature_order // 2),
                inner_samples=spec.inner_samples, seed=spec.seed + 1)
            return func, np.array([val]), np.array([se]), 0
    except (TypeError, NotImplementedError) as exc:
        raise CapabilityError(str(exc)) from exc
    raise CapabilityError(f"unknown theorem route {spec.theorem!r}")


def verify(body: ConvexBody, spec: ExperimentSpec) -> VerificationReport:
    """Run one LHS-estimate-vs-closed-form experiment.

    Pass criterion per coordinate: |lhs - rhs| <= max(ci_mult * se, atol)
    with the combined Monte Carlo error of both sides, plus an optional
    relative-error bound on coordinates with |rhs| > rel_floor.
    """
    start = time.perf_counter()
    func, rhs_coeffs, rhs_se, rank = _rhs_for(body, spec)
    cfg = spec.config(rank)
    if spec.theorem in ROTATIONAL_THEOREMS:
        est = estimate_rot_lhs(body, spec.j, func, cfg)
    else:
        est = estimate_aff_lhs(body, spec.j, func, cfg)
    comb_se = np.sqrt(est.se ** 2 + rhs_se ** 2)
    diff = np.abs(est.value - rhs_coeffs)
    allowed = np.maximum(spec.ci_mult * comb_se, spec.atol)
    ok = diff <= allowed
    if spec.rel_tol is not None:
        # relative bound on significant coordinates, never tighter than
        # the statistical resolution of the estimate itself
        big = np.abs(rhs_coeffs) > spec.rel_floor
        rel_allowed = np.maximum(spec.rel_tol * np.abs(rhs_coeffs),
                                 spec.ci_mult * comb_se)
        ok &= np.where(big, diff <= rel_allowed, True)
    z = diff / np.maximum(comb_se, 1e-300)
    labels = [",".join(map(str, m))
              for m in st.multi_indices(body.dim, rank)] if rank else ["value"]
    report = VerificationReport(
        name=spec.name, theorem=spec.theorem,
        params={"j": spec.j, "k": spec.k, "r": spec.r, "s": spec.s,
                "psi": spec.psi, "seed": spec.seed,
                "cubature_order": spec.cubature_order},
        n_samples=cfg.n_samples, coeff_labels=labels,
        lhs=[float(v) for v in est.value], se=[float(v) for v in est.se],
        rhs=[float(v) for v in rhs_coeffs], rhs_se=[float(v) for v in rhs_se],
        z_scores=[float(v) for v in z], passed=bool(np.all(ok)),
        n_empty=est.n_empty, n_degenerate=est.n_degenerate)
    report.runtime = time.perf_counter() - start
    return report
