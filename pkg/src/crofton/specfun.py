"""Special functions and constant families for the Crofton formulas.

Everything Gamma-valued goes through log-Gamma so that dimensions and
tensor degrees up to ~40 stay in range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import eval_gegenbauer, gammaln, gammasgn, hyp2f1

SQRT_PI = math.sqrt(math.pi)

MAX_SERIES_TERMS = 10_000
SERIES_REL_EPS = 1e-16


def _gamma_ratio(num: list[float], den: list[float]) -> float:
    """prod Gamma(num) / prod Gamma(den) via log-Gamma, with signs."""
    logs = sum(gammaln(a) for a in num) - sum(gammaln(b) for b in den)
    sign = math.prod(gammasgn(a) for a in num) * math.prod(gammasgn(b) for b in den)
    return sign * math.exp(logs)


def sphere_area(k: int) -> float:
    """Surface area of the unit sphere S^{k-1} in R^k."""
    if k <= 0:
        raise ValueError("sphere_area requires k >= 1")
    return 2.0 * math.pi ** (k / 2.0) / math.gamma(k / 2.0)


def ball_volume(k: int) -> float:
    """Volume of the unit ball in R^k (k = 0 gives 1)."""
    if k < 0:
        raise ValueError("negative dimension")
    return math.pi ** (k / 2.0) / math.gamma(k / 2.0 + 1.0)


def grassmann_total(d: int, j: int) -> float:
    """Total rotation-invariant measure of the manifold of j-dimensional
    linear subspaces of R^d; equals 1 for j = 0 by convention."""
    if not 0 <= j <= d:
        raise ValueError(f"need 0 <= j <= d, got j={j}, d={d}")
    out = 1.0
    for i in range(j):
        out *= sphere_area(d - i) / sphere_area(j - i)
    return out


def pochhammer(a: float, n: int) -> float:
    if n < 0:
        raise ValueError("pochhammer needs n >= 0")
    out = 1.0
    for i in range(n):
        out *= a + i
    return out


@dataclass(frozen=True)
class HypParams:
    """Parameters of a generalized hypergeometric series pFq."""
    upper: tuple[float, ...]
    lower: tuple[float, ...]

    def __init__(self, upper, lower):
        object.__setattr__(self, "upper", tuple(float(a) for a in upper))
        object.__setattr__(self, "lower", tuple(float(b) for b in lower))


def _is_nonpos_int(x: float) -> bool:
    return x <= 0.0 and x == round(x)


def _termination_index(params: HypParams) -> int | None:
    """Number of the last series term under the terminating convention.

    If some lower parameter is a non-positive integer, an upper parameter
    a with 0 >= a >= b_max must exist and the series is cut at n = -a for
    the largest such a (the value is unchanged by which admissible a is
    chosen, since earlier upper parameters annihilate the extra terms).
    Without problematic lower parameters, a non-positive integer upper
    parameter terminates the series naturally.
    """
    bad_lower = [b for b in params.lower if _is_nonpos_int(b)]
    if bad_lower:
        b_max = max(bad_lower)
        candidates = [a for a in params.upper if _is_nonpos_int(a) and a >= b_max]
        if not candidates:
            raise ValueError(
                "undefined hypergeometric parameters: non-positive integer "
                f"lower parameter {b_max} with no admissible terminating "
                "upper parameter")
        return int(-max(candidates))
    neg_upper = [a for a in params.upper if _is_nonpos_int(a)]
    if neg_upper:
        return int(-max(neg_upper))
    return None


def hyp_pfq(params: HypParams, z: float) -> float:
    """Generalized hypergeometric series with p = q + 1.

    Terminating cases are summed exactly (see _termination_index, which
    also covers the non-standard convention where an upper parameter
    equals a lower one).  Non-terminating series require |z| < 1, except
    that a 2F1 at z = 1 is routed through Gauss's evaluation.
    """
    if len(params.upper) != len(params.lower) + 1:
        raise ValueError("only p = q + 1 is supported")
    n_max = _termination_index(params)
    if n_max is not None:
        term = 1.0
        total = 1.0 if n_max >= 0 else 0.0
        for n in range(n_max):
            num = math.prod(a + n for a in params.upper)
            den = math.prod(b + n for b in params.lower)
            term *= num / den * z / (n + 1)
            total += term
        return total
    if abs(z) > 1.0:
        raise ValueError("non-terminating series diverges for |z| > 1")
    if z == 1.0:
        if len(params.upper) == 2:
            return gauss_at_one(params.upper[0], params.upper[1], params.lower[0])
        if sum(params.upper) - sum(params.lower) >= 0:
            raise ValueError("series does not converge at z = 1")
    term = 1.0
    total = 1.0
    small = 0
    for n in range(MAX_SERIES_TERMS):
        num = math.prod(a + n for a in params.upper)
        den = math.prod(b + n for b in params.lower)
        term *= num / den * z / (n + 1)
        total += term
        if abs(term) < SERIES_REL_EPS * abs(total):
            small += 1
            if small >= 3:
                return total
        else:
            small = 0
    raise ValueError("hypergeometric series did not converge "
                     f"within {MAX_SERIES_TERMS} terms")


def gauss_at_one(a: float, b: float, c: float) -> float:
    """Gauss's evaluation of 2F1 at z = 1, valid for c > a + b."""
    if c <= a + b:
        raise ValueError(f"need c > a + b, got a={a}, b={b}, c={c}")
    if _is_nonpos_int(c - a) or _is_nonpos_int(c - b):
        return 0.0
    return _gamma_ratio([c, c - a - b], [c - a, c - b])


def f_integral(d: int, j: int, s: int, l: int, b: int, m):
    """The weight function F_{d,j,s,l,b} of the rotational surface-tensor
    formula, evaluated at m = alpha^2 in [0, 1] (vectorized in m).

    Closed form: a Gamma-factor times 2F1((s-1)/2, (d-j+2l)/2;
    (d-1+2b+4l)/2; m), with the m = 1 value taken as the limit when it
    exists.
    """
    if not (1 < j < d):
        raise ValueError("need 1 < j < d")
    if s < 0 or l < 0 or b < 0:
        raise ValueError("s, l, b must be non-negative")
    m_arr = np.asarray(m, dtype=float)
    if np.any((m_arr < 0) | (m_arr > 1)):
        raise ValueError("m must lie in [0, 1]")
    pref = sphere_area(d - 1 + 2 * b + 4 * l) / (
        sphere_area(j - 1 + 2 * b + 2 * l) * sphere_area(d - j + 2 * l))
    a_h = (s - 1) / 2.0
    b_h = (d - j + 2 * l) / 2.0
    c_h = (d - 1 + 2 * b + 4 * l) / 2.0
    at_one = m_arr == 1.0
    out = np.empty_like(m_arr)
    if np.any(~at_one):
        out[~at_one] = hyp2f1(a_h, b_h, c_h, m_arr[~at_one])
    if np.any(at_one):
        out[at_one] = gauss_at_one(a_h, b_h, c_h)
    out = pref * out
    return out if out.shape else float(out)


def f_integral_quadrature(d: int, j: int, s: int, l: int, b: int, m: float) -> float:
    """Defining integral of F_{d,j,s,l,b}: independent oracle for the
    closed form, via adaptive quadrature of

        (1/2) int_0^1 (1-t)^{(j-3+2b+2l)/2} (1-mt)^{(1-s)/2} t^{(d-j-2+2l)/2} dt.
    """
    if not (1 < j < d):
        raise ValueError("need 1 < j < d")
    e1 = (j - 3 + 2 * b + 2 * l) / 2.0
    e2 = (1 - s) / 2.0
    e3 = (d - j - 2 + 2 * l) / 2.0

    def integrand(t):
        return (1 - t) ** e1 * (1 - m * t) ** e2 * t ** e3

    val, _ = quad(integrand, 0.0, 1.0, limit=200, epsabs=1e-12, epsrel=1e-11)
    return 0.5 * val


def elliptic_k(m: float) -> float:
    """Complete elliptic integral of the first kind, parameter m = alpha^2.

    Arithmetic-geometric mean iteration; quadratic convergence makes a
    fixed iteration cap safe at double precision.
    """
    if not 0.0 <= m < 1.0:
        raise ValueError("elliptic_k requires 0 <= m < 1")
    a, g = 1.0, math.sqrt(1.0 - m)
    for _ in range(40):
        if abs(a - g) <= 4e-16 * a:
            break
        a, g = (a + g) / 2.0, math.sqrt(a * g)
    return math.pi / (a + g)


def elliptic_e(m: float) -> float:
    """Complete elliptic integral of the second kind, parameter m."""
    if not 0.0 <= m <= 1.0:
        raise ValueError("elliptic_e requires 0 <= m <= 1")
    if m == 1.0:
        return 1.0
    a, g = 1.0, math.sqrt(1.0 - m)
    c_sq_sum = 0.5 * m  # 2^{n-1} c_n^2 accumulated, starting at c_0 = sqrt(m)
    n = 0
    for _ in range(40):
        if abs(a - g) <= 4e-16 * a:
            break
        c = (a - g) / 2.0
        a, g = (a + g) / 2.0, math.sqrt(a * g)
        n += 1
        c_sq_sum += 2.0 ** (n - 1) * c * c
    return math.pi / (a + g) * (1.0 - c_sq_sum)


def c_affine(d: int, j: int, k: int) -> float:
    """Constant in front of the affine Crofton formulas."""
    if not 0 <= k < j < d:
        raise ValueError("need 0 <= k < j < d")
    return (grassmann_total(d, j) * math.comb(d + k - j - 1, k)
            * _gamma_ratio([(j + 1) / 2, (d - j + 1) / 2], [])
            / math.pi ** (d / 2.0))


def chi_constant_forms(d: int, j: int, k: int, s: int, p: int):
    """The three equivalent representations of the chi coefficient
    (Gamma sum, Pochhammer sum, terminating 3F2)."""
    if not 0 <= k < j < d:
        raise ValueError("need 0 <= k < j < d")
    if s < 0 or p < 0:
        raise ValueError("s, p must be non-negative")
    if 2 * p > s:
        return 0.0, 0.0, 0.0
    sig = sphere_area(j - k + s - 2 * p)
    # Gamma-factor sum
    acc = 0.0
    for b in range(s // 2 - p + 1):
        acc += ((-1) ** b * math.comb(s - 2 * p, 2 * b)
                * _gamma_ratio([(2 * b + 1) / 2,
                                (k + 2 + s - 2 * b - 2 * p) / 2,
                                (d - j + 2 * b + 2 * p) / 2],
                               [(2 * b + 2 * p + d + 1) / 2]))
    chi1 = sig / (4 ** p * math.factorial(p) * SQRT_PI) * acc
    # Pochhammer sum
    pref = (sig * _gamma_ratio([(k + 2 + s - 2 * p) / 2, (d - j + 2 * p) / 2],
                               [(2 * p + d + 1) / 2])
            / (math.factorial(p) * 4 ** p))
    acc = 0.0
    for b in range(s // 2 - p + 1):
        acc += (pochhammer(-(s - 2 * p) / 2, b)
                * pochhammer(-(s - 2 * p - 1) / 2, b)
                * pochhammer((d - j + 2 * p) / 2, b)
                / (pochhammer(1.0, b)
                   * pochhammer((2 * p + d + 1) / 2, b)
                   * pochhammer(-(k + s - 2 * p) / 2, b)))
    chi2 = pref * acc
    # Terminating 3F2
    chi3 = pref * hyp_pfq(HypParams(
        [(2 * p - s + 1) / 2, (2 * p - s) / 2, (d - j + 2 * p) / 2],
        [(2 * p - k - s) / 2, (2 * p + d + 1) / 2]), 1.0)
    return chi1, chi2, chi3


def chi_constant(d: int, j: int, k: int, s: int, p: int) -> float:
    """Coefficient of the p-th metric-tensor power in the affine
    Minkowski-tensor formula.

    The three representations must agree to 1e-10; disagreement raises.
    Returns 0 for p > s/2.
    """
    chi1, chi2, chi3 = chi_constant_forms(d, j, k, s, p)
    scale = max(1.0, abs(chi1))
    if abs(chi1 - chi2) > 1e-10 * scale or abs(chi1 - chi3) > 1e-10 * scale:
        raise ArithmeticError(
            f"chi representations disagree at (d,j,k,s,p)=({d},{j},{k},{s},{p}): "
            f"{chi1}, {chi2}, {chi3}")
    return chi1


def legendre_pd(s: int, d: int, t):
    """Legendre polynomial of dimension d and degree s, normalized so that
    P_s^d(1) = 1.  Proportional to the Gegenbauer polynomial with index
    (d-2)/2; for d = 2 it is the Chebyshev polynomial."""
    if d < 2 or s < 0:
        raise ValueError("need d >= 2 and s >= 0")
    t_arr = np.asarray(t, dtype=float)
    if np.any(np.abs(t_arr) > 1 + 1e-12):
        raise ValueError("t must lie in [-1, 1]")
    t_arr = np.clip(t_arr, -1.0, 1.0)
    if d == 2:
        out = np.cos(s * np.arccos(t_arr))
    else:
        out = eval_gegenbauer(s, (d - 2) / 2.0, t_arr) / math.comb(s + d - 3, d - 3)
    return out if out.shape else float(out)


def a_constant(s: int, j: int, d: int) -> float:
    """Legendre moment a_{s,j,d} = int_0^1 (1-t^2)^{(d-j-2)/2} t^j P_s^d(t) dt,
    via its closed 3F2 form."""
    if d < 3 or not 1 <= j < d or s < 0:
        raise ValueError("need d >= 3, 1 <= j < d, s >= 0")
    m, odd = divmod(s, 2)
    if not odd:
        val = ((-1) ** m * math.pi ** ((d - 2) / 2.0)
               * _gamma_ratio([(2 * m + 1) / 2, (d - j) / 2, (j + 1) / 2],
                              [(2 * m + d - 1) / 2, (d + 1) / 2])
               * hyp_pfq(HypParams([-m, (2 * m + d - 2) / 2, (j + 1) / 2],
                                   [0.5, (d + 1) / 2]), 1.0))
    else:
        val = ((-1) ** m * 2.0 * math.pi ** ((d - 2) / 2.0)
               * _gamma_ratio([(2 * m + 3) / 2, (d - j) / 2, (j + 2) / 2],
                              [(2 * m + d - 1) / 2, (d + 2) / 2])
               * hyp_pfq(HypParams([-m, (2 * m + d) / 2, (j + 2) / 2],
                                   [1.5, (d + 2) / 2]), 1.0))
    return val / sphere_area(d - 1)


def a_constant_quadrature(s: int, j: int, d: int) -> float:
    """Independent oracle for a_constant: adaptive quadrature of the
    defining integral after the substitution t = sin(theta), which removes
    the endpoint singularity."""
    if d < 3 or not 1 <= j < d or s < 0:
        raise ValueError("need d >= 3, 1 <= j < d, s >= 0")

    def integrand(theta):
        t = math.sin(theta)
        return math.cos(theta) ** (d - j - 1) * t ** j * legendre_pd(s, d, t)

    val, _ = quad(integrand, 0.0, math.pi / 2.0, limit=200,
                  epsabs=1e-12, epsrel=1e-11)
    return val
