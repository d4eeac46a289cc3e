"""Special functions: closed forms against independent quadrature and
series oracles."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from crofton import specfun as sf
from crofton.specfun import HypParams


def test_sphere_area_values():
    assert sf.sphere_area(1) == pytest.approx(2.0)
    assert sf.sphere_area(2) == pytest.approx(2 * math.pi)
    assert sf.sphere_area(3) == pytest.approx(4 * math.pi)
    with pytest.raises(ValueError):
        sf.sphere_area(0)


def test_grassmann_total():
    assert sf.grassmann_total(5, 0) == 1.0
    assert sf.grassmann_total(3, 1) == pytest.approx(2 * math.pi)
    assert sf.grassmann_total(4, 2) == pytest.approx(2 * math.pi ** 2)
    with pytest.raises(ValueError):
        sf.grassmann_total(3, 4)


def test_pochhammer():
    assert sf.pochhammer(2.5, 0) == 1.0
    assert sf.pochhammer(3, 4) == 360.0
    assert sf.pochhammer(-2, 4) == 0.0


def test_hyp_terminating_upper_zero():
    # an upper parameter 0 collapses the series to its first term
    assert sf.hyp_pfq(HypParams([0.0, 2.3], [1.7]), 0.9) == 1.0


def test_hyp_at_zero():
    assert sf.hyp_pfq(HypParams([1.3, 2.2], [0.7]), 0.0) == 1.0


def test_hyp_forced_by_gauss():
    assert sf.hyp_pfq(HypParams([0.5, 0.5], [2.0]), 1.0) == \
        pytest.approx(4 / math.pi, rel=1e-12)


def test_hyp_terminating_polynomial():
    # upper -n gives a degree-n polynomial: compare to finite summation
    for n in (1, 2, 4):
        for z in (-0.7, 0.3, 1.0, 2.5):
            direct = sum(sf.pochhammer(-n, m) * sf.pochhammer(1.7, m)
                         / sf.pochhammer(0.6, m) * z ** m / math.factorial(m)
                         for m in range(n + 1))
            assert sf.hyp_pfq(HypParams([-n, 1.7], [0.6]), z) == \
                pytest.approx(direct, rel=1e-13)


def test_hyp_nonstandard_equal_parameters():
    # lower parameter equal to a terminating upper parameter: the series
    # is cut there rather than treating the pair as cancelling
    val = sf.hyp_pfq(HypParams([-2.0, 1.5], [-2.0]), 1.0)
    direct = sum(sf.pochhammer(-2, n) * sf.pochhammer(1.5, n)
                 / (sf.pochhammer(-2, n) * math.factorial(n))
                 for n in range(3))
    assert val == pytest.approx(direct)


def test_hyp_undefined_combination():
    with pytest.raises(ValueError):
        sf.hyp_pfq(HypParams([0.5, 1.5], [-1.0]), 0.3)


def test_hyp_divergent():
    with pytest.raises(ValueError):
        sf.hyp_pfq(HypParams([0.5, 1.5], [1.0]), 1.5)


def test_gauss_against_integral_representation():
    # Euler's integral at z = 1 is an oracle independent of the Gamma
    # evaluation: 2F1(a,b;c;1) = Gam(c)/(Gam(b)Gam(c-b)) B(b, c-a-b)
    rng = np.random.default_rng(42)
    for _ in range(50):
        b = rng.uniform(0.2, 3.0)
        a = rng.uniform(-1.5, 1.5)
        c = a + b + rng.uniform(0.6, 3.0)
        if c <= b:
            c = b + 0.7
        def integrand(theta, a=a, b=b, c=c):
            t = math.sin(theta) ** 2
            # includes the Jacobian 2 sin cos of t = sin^2
            return 2.0 * (1 - t) ** (c - a - b - 0.5) * t ** (b - 0.5) \
                * math.sin(theta) ** 0 * math.cos(theta) ** 0
        val, _ = quad(integrand, 0, math.pi / 2, limit=200)
        oracle = math.gamma(c) / (math.gamma(b) * math.gamma(c - b)) * val
        assert sf.gauss_at_one(a, b, c) == pytest.approx(oracle, abs=1e-8,
                                                         rel=1e-8)


def test_f_integral_elliptic_lines():
    for m in np.arange(0.1, 0.95, 0.1):
        k, e = sf.elliptic_k(m), sf.elliptic_e(m)
        assert sf.f_integral(3, 2, 2, 0, 0, m) == pytest.approx(k, rel=1e-12)
        assert sf.f_integral(3, 2, 2, 0, 1, m) == \
            pytest.approx((e + (m - 1) * k) / m, rel=1e-10)
        assert sf.f_integral(3, 2, 2, 1, 0, m) == \
            pytest.approx((2 * (m - 1) * k - (m - 2) * e) / (3 * m * m),
                          rel=1e-10)
        assert sf.f_integral(3, 2, 2, 0, 2, m) == \
            pytest.approx(((4 * m - 2) * e + (3 * m * m - 5 * m + 2) * k)
                          / (3 * m * m), rel=1e-10)


def test_f_integral_vs_quadrature_samples():
    rng = np.random.default_rng(1)
    for _ in range(25):
        d = int(rng.integers(3, 7))
        j = int(rng.integers(2, d))
        s = int(rng.integers(0, 5))
        l = int(rng.integers(0, 3))
        b = int(rng.integers(0, 3))
        m = float(rng.choice([0.0, 0.3, 0.7, 0.95]))
        assert sf.f_integral(d, j, s, l, b, m) == pytest.approx(
            sf.f_integral_quadrature(d, j, s, l, b, m), rel=1e-8)


def test_f_integral_at_one_limit():
    # convergent case via Gauss evaluation
    val = sf.f_integral(4, 3, 2, 0, 1, 1.0)
    seq = [sf.f_integral(4, 3, 2, 0, 1, m) for m in (0.999, 0.9999, 0.99999)]
    assert abs(seq[-1] - val) < 5e-3
    assert abs(seq[-1] - val) < abs(seq[0] - val)


def test_elliptic_endpoints():
    assert sf.elliptic_k(0.0) == pytest.approx(math.pi / 2)
    assert sf.elliptic_e(0.0) == pytest.approx(math.pi / 2)
    assert sf.elliptic_e(1.0) == 1.0
    assert sf.elliptic_k(0.5) == pytest.approx(
        math.pi / 2 * sf.hyp_pfq(HypParams([0.5, 0.5], [1.0]), 0.5), rel=1e-13)
    with pytest.raises(ValueError):
        sf.elliptic_k(1.0)


def test_c_affine_values():
    assert sf.c_affine(3, 1, 0) == pytest.approx(1.0)
    # binomial term is 1 at k = 0
    for d, j in ((4, 2), (5, 3)):
        expected = (sf.grassmann_total(d, j) * math.gamma((j + 1) / 2)
                    * math.gamma((d - j + 1) / 2) / math.pi ** (d / 2))
        assert sf.c_affine(d, j, 0) == pytest.approx(expected)
    with pytest.raises(ValueError):
        sf.c_affine(3, 3, 1)


def test_chi_zero_beyond_half_s():
    assert sf.chi_constant(3, 2, 1, 2, 2) == 0.0
    assert sf.chi_constant(5, 3, 1, 1, 1) == 0.0


def test_chi_s0():
    for d, j, k in ((3, 2, 1), (4, 3, 1), (6, 4, 2)):
        expected = (sf.sphere_area(j - k) * math.gamma((k + 2) / 2)
                    * math.gamma((d - j) / 2) / math.gamma((d + 1) / 2))
        assert sf.chi_constant(d, j, k, 0, 0) == pytest.approx(expected)


def test_chi_three_forms_grid():
    # the implementation itself raises if the three representations
    # disagree beyond 1e-10; sweep the full grid
    count = 0
    for d in range(2, 7):
        for j in range(1, d):
            for k in range(0, j):
                for s in range(0, 5):
                    for p in range(0, s // 2 + 1):
                        sf.chi_constant(d, j, k, s, p)
                        count += 1
    assert count > 200


def test_legendre_values():
    t = np.linspace(-1, 1, 7)
    for d in (2, 3, 4, 5):
        np.testing.assert_allclose(sf.legendre_pd(1, d, t), t, atol=1e-14)
        assert sf.legendre_pd(5, d, 1.0) == pytest.approx(1.0)
        assert sf.legendre_pd(0, d, 0.3) == 1.0
    np.testing.assert_allclose(sf.legendre_pd(2, 3, t), (3 * t * t - 1) / 2,
                               atol=1e-14)


def test_legendre_gegenbauer_recurrence():
    # (n+1) C_{n+1} = 2(n+lam) t C_n - (n + 2 lam - 1) C_{n-1}
    rng = np.random.default_rng(4)
    for d in (3, 4, 5):
        lam = (d - 2) / 2
        t = rng.uniform(-1, 1, size=9)
        c = [np.ones_like(t), 2 * lam * t]
        for n in range(1, 5):
            c.append((2 * (n + lam) * t * c[n] - (n + 2 * lam - 1) * c[n - 1])
                     / (n + 1))
        for s_deg in range(6):
            mine = sf.legendre_pd(s_deg, d, t) * math.comb(s_deg + d - 3, d - 3)
            np.testing.assert_allclose(mine, c[s_deg], atol=1e-11)


def test_a_constant_easy_values():
    assert sf.a_constant(0, 1, 3) == pytest.approx(0.5)
    for d in (3, 4, 5):
        for j in range(1, d):
            beta = (math.gamma((j + 2) / 2) * math.gamma((d - j) / 2)
                    / (2 * math.gamma((d + 2) / 2)))
            assert sf.a_constant(1, j, d) == pytest.approx(beta, rel=1e-12)


def test_a_constant_vs_quadrature_grid():
    for d in (3, 4, 5):
        for j in range(1, d):
            for s in range(0, 5):
                assert sf.a_constant(s, j, d) == pytest.approx(
                    sf.a_constant_quadrature(s, j, d), abs=1e-8)
