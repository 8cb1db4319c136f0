import math

import numpy as np
import pytest
from scipy import integrate, stats

from qvar import oracle, qdist
from qvar.errors import NumericError
from qvar.qdist import QGaussianParams


def test_quad_polynomial_examples():
    assert oracle.quad_integrate(lambda x: x * x, 0.0, 1.0, 1e-12) == pytest.approx(1 / 3, abs=1e-12)
    assert abs(oracle.quad_integrate(lambda x: x**3 - np.sin(x), -1.0, 1.0, 1e-12)) < 1e-12


@pytest.mark.parametrize("coeffs", [[1.0], [0.0, 2.0], [3.0, -1.0, 0.5], [0.1, 0.0, 0.0, 4.0, -2.0, 1.0],
                                    [-1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0]])
@pytest.mark.parametrize("lo, hi", [(0.0, 1.0), (-2.0, 3.0), (5.0, 5.5)])
def test_quad_matches_antiderivative(coeffs, lo, hi):
    poly = np.polynomial.Polynomial(coeffs)
    exact = poly.integ()(hi) - poly.integ()(lo)
    tol = 1e-10
    assert abs(oracle.quad_integrate(poly, lo, hi, tol) - exact) < tol * max(1.0, abs(exact))


def test_quad_reversed_and_empty_interval():
    f = lambda x: np.exp(x)
    assert oracle.quad_integrate(f, 1.0, 0.0) == pytest.approx(-(math.e - 1), abs=1e-10)
    assert oracle.quad_integrate(f, 2.0, 2.0) == 0.0


def test_quad_accepts_scalar_only_callable():
    assert oracle.quad_integrate(lambda x: math.cos(x), 0.0, math.pi / 2) == pytest.approx(1.0, abs=1e-10)


def test_quad_agrees_with_scipy_on_peaked_integrand():
    f = lambda x: 1.0 / (1e-4 + x * x)
    ref, _ = integrate.quad(f, -1, 1, points=[0.0], epsabs=1e-13, limit=500)
    assert oracle.quad_integrate(f, -1.0, 1.0, 1e-9) == pytest.approx(ref, rel=1e-10)


def test_quad_non_convergence_raises():
    with pytest.raises(NumericError):
        oracle.quad_integrate(lambda x: np.sin(1.0 / np.maximum(x, 1e-300)), 0.0, 1.0, 1e-14,
                              max_evals=20_000)
    with pytest.raises(NumericError), np.errstate(divide="ignore"):
        oracle.quad_integrate(lambda x: 1.0 / x, 0.0, 1.0)


def test_quad_rejects_bad_tolerance():
    with pytest.raises(ValueError):
        oracle.quad_integrate(lambda x: x, 0.0, 1.0, 0.0)


def test_truncated_normalization_at_q15():
    # the mass beyond 50 sigma_q is 2 P(T_3 > 50), not negligible at 1e-6
    p = QGaussianParams(1.5, 1.0)
    inner = oracle.quad_integrate(lambda x: qdist.pdf(x, p), -50.0, 50.0, 1e-12)
    missing = 2.0 * stats.t.sf(50.0, 3.0)
    assert missing == pytest.approx(1.7617e-5, rel=1e-4)
    assert inner == pytest.approx(1.0 - missing, abs=1e-10)
    whole = oracle.integrate_real_line(lambda x: qdist.pdf(x, p), 1.0, 4.0, 1e-12)
    assert whole == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("tail, f, exact", [
    (2.0, lambda x: 1.0 / (1.0 + x * x), math.pi / 2),
    (1.2, lambda x: 1.0 / (1.0 + x) ** 1.2, 5.0),
    (math.inf, lambda x: np.exp(-x), 1.0),
])
def test_half_line_power_tails(tail, f, exact):
    assert oracle.integrate_half_line(f, 1.0, tail, 1e-11) == pytest.approx(exact, rel=1e-9)


def test_half_line_rejects_non_integrable_tail():
    with pytest.raises(ValueError):
        oracle.integrate_half_line(lambda x: 1.0 / (1.0 + x), 1.0, 1.0)


def test_ks_examples():
    assert oracle.ks_statistic([0.0], stats.norm.cdf) == pytest.approx(0.5)
    rng = np.random.default_rng(5)
    x = rng.standard_normal(100_000)
    d = oracle.ks_statistic(x, stats.norm.cdf)
    assert d < 0.006
    assert d == pytest.approx(stats.kstest(x, "norm").statistic, abs=1e-15)
    shuffled = x.copy()
    rng.shuffle(shuffled)
    assert oracle.ks_statistic(shuffled, stats.norm.cdf) == d
    assert oracle.ks_statistic(np.sort(x), stats.norm.cdf) == d


def test_ks_detects_wrong_law():
    x = np.random.default_rng(6).standard_normal(20_000)
    assert oracle.ks_statistic(x, lambda v: stats.norm.cdf(v, scale=1.2)) > 0.03


def test_ks_rejects_empty():
    with pytest.raises(ValueError):
        oracle.ks_statistic([], stats.norm.cdf)


def test_audit_grid_finds_brute_force_max():
    val, (u, v) = oracle.audit_grid(lambda a, b: -(a - 0.3) ** 2 - (b + 0.2) ** 2, (0, 1), (-1, 1), size=11)
    assert (u, v) == pytest.approx((0.3, -0.2))
    assert val == pytest.approx(0.0, abs=1e-15)
