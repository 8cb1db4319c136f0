"""Maximum-likelihood fitting of the q-Gaussian and Fisher-information intervals.

Two modes share one code path:

* joint fit of ``(q, sigma_q)`` (the default);
* ``sigma_q`` held fixed (``fit_mle(x, sigma_q=1.0)``), which on a series
  normalised to unit variance is the one-parameter fit of ``q`` used by the
  back-testing and rolling pipelines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from qvar import kernels
from qvar.errors import DataError, DomainError, EstimationError
from qvar.qdist import QGaussianParams

Q_BOUNDS = (1.0 + 1e-6, 3.0 - 1e-6)
SIGMA_MIN = 1e-6
Q_GRID = np.round(np.arange(1.01, 2.5 + 1e-9, 0.01), 2)
CONFIDENCE_Z = 1.96
H_Q = 1e-4
H_SIGMA_REL = 1e-4
NM_RESTARTS = 2

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class FitResult:
    params: QGaussianParams
    log_likelihood: float
    n_obs: int
    q_stderr: float | None = None
    q_ci_95: tuple[float, float] | None = None
    sigma_fixed: bool = False

    @property
    def q(self) -> float:
        return self.params.q

    @property
    def sigma_q(self) -> float:
        return self.params.sigma_q


def log_likelihood(values, q: float, sigma_q: float) -> float:
    """Sum of log densities of ``values`` under the q-Gaussian (q, sigma_q)."""
    x = np.asarray(values, dtype=float)
    return float(kernels.qgauss_loglik(np.ascontiguousarray(x * x), float(q), float(sigma_q)))


def _golden_max(f, lo: float, hi: float, tol: float, max_iter: int = 200):
    """Maximise a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``."""
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    candidates = [(fc, c), (fd, d), (f(lo), lo), (f(hi), hi)]
    fx, x = max(candidates)
    return x, fx


def _values_of(returns) -> np.ndarray:
    values = getattr(returns, "values", returns)
    x = np.asarray(values, dtype=float).ravel()
    if not np.all(np.isfinite(x)):
        raise DataError("returns contain non-finite values")
    return x


def fit_mle(
    returns,
    *,
    sigma_q: float | None = None,
    q_bounds: tuple[float, float] = Q_BOUNDS,
    start: tuple[float, float] | float | None = None,
    min_obs: int = 100,
    with_ci: bool = True,
    max_iter: int = 4000,
) -> FitResult:
    """Maximum-likelihood q-Gaussian fit.

    Without ``start`` a coarse grid over q = 1.01, 1.02, ..., 2.50 (with
    sigma_q profiled by golden-section search at every grid point) locates
    the basin, then Nelder-Mead polishes.  With ``start`` the grid is
    restricted to a +-0.05 neighbourhood of the starting q, which is how
    rolling windows reuse the previous window's answer.

    ``sigma_q`` given: the width is held at that value and only q is fitted
    (grid, then golden-section refinement).

    Raises
    ------
    DataError
        Fewer than ``min_obs`` observations, or non-finite values.
    EstimationError
        The polish stage exhausted ``max_iter`` on every restart; ``best``
        carries the best point seen.
    """
    x = _values_of(returns)
    n = x.size
    if n < min_obs:
        raise DataError(f"need at least {min_obs} observations, got {n}")
    q_lo, q_hi = max(q_bounds[0], Q_BOUNDS[0]), min(q_bounds[1], Q_BOUNDS[1])
    if not q_lo < q_hi:
        raise DomainError(f"empty q range {q_bounds}")
    x2 = np.ascontiguousarray(x * x)
    rms = math.sqrt(float(x2.mean()))
    if not rms > 0.0:
        raise DataError("returns are identically zero")

    def ll(q: float, s: float) -> float:
        return float(kernels.qgauss_loglik(x2, q, s))

    start_q = start[0] if isinstance(start, (tuple, list)) else start
    if start_q is None:
        grid = Q_GRID[(Q_GRID > q_lo) & (Q_GRID < q_hi)]
    else:
        sq = min(max(float(start_q), q_lo), q_hi)
        grid = np.round(np.arange(sq - 0.05, sq + 0.05 + 1e-9, 0.01), 10)
        grid = grid[(grid > q_lo) & (grid < q_hi)]
    grid = np.unique(np.concatenate([grid, [q_lo, q_hi]]))

    if sigma_q is not None:
        return _fit_fixed_sigma(x, ll, grid, float(sigma_q), q_lo, q_hi, with_ci)

    log_s_lo = math.log(max(rms * 1e-3, SIGMA_MIN))
    log_s_hi = math.log(rms * 10.0)

    def profile(q: float):
        ls, val = _golden_max(lambda t: ll(q, math.exp(t)), log_s_lo, log_s_hi, 1e-5)
        return val, math.exp(ls)

    best_val, best_q, best_s = -math.inf, math.nan, math.nan
    for q in grid:
        val, s = profile(float(q))
        if val > best_val:
            best_val, best_q, best_s = val, float(q), s
    if isinstance(start, (tuple, list)):
        val = ll(min(max(start[0], q_lo), q_hi), max(start[1], SIGMA_MIN))
        if val > best_val:
            best_val, best_q, best_s = val, min(max(start[0], q_lo), q_hi), max(start[1], SIGMA_MIN)

    def neg_mean(p):
        q, s = p
        if not (q_lo <= q <= q_hi and s >= SIGMA_MIN):
            return math.inf
        return -ll(q, s) / n

    # the simplex can collapse on the flat ridge near q -> 1; a fresh simplex
    # at the best point seen usually finishes the job
    point = np.array([best_q, best_s])
    for _ in range(NM_RESTARTS + 1):
        res = minimize(
            neg_mean,
            point,
            method="Nelder-Mead",
            bounds=[(q_lo, q_hi), (SIGMA_MIN, None)],
            options={"xatol": 1e-9, "fatol": 1e-13, "maxiter": max_iter, "maxfev": 2 * max_iter},
        )
        if res.success:
            break
        point = res.x
    q_hat, s_hat = float(res.x[0]), float(res.x[1])
    ll_hat = ll(q_hat, s_hat)
    if ll_hat < best_val:  # polish never makes things worse
        q_hat, s_hat, ll_hat = best_q, best_s, best_val
    if not res.success:
        raise EstimationError(
            f"Nelder-Mead did not converge: {res.message}",
            best=(q_hat, s_hat), log_likelihood=ll_hat,
        )
    params = QGaussianParams(q_hat, s_hat)
    stderr = ci = None
    if with_ci:
        stderr, ci = fisher_ci(x, params)
    return FitResult(params, ll_hat, n, stderr, ci, sigma_fixed=False)


def _fit_fixed_sigma(x, ll, grid, sigma, q_lo, q_hi, with_ci) -> FitResult:
    vals = np.array([ll(float(q), sigma) for q in grid])
    i = int(np.argmax(vals))
    lo = float(grid[max(i - 1, 0)])
    hi = float(grid[min(i + 1, grid.size - 1)])
    q_hat, ll_hat = _golden_max(lambda q: ll(q, sigma), lo, hi, 1e-10)
    if vals[i] > ll_hat:
        q_hat, ll_hat = float(grid[i]), float(vals[i])
    params = QGaussianParams(q_hat, sigma)
    stderr = ci = None
    if with_ci:
        stderr, ci = fisher_ci(x, params, fixed_sigma=True)
    return FitResult(params, ll_hat, x.size, stderr, ci, sigma_fixed=True)


def observed_information(returns, params: QGaussianParams, *, fixed_sigma: bool = False) -> np.ndarray:
    """Negative Hessian of the total log-likelihood by central differences.

    Steps are h_q = 1e-4 and h_sigma = 1e-4 * sigma_q.  When q sits within
    one step of the lower domain edge the stencil centre is nudged inward
    so every evaluation stays at q > 1.
    """
    x = _values_of(returns)
    x2 = np.ascontiguousarray(x * x)
    q = max(params.q, Q_BOUNDS[0] + H_Q)
    q = min(q, Q_BOUNDS[1] - H_Q)
    s = params.sigma_q
    hs = H_SIGMA_REL * s

    def ll(dq: float, ds: float) -> float:
        return float(kernels.qgauss_loglik(x2, q + dq, s + ds))

    f0 = ll(0.0, 0.0)
    d2q = (ll(H_Q, 0.0) - 2.0 * f0 + ll(-H_Q, 0.0)) / (H_Q * H_Q)
    if fixed_sigma:
        return np.array([[-d2q]])
    d2s = (ll(0.0, hs) - 2.0 * f0 + ll(0.0, -hs)) / (hs * hs)
    dqs = (ll(H_Q, hs) - ll(H_Q, -hs) - ll(-H_Q, hs) + ll(-H_Q, -hs)) / (4.0 * H_Q * hs)
    return -np.array([[d2q, dqs], [dqs, d2s]])


def fisher_ci(returns, params: QGaussianParams, *, fixed_sigma: bool = False):
    """Asymptotic standard error of q and its 95% interval ``q +- 1.96 se``.

    The interval is clipped to the open domain 1 < q < 3.

    Raises
    ------
    EstimationError
        The observed information is not positive definite, i.e. ``params``
        is not a proper interior maximum of the likelihood.
    """
    info = observed_information(returns, params, fixed_sigma=fixed_sigma)
    try:
        np.linalg.cholesky(info)
    except np.linalg.LinAlgError:
        raise EstimationError(
            "observed information is not positive definite",
            best=(params.q, params.sigma_q),
        ) from None
    cov = np.linalg.inv(info)
    se = math.sqrt(cov[0, 0])
    half = CONFIDENCE_Z * se
    low = max(params.q - half, Q_BOUNDS[0])
    high = min(params.q + half, Q_BOUNDS[1])
    return se, (low, high)
