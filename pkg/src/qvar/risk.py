"""Gaussian and q-Gaussian Value-at-Risk, and violation back-tests."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from qvar import qdist
from qvar.errors import DataError, DomainError
from qvar.estimate import FitResult, fit_mle
from qvar.qdist import QGaussianParams
from qvar.series import PriceSeries, ReturnSeries, log_returns, normalize
from qvar.special_fn import std_normal_quantile

DEFAULT_ALPHAS = (0.95, 0.96, 0.97, 0.98)
# one-parameter fit on unit-variance returns; see fit_pipeline
PIPELINE_SIGMA_Q = 1.0


class Model(str, Enum):
    GAUSSIAN = "gaussian"
    Q_GAUSSIAN = "q_gaussian"


@dataclass(frozen=True)
class VarEstimate:
    """A VaR figure in percent of value, positive for a loss."""

    model: Model
    alpha: float
    horizon_days: int
    var_percent: float
    params_used: QGaussianParams | tuple[float, float]


@dataclass(frozen=True)
class BacktestReport:
    model: Model
    alpha: float
    violations: int
    n_obs: int

    @property
    def violation_ratio(self) -> float:
        return self.violations / self.n_obs

    @property
    def violation_percent(self) -> float:
        return 100.0 * self.violations / self.n_obs


@dataclass(frozen=True)
class BacktestRow:
    alpha: float
    model: Model
    var: VarEstimate
    report: BacktestReport


def _check_alpha(alpha: float, lower: float = 0.5) -> float:
    alpha = float(alpha)
    if not lower < alpha < 1.0:
        raise DomainError(f"confidence level must lie in ({lower}, 1), got {alpha!r}")
    return alpha


def _moments(returns: ReturnSeries) -> tuple[float, float]:
    mu, sd = returns.mu_r, returns.sigma_r
    if not (math.isfinite(mu) and math.isfinite(sd) and sd > 0.0):
        raise DataError("return series is degenerate (zero or undefined variance)")
    return mu, sd


def var_gaussian(returns: ReturnSeries, alpha: float) -> VarEstimate:
    """-(mu_r + sigma_r * z_{1-alpha}), in percent."""
    alpha = _check_alpha(alpha, lower=0.0)
    mu, sd = _moments(returns)
    var = -(mu + sd * std_normal_quantile(1.0 - alpha))
    return VarEstimate(Model.GAUSSIAN, alpha, returns.scale_days, 100.0 * var, (mu, sd))


def var_q(returns: ReturnSeries, fit: FitResult, alpha: float) -> VarEstimate:
    """q-Gaussian VaR: the (1-alpha)-quantile of the fitted law, mapped back to return units.

    ``fit`` must come from the normalised version of ``returns``.
    """
    alpha = _check_alpha(alpha, lower=0.0)
    if not isinstance(fit, FitResult):
        raise DomainError("var_q needs a FitResult")
    mu, sd = _moments(returns)
    z = qdist.quantile(1.0 - alpha, fit.params)
    var = -(mu + sd * z)
    return VarEstimate(Model.Q_GAUSSIAN, alpha, returns.scale_days, 100.0 * var, fit.params)


def backtest(returns: ReturnSeries, var: VarEstimate) -> BacktestReport:
    """Count returns strictly below -VaR."""
    if returns.normalized:
        raise DataError("back-test on raw returns, not the normalised series")
    if returns.scale_days != var.horizon_days:
        raise DataError(
            f"scale mismatch: returns are {returns.scale_days}-day, "
            f"VaR horizon is {var.horizon_days} days"
        )
    n = len(returns)
    if n == 0:
        raise DataError("empty return series")
    threshold = -var.var_percent / 100.0
    violations = int(np.count_nonzero(returns.values < threshold))
    return BacktestReport(var.model, var.alpha, violations, n)


def fit_pipeline(returns: ReturnSeries, *, free_scale: bool = False, **fit_kwargs) -> FitResult:
    """Fit the q-Gaussian to the normalised series.

    By default sigma_q is held at 1 so that only q is estimated on the
    unit-variance series; ``free_scale=True`` fits (q, sigma_q) jointly.
    """
    z = normalize(returns)
    if free_scale:
        return fit_mle(z, **fit_kwargs)
    return fit_mle(z, sigma_q=PIPELINE_SIGMA_Q, **fit_kwargs)


def backtest_table(
    prices: PriceSeries | ReturnSeries,
    alphas=DEFAULT_ALPHAS,
    *,
    free_scale: bool = False,
    fit: FitResult | None = None,
) -> tuple[FitResult, list[BacktestRow]]:
    """Full in-sample pipeline: returns, normalise, one fit, both models at every alpha.

    Returns the shared fit and one row per (alpha, model), alpha ascending,
    q-Gaussian first.
    """
    alphas = sorted({_check_alpha(a) for a in alphas})
    if not alphas:
        raise DomainError("at least one confidence level is required")
    returns = prices if isinstance(prices, ReturnSeries) else log_returns(prices)
    if fit is None:
        fit = fit_pipeline(returns, free_scale=free_scale)
    rows: list[BacktestRow] = []
    for a in alphas:
        for v in (var_q(returns, fit, a), var_gaussian(returns, a)):
            rows.append(BacktestRow(a, v.model, v, backtest(returns, v)))
    return fit, rows
