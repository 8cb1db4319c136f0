"""Rolling q-VaR minus Gaussian-VaR indicator and the multi-timescale grid."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from qvar.errors import DataError, DomainError, EstimationError, NumericError
from qvar.estimate import fit_mle
from qvar.risk import PIPELINE_SIGMA_Q, var_gaussian, var_q
from qvar.series import (
    MAX_SCALE_DAYS,
    PriceSeries,
    ReturnSeries,
    aggregate_scale,
    log_returns,
    normalize,
)

logger = logging.getLogger(__name__)

DEFAULT_WINDOW = 250
WINDOW_Q_BOUNDS = (1.001, 2.9)
MAX_GAP_FRACTION = 0.20
MIN_SCALE_OBS = 10
# a fitted q is pinned down only to ~1e-6 by rounding in the likelihood, which
# moves a diff by up to ~1e-7 pp; exceedances smaller than this are noise
FLAG_TOL = 1e-6

PERIODS = {
    "pre_crisis": ("2004-01-01", "2006-12-31"),
    "crisis": ("2007-01-01", "2009-12-31"),
    "post_crisis": ("2010-01-01", "2012-12-31"),
}


@dataclass(frozen=True)
class RollingDiffSeries:
    """Dated q-VaR minus Gaussian-VaR values (percent); NaN marks a failed window."""

    dates: np.ndarray
    diff_values: np.ndarray
    q_values: np.ndarray
    window_days: int
    alpha: float
    mean_line: float
    std_line: float
    crossings: list[tuple[np.datetime64, np.datetime64]]

    @property
    def flagged(self) -> np.ndarray:
        return flag_mask(self.diff_values, self.std_line)

    @property
    def n_gaps(self) -> int:
        return int(np.isnan(self.diff_values).sum())


@dataclass(frozen=True)
class ScaleGrid:
    scales: list[int]
    diffs: list[float]
    q_values: list[float]
    n_obs: list[int]
    period_label: str
    period: tuple[str | None, str | None]
    alpha: float
    warnings: list[str] = field(default_factory=list)


def flag_mask(values: np.ndarray, threshold: float) -> np.ndarray:
    """True where a value exceeds ``threshold`` by more than FLAG_TOL; NaN gaps are never flagged."""
    with np.errstate(invalid="ignore"):
        return np.asarray(values > threshold + FLAG_TOL)


def crossing_ranges(dates: np.ndarray, flagged: np.ndarray):
    """Maximal runs of consecutive flagged entries as ``(first_date, last_date)`` pairs."""
    out = []
    start = None
    for i, f in enumerate(flagged):
        if f and start is None:
            start = i
        elif not f and start is not None:
            out.append((dates[start], dates[i - 1]))
            start = None
    if start is not None:
        out.append((dates[start], dates[len(flagged) - 1]))
    return out


def _as_returns(prices) -> ReturnSeries:
    if isinstance(prices, ReturnSeries):
        if prices.normalized or prices.scale_days != 1:
            raise DataError("expected raw daily returns")
        return prices
    if isinstance(prices, PriceSeries):
        return log_returns(prices)
    raise TypeError(f"expected PriceSeries or ReturnSeries, got {type(prices).__name__}")


def _window_diff(values: np.ndarray, alpha: float, start_q, free_scale: bool):
    w = ReturnSeries.from_values(values)
    z = normalize(w).values  # DataError on a flat window
    kwargs = dict(q_bounds=WINDOW_Q_BOUNDS, min_obs=MIN_SCALE_OBS, with_ci=False)
    if free_scale:
        fit = fit_mle(z, start=start_q, **kwargs)
    else:
        fit = fit_mle(z, sigma_q=PIPELINE_SIGMA_Q, start=start_q, **kwargs)
    d = var_q(w, fit, alpha).var_percent - var_gaussian(w, alpha).var_percent
    return d, fit


def rolling_diff(
    prices,
    alpha: float = 0.95,
    window_days: int = DEFAULT_WINDOW,
    *,
    warm_start: bool = True,
    free_scale: bool = False,
) -> RollingDiffSeries:
    """q-VaR minus Gaussian VaR on every ``window_days`` window, step one day.

    Each window is normalised and fitted on its own; the previous window's
    q seeds the next fit when ``warm_start`` is set.  Windows whose fit
    fails become NaN gaps; more than 20% gaps raises :class:`EstimationError`.
    The threshold line is the mean plus one sample standard deviation of
    the non-gap values.
    """
    if not 0.5 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0.5, 1), got {alpha!r}")
    returns = _as_returns(prices)
    w = int(window_days)
    n = len(returns)
    if w < 2:
        raise DomainError("window_days must be at least 2")
    if w > n:
        raise DataError(f"window of {w} days exceeds the {n} available returns")
    if w < DEFAULT_WINDOW:
        logger.info("window of %d days is below the recommended %d", w, DEFAULT_WINDOW)

    count = n - w + 1
    diffs = np.full(count, np.nan)
    qs = np.full(count, np.nan)
    prev = None
    vals = returns.values
    for i in range(count):
        try:
            d, fit = _window_diff(vals[i : i + w], alpha, prev if warm_start else None, free_scale)
        except (EstimationError, NumericError, DataError) as exc:
            logger.debug("window ending %s failed: %s", returns.dates[i + w - 1], exc)
            prev = None
            continue
        diffs[i] = d
        qs[i] = fit.q
        prev = (fit.q, fit.sigma_q) if free_scale else fit.q

    gaps = int(np.isnan(diffs).sum())
    if gaps > MAX_GAP_FRACTION * count:
        raise EstimationError(f"{gaps} of {count} windows failed to fit")
    present = diffs[~np.isnan(diffs)]
    mean_line = float(present.mean())
    spread = float(present.std(ddof=1)) if present.size > 1 else 0.0
    std_line = mean_line + spread
    dates = returns.dates[w - 1 :]
    flagged = flag_mask(diffs, std_line)
    return RollingDiffSeries(
        dates=dates,
        diff_values=diffs,
        q_values=qs,
        window_days=w,
        alpha=float(alpha),
        mean_line=mean_line,
        std_line=std_line,
        crossings=crossing_ranges(dates, flagged),
    )


def resolve_period(period) -> tuple[str, tuple[str | None, str | None]]:
    """Map a label or an explicit ``(start, end)`` pair to ``(label, (start, end))``."""
    if isinstance(period, str):
        if period not in PERIODS:
            raise DomainError(
                f"unknown period {period!r}; valid labels: {', '.join(PERIODS)}"
            )
        return period, PERIODS[period]
    if period is None:
        return "full", (None, None)
    start, end = period
    start = None if start is None else str(start)
    end = None if end is None else str(end)
    return f"{start or ''}/{end or ''}", (start, end)


def scale_grid(
    prices,
    alpha: float = 0.95,
    period="crisis",
    scales=range(1, MAX_SCALE_DAYS + 1),
    *,
    free_scale: bool = False,
) -> ScaleGrid:
    """q-VaR minus Gaussian VaR on k-day returns inside ``period``, for each k.

    Daily returns dated inside the period are summed in non-overlapping
    k-day blocks.  A scale leaving fewer than 10 blocks is skipped and noted
    in ``warnings``.
    """
    if not 0.5 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0.5, 1), got {alpha!r}")
    scales = sorted({int(k) for k in scales})
    if not scales or scales[0] < 1 or scales[-1] > MAX_SCALE_DAYS:
        raise DomainError(f"scales must be a non-empty subset of 1..{MAX_SCALE_DAYS}")
    label, (start, end) = resolve_period(period)
    daily = _as_returns(prices).between(start, end)
    if len(daily) < 2:
        raise DataError(f"period {label} holds {len(daily)} returns")
    if len(daily) < 30 * scales[-1]:
        logger.info("period %s has %d returns, below 30 x %d", label, len(daily), scales[-1])

    out_k, out_d, out_q, out_n, notes = [], [], [], [], []
    for k in scales:
        if len(daily) // k < MIN_SCALE_OBS:
            msg = f"scale {k}: only {len(daily) // k} blocks (< {MIN_SCALE_OBS}), omitted"
            notes.append(msg)
            logger.warning(msg)
            continue
        agg = aggregate_scale(daily, k)
        try:
            d, fit = _window_diff(agg.values, alpha, None, free_scale)
        except (EstimationError, NumericError, DataError) as exc:
            msg = f"scale {k}: fit failed ({exc}), omitted"
            notes.append(msg)
            logger.warning(msg)
            continue
        out_k.append(k)
        out_d.append(d)
        out_q.append(fit.q)
        out_n.append(len(agg))
    return ScaleGrid(out_k, out_d, out_q, out_n, label, (start, end), float(alpha), notes)
