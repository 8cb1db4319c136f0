"""Price ingestion, log returns, normalisation and k-day aggregation."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from datetime import date
from pathlib import Path

import numpy as np

from qvar.errors import DataError, DomainError, ParseError

MAX_SCALE_DAYS = 60


@dataclass(frozen=True)
class PriceSeries:
    """Closing prices of one index, strictly increasing in date."""

    index_name: str
    dates: np.ndarray  # datetime64[D]
    closes: np.ndarray

    def __post_init__(self):
        dates = np.asarray(self.dates, dtype="datetime64[D]")
        closes = np.asarray(self.closes, dtype=float)
        if dates.shape != closes.shape or dates.ndim != 1:
            raise DataError("dates and closes must be 1-D and of equal length")
        if dates.size > 1 and not np.all(np.diff(dates) > np.timedelta64(0, "D")):
            raise DataError("dates must be strictly increasing")
        if not np.all(np.isfinite(closes) & (closes > 0)):
            raise DataError("closes must be finite and strictly positive")
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "closes", closes)

    def __len__(self) -> int:
        return self.closes.size

    def between(self, start=None, end=None) -> "PriceSeries":
        """Sub-series with ``start <= date <= end`` (either bound optional)."""
        mask = np.ones(self.dates.size, dtype=bool)
        if start is not None:
            mask &= self.dates >= np.datetime64(start, "D")
        if end is not None:
            mask &= self.dates <= np.datetime64(end, "D")
        return PriceSeries(self.index_name, self.dates[mask], self.closes[mask])


@dataclass(frozen=True)
class ReturnSeries:
    """Log returns of one index at a given timescale.

    ``mu_r`` and ``sigma_r`` always describe the *raw* returns, so a
    normalised series can be mapped back to return units.
    """

    index_name: str
    scale_days: int
    dates: np.ndarray
    values: np.ndarray
    mu_r: float
    sigma_r: float
    normalized: bool = False

    def __post_init__(self):
        dates = np.asarray(self.dates, dtype="datetime64[D]")
        values = np.asarray(self.values, dtype=float)
        if dates.shape != values.shape:
            raise DataError("dates and values must have equal length")
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size

    @classmethod
    def from_values(cls, values, index_name: str = "synthetic", scale_days: int = 1,
                    dates=None) -> "ReturnSeries":
        """Wrap raw returns (e.g. simulated draws) with sample moments attached."""
        values = np.asarray(values, dtype=float)
        if dates is None:
            dates = np.datetime64("2000-01-03", "D") + np.arange(values.size)
        mu, sd = _moments(values)
        return cls(index_name, scale_days, dates, values, mu, sd, False)

    def raw_values(self) -> np.ndarray:
        """Values in return units, undoing normalisation if needed."""
        if self.normalized:
            return self.values * self.sigma_r + self.mu_r
        return self.values

    def between(self, start=None, end=None) -> "ReturnSeries":
        if self.normalized:
            raise DataError("slice the raw series, then normalise")
        mask = np.ones(self.dates.size, dtype=bool)
        if start is not None:
            mask &= self.dates >= np.datetime64(start, "D")
        if end is not None:
            mask &= self.dates <= np.datetime64(end, "D")
        vals = self.values[mask]
        mu, sd = _moments(vals) if vals.size >= 2 else (math.nan, math.nan)
        return replace(self, dates=self.dates[mask], values=vals, mu_r=mu, sigma_r=sd)


def _moments(values: np.ndarray) -> tuple[float, float]:
    if values.size < 2:
        return (float(values.mean()) if values.size else math.nan), math.nan
    return float(values.mean()), float(values.std(ddof=1))


def _parse_date(text: str, row: int) -> np.datetime64:
    try:
        return np.datetime64(date.fromisoformat(text.strip()), "D")
    except ValueError:
        raise ParseError(f"malformed date {text!r} (expected YYYY-MM-DD)", row) from None


def _parse_close(text: str, row: int) -> float:
    try:
        value = float(text.strip())
    except ValueError:
        raise ParseError(f"non-numeric close {text!r}", row) from None
    if not (math.isfinite(value) and value > 0.0):
        raise ParseError(f"close must be positive, got {text.strip()!r}", row)
    return value


def ingest_csv(path, index_name: str | None = None) -> PriceSeries:
    """Read a ``date,close`` CSV (ISO dates, header required).

    Rows may come in any order; blank rows are skipped.  Row numbers in
    error messages are 1-based physical lines of the file.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such input: {path}")
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DataError(f"{path}: empty file")
        cols = [h.strip().lower() for h in header]
        if "date" not in cols or "close" not in cols:
            raise ParseError(f"header must contain 'date' and 'close', got {header}", 1)
        i_date, i_close = cols.index("date"), cols.index("close")
        seen: dict[np.datetime64, int] = {}
        dates, closes = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) <= max(i_date, i_close):
                raise ParseError(f"expected at least {max(i_date, i_close) + 1} fields", lineno)
            d = _parse_date(row[i_date], lineno)
            c = _parse_close(row[i_close], lineno)
            if d in seen:
                raise DataError(f"duplicate date {d} on rows {seen[d]} and {lineno}")
            seen[d] = lineno
            dates.append(d)
            closes.append(c)
    if len(dates) < 2:
        raise DataError(f"{path}: need at least 2 price rows, got {len(dates)}")
    dates_arr = np.array(dates, dtype="datetime64[D]")
    order = np.argsort(dates_arr, kind="stable")
    return PriceSeries(index_name or path.stem, dates_arr[order], np.array(closes)[order])


def log_returns(prices: PriceSeries) -> ReturnSeries:
    """r_t = ln(x_t / x_{t-1}); each return carries the later date."""
    if len(prices) < 2:
        raise DataError("need at least 2 prices")
    c = prices.closes
    values = np.log(c[1:] / c[:-1])
    mu, sd = _moments(values)
    return ReturnSeries(prices.index_name, 1, prices.dates[1:], values, mu, sd, False)


def normalize(returns: ReturnSeries) -> ReturnSeries:
    """Standardise to zero sample mean and unit sample (n-1) standard deviation.

    Idempotent: a series that is already normalised is returned unchanged.
    """
    if returns.normalized:
        return returns
    if len(returns) < 2:
        raise DataError("need at least 2 returns to normalise")
    mu, sd = _moments(returns.values)
    # a constant series can still show a spread of a few ulps from the mean
    if not sd > 1e-12 * float(np.max(np.abs(returns.values))):
        raise DataError("return series has zero variance")
    z = (returns.values - mu) / sd
    return replace(returns, values=z, mu_r=mu, sigma_r=sd, normalized=True)


def denormalize(returns: ReturnSeries) -> ReturnSeries:
    if not returns.normalized:
        return returns
    return replace(returns, values=returns.raw_values(), normalized=False)


def aggregate_scale(returns: ReturnSeries, k: int) -> ReturnSeries:
    """Non-overlapping k-day sums of daily log returns; the remainder is dropped.

    Each block is dated by its last day.
    """
    if not (isinstance(k, (int, np.integer)) and 1 <= k <= MAX_SCALE_DAYS):
        raise DomainError(f"k must be an integer in [1, {MAX_SCALE_DAYS}], got {k!r}")
    if returns.normalized or returns.scale_days != 1:
        raise DataError("aggregate_scale expects raw daily returns")
    n = len(returns) // k
    if n < 1:
        raise DataError(f"series of {len(returns)} returns is shorter than k={k}")
    if k == 1:
        return returns
    blocks = returns.values[: n * k].reshape(n, k).sum(axis=1)
    dates = returns.dates[k - 1 : n * k : k]
    mu, sd = _moments(blocks)
    return ReturnSeries(returns.index_name, int(k), dates, blocks, mu, sd, False)
