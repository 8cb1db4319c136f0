"""Regenerate the synthetic index fixtures in tests/data/synthetic/.

Each fixture is produced by ``qvar simulate`` with one regime segment per
calendar year.  A segment's daily standard deviation is a rough figure
for that index's realised volatility in that year; innovations are
q-Gaussian with q = 1.1 throughout.  Each fixture has a fixed return
count, with dates spread over the business days of the sample window.

Usage: python scripts/make_fixtures.py
"""

from __future__ import annotations

import math
import os
from pathlib import Path

import numpy as np

from qvar.cli import main

ROOT = Path(__file__).resolve().parents[1]
OUT = Path("tests") / "data" / "synthetic"
INNOVATION_Q = 1.1
END = "2019-03-20"

# index: (start date, n_returns, seed, {year: daily sd in percent})
INDICES = {
    "djia": ("2000-01-20", 4567, 101, {
        2000: 1.31, 2001: 1.35, 2002: 1.60, 2003: 1.05, 2004: 0.68, 2005: 0.65,
        2006: 0.62, 2007: 0.92, 2008: 2.39, 2009: 1.53, 2010: 1.14, 2011: 1.33,
        2012: 0.76, 2013: 0.68, 2014: 0.71, 2015: 0.98, 2016: 0.82, 2017: 0.43,
        2018: 1.14, 2019: 0.95}),
    "n225": ("2000-01-20", 4456, 102, {
        2000: 1.45, 2001: 1.65, 2002: 1.45, 2003: 1.40, 2004: 1.15, 2005: 0.80,
        2006: 1.15, 2007: 1.15, 2008: 2.95, 2009: 1.75, 2010: 1.30, 2011: 1.45,
        2012: 1.05, 2013: 1.80, 2014: 1.35, 2015: 1.30, 2016: 1.60, 2017: 0.75,
        2018: 1.05, 2019: 1.10}),
    "dax": ("2000-01-20", 4609, 103, {
        2000: 1.55, 2001: 1.90, 2002: 2.45, 2003: 2.05, 2004: 0.95, 2005: 0.75,
        2006: 0.90, 2007: 1.00, 2008: 2.30, 2009: 1.70, 2010: 1.10, 2011: 1.80,
        2012: 1.20, 2013: 0.95, 2014: 1.00, 2015: 1.40, 2016: 1.25, 2017: 0.70,
        2018: 0.90, 2019: 0.85}),
    "tse": ("2009-01-20", 2455, 104, {
        2009: 0.60, 2010: 0.55, 2011: 0.50, 2012: 0.75, 2013: 1.00, 2014: 0.90,
        2015: 0.70, 2016: 0.75, 2017: 0.55, 2018: 1.10, 2019: 1.40}),
    "sse": ("2000-01-20", 4501, 105, {
        2000: 1.30, 2001: 1.20, 2002: 1.30, 2003: 1.05, 2004: 1.30, 2005: 1.25,
        2006: 1.35, 2007: 2.15, 2008: 2.95, 2009: 2.05, 2010: 1.55, 2011: 1.15,
        2012: 1.20, 2013: 1.15, 2014: 1.10, 2015: 2.45, 2016: 1.40, 2017: 0.60,
        2018: 1.20, 2019: 1.55}),
    "bse": ("2000-01-20", 4477, 106, {
        2000: 2.05, 2001: 1.65, 2002: 1.05, 2003: 1.10, 2004: 1.60, 2005: 1.05,
        2006: 1.60, 2007: 1.55, 2008: 2.80, 2009: 2.15, 2010: 1.00, 2011: 1.30,
        2012: 0.95, 2013: 1.10, 2014: 0.85, 2015: 0.90, 2016: 0.85, 2017: 0.55,
        2018: 0.80, 2019: 0.90}),
}


def _segment_counts(start: str, n: int, years) -> list[int]:
    days = np.arange(np.datetime64(start, "D"), np.datetime64(END, "D") + 1)
    days = days[np.is_busday(days)]
    per_year = np.array([np.sum(days.astype("datetime64[Y]").astype(int) + 1970 == y)
                         for y in years], dtype=float)
    raw = per_year / per_year.sum() * n
    counts = np.floor(raw).astype(int)
    # largest remainders take the leftover observations
    for i in np.argsort(-(raw - counts))[: n - counts.sum()]:
        counts[i] += 1
    return counts.tolist()


def main_fixtures() -> None:
    os.chdir(ROOT)
    OUT.mkdir(parents=True, exist_ok=True)
    shape = math.sqrt((5.0 - 3.0 * INNOVATION_Q) / (3.0 - INNOVATION_Q))
    for name, (start, n, seed, vols) in INDICES.items():
        years = sorted(vols)
        argv = ["simulate", "--seed", str(seed), "--start", start, "--end", END,
                "--out", str(OUT / f"{name}.csv")]
        for y, c in zip(years, _segment_counts(start, n, years)):
            sigma_q = vols[y] / 100.0 * shape
            argv += ["--segment", str(INNOVATION_Q), repr(sigma_q), str(c)]
        code = main(argv)
        if code:
            raise SystemExit(code)


if __name__ == "__main__":
    main_fixtures()
