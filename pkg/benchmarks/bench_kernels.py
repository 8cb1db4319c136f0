"""Compiled vs numpy kernels: per-call timings and an end-to-end rolling run.

    python benchmarks/bench_kernels.py [--repeat 5] [--rolling]

Both backends are imported directly, so one process times both.  The
end-to-end figure runs the rolling analysis in a subprocess per backend,
since the backend is fixed when :mod:`qvar.kernels` is imported.
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import timeit
from pathlib import Path

import numpy as np

from qvar import _pykernels

try:
    from qvar import _ckernels
except ImportError:  # pragma: no cover - depends on the build
    _ckernels = None

ROOT = Path(__file__).resolve().parents[1]

_ROLLING = """
import time
from qvar.analysis import rolling_diff
from qvar.series import ingest_csv
prices = ingest_csv({path!r})
t0 = time.perf_counter()
rolling_diff(prices, 0.95, 250)
print(time.perf_counter() - t0)
"""


def _cases(rng):
    x2 = rng.standard_t(4, 5000) ** 2
    w2 = np.ascontiguousarray(x2[:250])
    t = rng.standard_t(3, 10_000)
    abx = [(rng.uniform(0.5, 30), rng.uniform(0.5, 30), rng.uniform()) for _ in range(2000)]
    return [
        # one rolling window: call overhead dominates
        ("qgauss_loglik, n=250", lambda m: m.qgauss_loglik(w2, 1.3, 1.0)),
        # long series: numpy's vectorised log1p wins over the scalar libm loop
        ("qgauss_loglik, n=5000", lambda m: m.qgauss_loglik(x2, 1.3, 1.0)),
        ("student_t_cdf, 10k points", lambda m: m.student_t_cdf(t, 4.0)),
        ("reg_inc_beta, 2000 scalar calls", lambda m: [m.reg_inc_beta(a, b, x) for a, b, x in abx]),
    ]


def _best(fn, repeat):
    number = 1
    while timeit.timeit(fn, number=number) < 0.2:
        number *= 2
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def _rolling_seconds(backend):
    code = _ROLLING.format(path=str(ROOT / "tests" / "data" / "synthetic" / "djia.csv"))
    env = dict(os.environ, QVAR_KERNELS=backend)
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--rolling", action="store_true", help="also time a full rolling analysis")
    args = parser.parse_args(argv)
    if _ckernels is None:
        print("compiled kernels are not built; nothing to compare", file=sys.stderr)
        return 1

    rng = np.random.default_rng(0)
    print(f"{'kernel':34s} {'cython':>12s} {'numpy':>12s} {'speed-up':>9s}")
    for name, call in _cases(rng):
        c = _best(lambda: call(_ckernels), args.repeat)
        p = _best(lambda: call(_pykernels), args.repeat)
        print(f"{name:34s} {c * 1e3:10.3f}ms {p * 1e3:10.3f}ms {p / c:8.1f}x")
    if args.rolling:
        c, p = _rolling_seconds("cython"), _rolling_seconds("python")
        print(f"{'rolling_diff, DJIA fixture':34s} {c:11.2f}s {p:11.2f}s {p / c:8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
