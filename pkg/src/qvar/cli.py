"""``qvar`` command line: fit, backtest, rolling, scales, simulate.

Every command writes one artifact (CSV or JSON) to ``--out`` plus a
``<out>.meta.json`` sidecar recording inputs, flags and library versions,
or prints the artifact to stdout when ``--out`` is omitted.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import platform
import sys
import tempfile
from importlib import metadata
from pathlib import Path

import numpy as np

from qvar import kernels, qdist
from qvar.analysis import PERIODS, DEFAULT_WINDOW, resolve_period, rolling_diff, scale_grid
from qvar.errors import DataError, DomainError, NumericError, QVarError
from qvar.risk import DEFAULT_ALPHAS, backtest_table, fit_pipeline
from qvar.series import MAX_SCALE_DAYS, PriceSeries, ingest_csv, log_returns

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------- formatting


def _fmt_csv(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.6g}"
    return str(value)


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt_csv(v) for v in row])
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _versions() -> dict:
    def ver(name):
        try:
            return metadata.version(name)
        except metadata.PackageNotFoundError:
            return None

    return {
        "artifact": ver("artifact"),
        "numpy": np.__version__,
        "scipy": ver("scipy"),
        "python": platform.python_version(),
        "kernels": kernels.BACKEND,
    }


def _emit(args, text: str, summary: dict | None = None) -> None:
    if args.out is None:
        sys.stdout.write(text)
        return
    out = Path(args.out)
    _atomic_write(out, text)
    flags = {k: v for k, v in sorted(vars(args).items()) if k not in ("func",)}
    inputs = []
    if getattr(args, "input", None):
        p = Path(args.input)
        inputs.append({"path": str(args.input), "sha256": _sha256(p)})
    meta = {
        "command": args.command,
        "flags": flags,
        "inputs": inputs,
        "versions": _versions(),
        "artifact": out.name,
    }
    if summary is not None:
        meta["summary"] = summary
    _atomic_write(out.with_name(out.name + ".meta.json"), _json_text(meta))


# ---------------------------------------------------------------- parsing


def _alpha(text: str) -> float:
    try:
        a = float(text)
    except ValueError:
        raise UsageError(f"invalid confidence level {text!r}") from None
    if not 0.5 < a < 1.0:
        raise UsageError(f"confidence level must lie in (0.5, 1), got {text}")
    return a


def _alpha_list(text: str) -> list[float]:
    return [_alpha(t) for t in text.split(",") if t.strip()]


def _scale_list(text: str) -> list[int]:
    out: set[int] = set()
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if "-" in part:
                lo, hi = (int(v) for v in part.split("-", 1))
                out.update(range(lo, hi + 1))
            else:
                out.add(int(part))
        except ValueError:
            raise UsageError(f"invalid scale list {text!r}") from None
    if not out or min(out) < 1 or max(out) > MAX_SCALE_DAYS:
        raise UsageError(f"scales must lie in 1..{MAX_SCALE_DAYS}")
    return sorted(out)


def _load(args) -> PriceSeries:
    return ingest_csv(args.input, index_name=args.name)


def _fit_record(fit, prices: PriceSeries, name: str) -> dict:
    lo, hi = fit.q_ci_95 if fit.q_ci_95 else (None, None)
    return {
        "index": name,
        "q": fit.q,
        "stderr": fit.q_stderr,
        "ci_low": lo,
        "ci_high": hi,
        "sigma_q": fit.sigma_q,
        "sigma_fixed": fit.sigma_fixed,
        "loglik": fit.log_likelihood,
        "n": fit.n_obs,
        "n_prices": len(prices),
    }


# ---------------------------------------------------------------- commands

FIT_FIELDS = ["index", "q", "stderr", "ci_low", "ci_high", "sigma_q", "sigma_fixed",
              "loglik", "n", "n_prices"]
BACKTEST_FIELDS = ["alpha", "model", "var_percent", "violations", "violation_percent", "n_obs"]


def cmd_fit(args) -> None:
    prices = _load(args)
    fit = fit_pipeline(log_returns(prices), free_scale=args.free_scale)
    rec = _fit_record(fit, prices, prices.index_name)
    if args.format == "json":
        _emit(args, _json_text(rec))
    else:
        _emit(args, _csv_text(FIT_FIELDS, [[rec[k] for k in FIT_FIELDS]]))


def cmd_backtest(args) -> None:
    prices = _load(args)
    fit, rows = backtest_table(prices, args.alphas, free_scale=args.free_scale)
    recs = [
        {
            "alpha": r.alpha,
            "model": r.model.value,
            "var_percent": r.var.var_percent,
            "violations": r.report.violations,
            "violation_percent": r.report.violation_percent,
            "n_obs": r.report.n_obs,
        }
        for r in rows
    ]
    fit_rec = _fit_record(fit, prices, prices.index_name)
    if args.format == "json":
        _emit(args, _json_text({"fit": fit_rec, "rows": recs}))
    else:
        _emit(args, _csv_text(BACKTEST_FIELDS, [[r[k] for k in BACKTEST_FIELDS] for r in recs]),
              summary={"fit": fit_rec})


def cmd_rolling(args) -> None:
    prices = _load(args)
    rd = rolling_diff(prices, args.alpha, args.window, free_scale=args.free_scale)
    rows = [
        {"date": str(d), "diff_percent": float(v)}
        for d, v in zip(rd.dates, rd.diff_values)
        if not math.isnan(v)
    ]
    summary = {
        "alpha": rd.alpha,
        "window_days": rd.window_days,
        "mean_line": rd.mean_line,
        "std_line": rd.std_line,
        "n_windows": int(rd.diff_values.size),
        "n_gaps": rd.n_gaps,
        "crossings": [{"start": str(a), "end": str(b)} for a, b in rd.crossings],
    }
    if args.format == "json":
        _emit(args, _json_text({"rows": rows, "summary": summary}))
    else:
        _emit(args, _csv_text(["date", "diff_percent"],
                              [[r["date"], r["diff_percent"]] for r in rows]),
              summary=summary)


def cmd_scales(args) -> None:
    prices = _load(args)
    if args.date_from or args.date_to:
        period = (args.date_from, args.date_to)
    else:
        period = args.period
    try:
        resolve_period(period)
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    grid = scale_grid(prices, args.alpha, period, args.scales, free_scale=args.free_scale)
    rows = [{"scale_days": k, "diff_percent": d} for k, d in zip(grid.scales, grid.diffs)]
    summary = {
        "alpha": grid.alpha,
        "period_label": grid.period_label,
        "period": list(grid.period),
        "q_values": grid.q_values,
        "n_obs": grid.n_obs,
        "warnings": grid.warnings,
    }
    if args.format == "json":
        _emit(args, _json_text({"rows": rows, "summary": summary}))
    else:
        _emit(args, _csv_text(["scale_days", "diff_percent"],
                              [[r["scale_days"], r["diff_percent"]] for r in rows]),
              summary=summary)


def _sim_dates(start: str, end: str | None, count: int) -> np.ndarray:
    first = np.datetime64(start, "D")
    if end is None:
        return np.busday_offset(first, np.arange(count), roll="forward")
    days = np.arange(first, np.datetime64(end, "D") + 1, dtype="datetime64[D]")
    days = days[np.is_busday(days)]
    if days.size < count:
        raise UsageError(f"only {days.size} business days between {start} and {end}, need {count}")
    idx = np.round(np.linspace(0, days.size - 1, count)).astype(int)
    return days[idx]


def cmd_simulate(args) -> None:
    try:
        if args.segment:
            segments = [(qdist.QGaussianParams(float(q), float(s)), int(c)) for q, s, c in args.segment]
        else:
            segments = [(qdist.QGaussianParams(args.q, args.sigma), args.n)]
    except (DomainError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    if any(c < 1 for _, c in segments):
        raise UsageError("sample counts must be positive")
    rng = np.random.default_rng(args.seed)
    returns = np.concatenate([qdist.sample(c, p, rng) for p, c in segments]) + args.mu
    n = returns.size
    dates = _sim_dates(args.start, args.end, n + 1)
    closes = args.initial_price * np.exp(np.concatenate([[0.0], np.cumsum(returns)]))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["date", "close"])
    for d, c in zip(dates, closes):
        w.writerow([str(d), repr(float(c))])
    _emit(args, buf.getvalue())


# ---------------------------------------------------------------- wiring


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qvar", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def common(p, with_input=True):
        if with_input:
            p.add_argument("input", help="date,close CSV")
            p.add_argument("--name", help="index name (default: file stem)")
            p.add_argument("--free-scale", action="store_true",
                           help="fit (q, sigma_q) jointly instead of q alone at sigma_q=1")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", help="output file (stdout if omitted)")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("fit", help="maximum-likelihood q with Fisher 95%% interval")
    common(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("backtest", help="VaR and violations for both models")
    common(p)
    p.add_argument("--alphas", type=_alpha_list, default=list(DEFAULT_ALPHAS))
    p.set_defaults(func=cmd_backtest)

    p = sub.add_parser("rolling", help="rolling q-VaR minus Gaussian VaR")
    common(p)
    p.add_argument("--alpha", type=_alpha, default=0.95)
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    p.set_defaults(func=cmd_rolling)

    p = sub.add_parser("scales", help="q-VaR minus Gaussian VaR across k-day timescales")
    common(p)
    p.add_argument("--alpha", type=_alpha, default=0.95)
    p.add_argument("--period", default="crisis",
                   help=f"one of {', '.join(PERIODS)} (overridden by --from/--to)")
    p.add_argument("--from", dest="date_from")
    p.add_argument("--to", dest="date_to")
    p.add_argument("--scales", type=_scale_list, default=list(range(1, MAX_SCALE_DAYS + 1)))
    p.set_defaults(func=cmd_scales)

    p = sub.add_parser("simulate", help="synthetic q-Gaussian price series")
    common(p, with_input=False)
    p.add_argument("--q", type=float, default=1.2)
    p.add_argument("--sigma", type=float, default=0.01, help="sigma_q of daily log returns")
    p.add_argument("--n", type=int, default=1000, help="number of returns")
    p.add_argument("--mu", type=float, default=0.0, help="drift added to every return")
    p.add_argument("--segment", nargs=3, action="append", metavar=("Q", "SIGMA", "COUNT"),
                   help="regime segment; repeat for several (overrides --q/--sigma/--n)")
    p.add_argument("--start", default="2000-01-20")
    p.add_argument("--end", help="spread the dates evenly over business days up to here")
    p.add_argument("--initial-price", type=float, default=100.0)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        args.func(args)
    except UsageError as exc:
        print(f"qvar: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"qvar: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"qvar: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericError as exc:
        print(f"qvar: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except QVarError as exc:  # pragma: no cover - every subclass is mapped above
        print(f"qvar: error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
