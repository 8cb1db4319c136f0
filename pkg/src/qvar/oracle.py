"""Independent numerical checks: adaptive quadrature, KS distance, audit grids.

Nothing in here shares code with the closed-form paths in :mod:`qvar.qdist`;
the functions are meant to be used as referees for those paths.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from qvar.errors import NumericError

__all__ = [
    "quad_integrate",
    "integrate_half_line",
    "integrate_real_line",
    "ks_statistic",
    "audit_grid",
]


def _as_vector_fn(f: Callable) -> Callable[[np.ndarray], np.ndarray]:
    probe = np.array([0.25, 0.5])
    try:
        out = np.asarray(f(probe), dtype=float)
        if out.shape == probe.shape:
            return lambda x: np.asarray(f(x), dtype=float)
    except Exception:  # noqa: BLE001 - scalar-only callables raise all sorts
        pass
    return np.vectorize(lambda x: float(f(float(x))), otypes=[float])


def quad_integrate(
    f: Callable,
    lo: float,
    hi: float,
    tol: float = 1e-10,
    *,
    min_depth: int = 4,
    max_depth: int = 50,
    max_evals: int = 5_000_000,
) -> float:
    """Adaptive Simpson integral of ``f`` over ``[lo, hi]``.

    All open sub-intervals at one refinement level are evaluated in a single
    call, so vectorised integrands are cheap.  Each sub-interval carries a
    share of ``tol`` proportional to its width; a piece is accepted when the
    two-panel and one-panel Simpson estimates differ by less than 15x its
    share, and the accepted value is Richardson-corrected.

    Raises :class:`NumericError` when the depth or evaluation budget runs out.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if lo == hi:
        return 0.0
    sign = 1.0
    if lo > hi:
        lo, hi, sign = hi, lo, -1.0
    g = _as_vector_fn(f)

    a = np.array([lo])
    b = np.array([hi])
    m = 0.5 * (a + b)
    fa, fm, fb = g(np.concatenate([a, m, b])).reshape(3, 1)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    share = np.array([tol])
    evals = 3
    accepted: list[float] = []

    for depth in range(max_depth + 1):
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        k = a.size
        vals = g(np.concatenate([lm, rm]))
        flm, frm = vals[:k], vals[k:]
        evals += 2 * k
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        two = left + right
        if not np.all(np.isfinite(two)):
            raise NumericError("integrand is not finite on the integration range")
        err = np.abs(two - whole)
        done = (err <= 15.0 * share) if depth >= min_depth else np.zeros(k, dtype=bool)
        if done.any():
            accepted.extend((two[done] + (two[done] - whole[done]) / 15.0).tolist())
        keep = ~done
        if not keep.any():
            return sign * math.fsum(accepted)
        if evals > max_evals or depth == max_depth:
            raise NumericError(
                f"adaptive Simpson did not converge: {int(keep.sum())} open intervals "
                f"after {evals} evaluations"
            )
        a, m, b = a[keep], m[keep], b[keep]
        fa, fm, fb = fa[keep], fm[keep], fb[keep]
        flm, frm = flm[keep], frm[keep]
        left, right, share = left[keep], right[keep], share[keep] * 0.5
        # children: [a, m] with midpoint lm, and [m, b] with midpoint rm
        a, m, b = (np.concatenate([a, m]), np.concatenate([lm[keep], rm[keep]]),
                   np.concatenate([m, b]))
        fa, fm, fb = (np.concatenate([fa, fm]), np.concatenate([flm, frm]),
                      np.concatenate([fm, fb]))
        whole = np.concatenate([left, right])
        share = np.concatenate([share, share])
    raise NumericError("adaptive Simpson exhausted its depth budget")  # pragma: no cover


def integrate_half_line(
    f: Callable, scale: float, tail_exponent: float, tol: float = 1e-10
) -> float:
    """Integral of ``f`` over ``[0, inf)`` for an integrand decaying like ``x**-tail_exponent``.

    Uses ``x = scale * ((1 - v)**-m - 1)`` on ``v in [0, 1]`` with
    ``m = max(1, 2 / (tail_exponent - 1))``, which makes the transformed
    integrand vanish at least linearly at ``v = 1`` for any integrable power
    tail, including the very slow ones of q near 3.
    """
    if not tail_exponent > 1.0:
        raise ValueError("tail_exponent must exceed 1 for an integrable tail")
    power = 1.0 if math.isinf(tail_exponent) else max(1.0, 2.0 / (tail_exponent - 1.0))
    g = _as_vector_fn(f)

    def mapped(v):
        v = np.asarray(v, dtype=float)
        out = np.zeros_like(v)
        inner = v < 1.0
        w = 1.0 - v[inner]
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            x = scale * (w ** -power - 1.0)
            vals = g(x) * scale * power * w ** (-power - 1.0)
        out[inner] = np.where(np.isfinite(vals), vals, 0.0)
        return out

    return quad_integrate(mapped, 0.0, 1.0, tol)


def integrate_real_line(
    f: Callable, scale: float, tail_exponent: float, tol: float = 1e-10, *, even: bool = False
) -> float:
    """Integral of ``f`` over the whole real line (see :func:`integrate_half_line`)."""
    g = _as_vector_fn(f)
    right = integrate_half_line(g, scale, tail_exponent, tol / 2.0)
    if even:
        return 2.0 * right
    left = integrate_half_line(lambda x: g(-np.asarray(x)), scale, tail_exponent, tol / 2.0)
    return left + right


def ks_statistic(sample, cdf: Callable) -> float:
    """Kolmogorov-Smirnov distance between the empirical CDF of ``sample`` and ``cdf``."""
    x = np.sort(np.asarray(sample, dtype=float).ravel())
    n = x.size
    if n == 0:
        raise ValueError("ks_statistic needs at least one observation")
    F = _as_vector_fn(cdf)(x)
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - F)
    d_minus = np.max(F - (i - 1) / n)
    return float(max(d_plus, d_minus))


def audit_grid(objective: Callable[[float, float], float], first: tuple[float, float],
               second: tuple[float, float], size: int = 21):
    """Brute-force maximum of ``objective`` on a ``size x size`` product grid.

    Returns ``(best_value, (u, v))``.
    """
    best = (-math.inf, (math.nan, math.nan))
    for u in np.linspace(first[0], first[1], size):
        for v in np.linspace(second[0], second[1], size):
            val = objective(float(u), float(v))
            if val > best[0]:
                best = (val, (float(u), float(v)))
    return best
