"""Pure-Python/numpy fallback for :mod:`qvar._ckernels`.

Same signatures and semantics; results agree with the compiled module to
rounding (summation order differs).
"""

from __future__ import annotations

import math

import numpy as np

from qvar.errors import NumericError

FPMIN = 1e-300
EPS = 1e-16
MAXIT = 20000
STIRLING_MIN = 20.0


def _stirling_corr(x: float) -> float:
    # lgamma(x) - [(x - 1/2) log x - x + log(2 pi) / 2], first four terms
    r = 1.0 / x
    r2 = r * r
    return r * (1.0 / 12.0 - r2 * (1.0 / 360.0 - r2 * (1.0 / 1260.0 - r2 / 1680.0)))


def log_beta(a: float, b: float) -> float:
    """log B(a, b) without the cancellation of three lgamma calls at large arguments."""
    if a < b:
        a, b = b, a
    if a < STIRLING_MIN:
        return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)
    # lgamma(a + b) - lgamma(a) from the difference of Stirling series
    ratio = ((a + b - 0.5) * math.log1p(b / a) + b * math.log(a) - b
             + _stirling_corr(a + b) - _stirling_corr(a))
    return math.lgamma(b) - ratio


def _betacf(a: float, b: float, x: float) -> float:
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < FPMIN:
        d = FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if abs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if abs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < EPS:
            return h
    raise NumericError(
        f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})"
    )


def reg_inc_beta(a: float, b: float, x: float) -> float:
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    lfront = a * math.log(x) + b * math.log1p(-x) - log_beta(a, b)
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(lfront) * _betacf(a, b, x) / a
    return 1.0 - math.exp(lfront) * _betacf(b, a, 1.0 - x) / b


def _betacf_vec(a, b, x):
    """Vectorised Lentz iteration; ``a``, ``b``, ``x`` broadcast together."""
    a, b, x = np.broadcast_arrays(*(np.asarray(v, dtype=np.float64) for v in (a, b, x)))
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    d = np.where(np.abs(d) < FPMIN, FPMIN, d)
    d = 1.0 / d
    h = d.copy()
    active = np.ones(x.shape, dtype=bool)
    for m in range(1, MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d_new = 1.0 + aa * d
        d_new = np.where(np.abs(d_new) < FPMIN, FPMIN, d_new)
        c_new = 1.0 + aa / c
        c_new = np.where(np.abs(c_new) < FPMIN, FPMIN, c_new)
        d_new = 1.0 / d_new
        h_new = h * d_new * c_new
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d_new = 1.0 + aa * d_new
        d_new = np.where(np.abs(d_new) < FPMIN, FPMIN, d_new)
        c_new = 1.0 + aa / c_new
        c_new = np.where(np.abs(c_new) < FPMIN, FPMIN, c_new)
        d_new = 1.0 / d_new
        delta = d_new * c_new
        h_new = h_new * delta
        # frozen entries keep their converged value
        h = np.where(active, h_new, h)
        d = np.where(active, d_new, d)
        c = np.where(active, c_new, c)
        active &= ~(np.abs(delta - 1.0) < EPS)
        if not active.any():
            return h
    raise NumericError("incomplete beta continued fraction did not converge")


def _reg_inc_beta_vec(a, b, x):
    a, b, x = np.broadcast_arrays(*(np.asarray(v, dtype=np.float64) for v in (a, b, x)))
    out = np.empty(x.shape)
    lo, hi = x <= 0.0, x >= 1.0
    out[lo], out[hi] = 0.0, 1.0
    mid = ~(lo | hi)
    if not mid.any():
        return out
    am, bm, xm = a[mid], b[mid], x[mid]
    lb = np.vectorize(log_beta, otypes=[float])
    lfront = am * np.log(xm) + bm * np.log1p(-xm) - lb(am, bm)
    front = np.exp(lfront)
    direct = xm < (am + 1.0) / (am + bm + 2.0)
    res = np.empty(xm.shape)
    if direct.any():
        res[direct] = front[direct] * _betacf_vec(am[direct], bm[direct], xm[direct]) / am[direct]
    flip = ~direct
    if flip.any():
        res[flip] = 1.0 - front[flip] * _betacf_vec(bm[flip], am[flip], 1.0 - xm[flip]) / bm[flip]
    out[mid] = res
    return out


def student_t_cdf(t, nu: float):
    t = np.asarray(t, dtype=np.float64)
    with np.errstate(over="ignore"):  # |t| > 1e154 squares to inf, the far branch handles it
        t2 = t * t
    out = np.full(t.shape, 0.5)
    near = (t2 < nu) & (t != 0.0)
    far = t2 >= nu
    if near.any():
        tail = 0.5 * _reg_inc_beta_vec(0.5, 0.5 * nu, t2[near] / (nu + t2[near]))
        out[near] = np.where(t[near] > 0.0, 0.5 + tail, 0.5 - tail)
    if far.any():
        tail = 0.5 * _reg_inc_beta_vec(0.5 * nu, 0.5, nu / (nu + t2[far]))
        out[far] = np.where(t[far] > 0.0, 1.0 - tail, tail)
    return out


def qgauss_loglik(x2, q: float, sigma: float) -> float:
    """Total q-Gaussian log-likelihood given squared observations."""
    x2 = np.asarray(x2, dtype=np.float64)
    nu = (3.0 - q) / (q - 1.0)
    c = 1.0 / (nu * sigma * sigma)
    log_z = 0.5 * math.log(nu * sigma * sigma) + log_beta(0.5 * nu, 0.5)
    return -x2.size * log_z - float(np.log1p(c * x2).sum()) / (q - 1.0)
