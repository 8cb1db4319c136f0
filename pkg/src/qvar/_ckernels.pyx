# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. ``qvar._pykernels`` mirrors every function here."""

import numpy as np

from libc.math cimport exp, fabs, lgamma, log, log1p, sqrt

from qvar.errors import NumericError

cdef double FPMIN = 1e-300
cdef double EPS = 1e-16
cdef int MAXIT = 20000
cdef double STIRLING_MIN = 20.0


cdef inline double _stirling_corr(double x):
    cdef double r = 1.0 / x
    cdef double r2 = r * r
    return r * (1.0 / 12.0 - r2 * (1.0 / 360.0 - r2 * (1.0 / 1260.0 - r2 / 1680.0)))


cdef double _log_beta(double a, double b):
    cdef double t
    if a < b:
        t = a
        a = b
        b = t
    if a < STIRLING_MIN:
        return lgamma(a) + lgamma(b) - lgamma(a + b)
    return lgamma(b) - ((a + b - 0.5) * log1p(b / a) + b * log(a) - b
                        + _stirling_corr(a + b) - _stirling_corr(a))


cdef double _betacf(double a, double b, double x) except? -1.0:
    # modified Lentz evaluation of the incomplete-beta continued fraction
    cdef double qab = a + b
    cdef double qap = a + 1.0
    cdef double qam = a - 1.0
    cdef double c = 1.0
    cdef double d = 1.0 - qab * x / qap
    cdef double h, aa, delta
    cdef int m, m2
    if fabs(d) < FPMIN:
        d = FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if fabs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if fabs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if fabs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if fabs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if fabs(delta - 1.0) < EPS:
            return h
    raise NumericError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


cdef double _reg_inc_beta(double a, double b, double x) except? -1.0:
    cdef double lfront
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    lfront = a * log(x) + b * log1p(-x) - _log_beta(a, b)
    if x < (a + 1.0) / (a + b + 2.0):
        return exp(lfront) * _betacf(a, b, x) / a
    return 1.0 - exp(lfront) * _betacf(b, a, 1.0 - x) / b


cdef double _t_cdf(double t, double nu) except? -1.0:
    cdef double t2, tail
    if t == 0.0:
        return 0.5
    t2 = t * t
    if t2 < nu:
        tail = 0.5 * _reg_inc_beta(0.5, 0.5 * nu, t2 / (nu + t2))
        return 0.5 + tail if t > 0.0 else 0.5 - tail
    tail = 0.5 * _reg_inc_beta(0.5 * nu, 0.5, nu / (nu + t2))
    return 1.0 - tail if t > 0.0 else tail


def log_beta(double a, double b):
    return _log_beta(a, b)


def reg_inc_beta(double a, double b, double x):
    return _reg_inc_beta(a, b, x)


def student_t_cdf(t, double nu):
    cdef const double[::1] tv = np.ascontiguousarray(t, dtype=np.float64).ravel()
    cdef Py_ssize_t i, n = tv.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] ov = out
    for i in range(n):
        ov[i] = _t_cdf(tv[i], nu)
    return out.reshape(np.shape(t))


def qgauss_loglik(const double[::1] x2, double q, double sigma):
    """Total q-Gaussian log-likelihood given squared observations."""
    cdef Py_ssize_t i, n = x2.shape[0]
    cdef double nu = (3.0 - q) / (q - 1.0)
    cdef double c = 1.0 / (nu * sigma * sigma)
    cdef double acc = 0.0
    cdef double log_z = 0.5 * log(nu * sigma * sigma) + _log_beta(0.5 * nu, 0.5)
    for i in range(n):
        acc += log1p(c * x2[i])
    return -n * log_z - acc / (q - 1.0)
