"""Scalar special functions used by the q-Gaussian distribution."""

from __future__ import annotations

import math
from statistics import NormalDist

from qvar import kernels
from qvar.errors import DomainError

_STD_NORMAL = NormalDist()


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for ``x > 0``."""
    if not x > 0.0 or math.isinf(x):
        raise DomainError(f"log_gamma requires finite x > 0, got {x!r}")
    return math.lgamma(x)


def log_beta(a: float, b: float) -> float:
    """log B(a, b); large arguments go through a Stirling difference, not three lgammas."""
    if not (a > 0.0 and b > 0.0) or math.isinf(a) or math.isinf(b):
        raise DomainError(f"beta requires finite a, b > 0, got ({a!r}, {b!r})")
    return kernels.log_beta(float(a), float(b))


def beta(a: float, b: float) -> float:
    """Euler beta function B(a, b), assembled in log space."""
    return math.exp(log_beta(a, b))


def reg_inc_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b).

    Evaluated with a Lentz continued fraction, switching to the
    complementary form ``1 - I_{1-x}(b, a)`` when ``x > (a+1)/(a+b+2)``.
    """
    if not (a > 0.0 and b > 0.0):
        raise DomainError(f"reg_inc_beta requires a, b > 0, got ({a!r}, {b!r})")
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"reg_inc_beta requires 0 <= x <= 1, got {x!r}")
    return kernels.reg_inc_beta(float(a), float(b), float(x))


def std_normal_cdf(z: float) -> float:
    return _STD_NORMAL.cdf(z)


def std_normal_quantile(p: float) -> float:
    """Inverse standard-normal CDF on the open interval (0, 1)."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"std_normal_quantile requires 0 < p < 1, got {p!r}")
    return _STD_NORMAL.inv_cdf(p)
