"""The q-Gaussian distribution for 1 < q < 3.

Density::

    P(x) = (1/Z_q) * [1 - (1-q)/(3-q) * x^2 / sigma_q^2]_+ ** (1/(1-q))

with ``sigma_q`` the width of the escort second moment.  On 1 < q < 3 this
is a Student-t law with ``nu = (3-q)/(q-1)`` degrees of freedom and scale
``sigma_q``; the CDF, quantile and sampler all go through that reduction.
The bracket clamp only bites for q < 1, which is outside the supported
domain, but it is kept in :func:`pdf` so the formula stays the textbook one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from qvar import kernels, oracle
from qvar.errors import DomainError, NumericError
from qvar.special_fn import log_beta

Q_MIN = 1.0
Q_MAX = 3.0


@dataclass(frozen=True)
class QGaussianParams:
    """Shape ``q`` (non-extensivity index) and escort width ``sigma_q``."""

    q: float
    sigma_q: float = 1.0

    def __post_init__(self):
        q, s = float(self.q), float(self.sigma_q)
        if not Q_MIN < q < Q_MAX:
            raise DomainError(f"q must satisfy 1 < q < 3, got {self.q!r}")
        if not (s > 0.0 and math.isfinite(s)):
            raise DomainError(f"sigma_q must be positive and finite, got {self.sigma_q!r}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "sigma_q", s)

    @property
    def nu(self) -> float:
        """Degrees of freedom of the equivalent Student-t law."""
        return (3.0 - self.q) / (self.q - 1.0)

    @classmethod
    def from_variance(cls, q: float, variance: float) -> "QGaussianParams":
        """Parameters whose ordinary variance equals ``variance`` (needs q < 5/3)."""
        if not q < 5.0 / 3.0:
            raise DomainError("ordinary variance is infinite for q >= 5/3")
        return cls(q, math.sqrt(variance * (5.0 - 3.0 * q) / (3.0 - q)))


def ordinary_variance(params: QGaussianParams) -> float:
    """Plain second moment ``sigma_q^2 (3-q)/(5-3q)``; infinite for q >= 5/3."""
    q = params.q
    if q >= 5.0 / 3.0:
        return math.inf
    return params.sigma_q ** 2 * (3.0 - q) / (5.0 - 3.0 * q)


def log_normalization(params: QGaussianParams) -> float:
    q, s = params.q, params.sigma_q
    return 0.5 * math.log((3.0 - q) / (q - 1.0) * s * s) + log_beta(
        (3.0 - q) / (2.0 * (q - 1.0)), 0.5
    )


def normalization(params: QGaussianParams) -> float:
    """Z_q = sqrt((3-q)/(q-1) sigma_q^2) * B((3-q)/(2(q-1)), 1/2)."""
    return math.exp(log_normalization(params))


def pdf(x, params: QGaussianParams):
    q, s = params.q, params.sigma_q
    x = np.asarray(x, dtype=float)
    base = np.maximum(1.0 - (1.0 - q) / (3.0 - q) * x * x / (s * s), 0.0)
    out = base ** (1.0 / (1.0 - q)) / normalization(params)
    return out if out.ndim else float(out)


def log_pdf(x, params: QGaussianParams):
    """log P(x) without forming P, so far tails do not underflow."""
    q, s = params.q, params.sigma_q
    x = np.asarray(x, dtype=float)
    out = -log_normalization(params) - np.log1p((q - 1.0) / (3.0 - q) * x * x / (s * s)) / (q - 1.0)
    return out if out.ndim else float(out)


def student_t_pdf(x, params: QGaussianParams):
    """Density through the Student-t form; a second evaluation path for :func:`pdf`."""
    nu, s = params.nu, params.sigma_q
    t = np.asarray(x, dtype=float) / s
    # Gamma((nu+1)/2) / (Gamma(nu/2) sqrt(nu pi)) = 1 / (sqrt(nu) B(nu/2, 1/2))
    log_c = -log_beta(0.5 * nu, 0.5) - 0.5 * math.log(nu)
    out = np.exp(log_c - 0.5 * (nu + 1.0) * np.log1p(t * t / nu)) / s
    return out if out.ndim else float(out)


def cdf(x, params: QGaussianParams):
    """P(X <= x) via the regularized incomplete beta function."""
    t = np.asarray(x, dtype=float) / params.sigma_q
    out = kernels.student_t_cdf(t, params.nu)
    return out if np.ndim(out) else float(out)


def _sf_lower(x: float, params: QGaussianParams) -> float:
    # P(X <= x) for x <= 0 is computed directly, which keeps full relative
    # precision deep in the lower tail
    return float(kernels.student_t_cdf(np.array([x / params.sigma_q]), params.nu)[0])


def quantile(p: float, params: QGaussianParams) -> float:
    """Inverse CDF on (0, 1), antisymmetric about p = 1/2.

    The lower half is solved by a bracketed root search (bracket doubled
    until it straddles the target, then Brent's bisection/secant hybrid);
    the upper half is mirrored.
    """
    if not 0.0 < p < 1.0:
        raise DomainError(f"quantile requires 0 < p < 1, got {p!r}")
    if p == 0.5:
        return 0.0
    if p > 0.5:
        return -quantile(1.0 - p, params)
    hi = 0.0
    lo = -params.sigma_q
    for _ in range(2000):
        if _sf_lower(lo, params) <= p:
            break
        hi, lo = lo, 2.0 * lo
    else:  # pragma: no cover - doubling reaches 1e300 long before this
        raise NumericError(f"could not bracket quantile for p={p}")
    # solve in log-probability so tiny p keep relative accuracy
    target = math.log(p)
    x, res = brentq(
        lambda v: math.log(max(_sf_lower(v, params), 1e-320)) - target,
        lo, hi, xtol=1e-14 * params.sigma_q, rtol=4 * np.finfo(float).eps,
        maxiter=500, full_output=True,
    )
    if not res.converged:  # pragma: no cover
        raise NumericError(f"quantile root search failed for p={p}")
    return float(x)


def sample(n: int, params: QGaussianParams, seed: int | np.random.Generator | None = None) -> np.ndarray:
    """``n`` i.i.d. draws: standard normal over sqrt(chi2_nu / nu), times sigma_q."""
    if int(n) < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    z = rng.standard_normal(int(n))
    chi2 = rng.chisquare(params.nu, int(n))
    return params.sigma_q * z / np.sqrt(chi2 / params.nu)


def tsallis_entropy(params: QGaussianParams, tol: float = 1e-11) -> float:
    """S_q = (1 - integral of P^q) / (q - 1), integral by adaptive quadrature."""
    q = params.q
    integral = oracle.integrate_real_line(
        lambda x: pdf(x, params) ** q,
        scale=params.sigma_q,
        tail_exponent=2.0 * q / (q - 1.0),
        tol=tol,
        even=True,
    )
    return (1.0 - integral) / (q - 1.0)
