"""Gaussian and q-Gaussian (Tsallis) Value-at-Risk toolkit."""

from qvar.errors import (
    DataError,
    DomainError,
    EstimationError,
    NumericError,
    ParseError,
    QVarError,
)
from qvar.estimate import FitResult, fisher_ci, fit_mle
from qvar.kernels import BACKEND
from qvar.qdist import QGaussianParams

__all__ = [
    "BACKEND",
    "DataError",
    "DomainError",
    "EstimationError",
    "FitResult",
    "NumericError",
    "ParseError",
    "QGaussianParams",
    "QVarError",
    "fisher_ci",
    "fit_mle",
]
