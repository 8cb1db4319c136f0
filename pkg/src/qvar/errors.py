"""Exception hierarchy shared by every qvar module."""

from __future__ import annotations


class QVarError(Exception):
    """Base class for all library errors."""


class DomainError(QVarError, ValueError):
    """An argument lies outside the domain of the function."""


class DataError(QVarError):
    """Input data is unusable (duplicates, too short, degenerate)."""


class ParseError(DataError):
    """A row of an input file could not be parsed."""

    def __init__(self, message: str, row: int | None = None):
        super().__init__(message if row is None else f"row {row}: {message}")
        self.row = row


class NumericError(QVarError, ArithmeticError):
    """An iterative numerical routine failed to converge."""


class EstimationError(NumericError):
    """Likelihood maximisation failed.

    ``best`` holds the best point visited before giving up, as a
    ``(q, sigma_q)`` tuple, and ``log_likelihood`` its objective value.
    """

    def __init__(self, message: str, best=None, log_likelihood=None):
        super().__init__(message)
        self.best = best
        self.log_likelihood = log_likelihood
