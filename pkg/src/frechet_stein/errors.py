"""Exception types shared across the package."""

from __future__ import annotations


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class InvalidInterval(ValueError):
    """Integration or search interval with lo >= hi (or non-finite lo)."""


class NoBracket(ValueError):
    """Root finding was asked to work on an interval without a sign change."""


class NonConvergence(ArithmeticError):
    """An iterative scheme ran out of budget before meeting its tolerance.

    ``estimate`` and ``error`` carry the best value found and its error bound
    so callers can still report something useful.
    """

    def __init__(self, message: str, estimate: float = float("nan"), error: float = float("inf")):
        super().__init__(message)
        self.estimate = estimate
        self.error = error
