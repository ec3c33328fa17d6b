"""Exception types shared by every module.

Each class also derives from the closest builtin so callers that only
know ``ValueError`` / ``RuntimeError`` still catch the right thing.
"""

from __future__ import annotations


class SglError(Exception):
    """Base class for all library errors."""


class ParameterError(SglError, ValueError):
    """Input outside the operation's domain (parity, ranges, empty sets)."""


class ResourceError(SglError, RuntimeError):
    """A configured enumeration or solver cap would be exceeded."""

    def __init__(self, message: str, cap: int | float | None = None,
                 requested: int | float | None = None) -> None:
        super().__init__(message)
        self.cap = cap
        self.requested = requested


class NumericError(SglError, ArithmeticError):
    """An iterative solver failed to converge."""

    def __init__(self, message: str, residual: float | None = None) -> None:
        super().__init__(message)
        self.residual = residual


class DegenerateError(SglError, ValueError):
    """0/0 ratios, infinite distances, disconnected inputs, lambda2 = d."""


class InfeasibleError(SglError, ArithmeticError):
    pass


class UnboundedError(SglError, ArithmeticError):
    pass


class PreconditionError(SglError, ValueError):
    """A lemma's hypothesis does not hold for the supplied instance."""

    def __init__(self, message: str, hypothesis: str = "") -> None:
        super().__init__(message)
        self.hypothesis = hypothesis


class VerificationError(SglError, AssertionError):
    """An unconditional identity or bound failed: an implementation bug."""
