"""Exception hierarchy shared by all modules."""
from __future__ import annotations


class LevyNetError(Exception):
    """Base class for toolkit errors."""


class ParameterError(LevyNetError, ValueError):
    """An argument lies outside its documented domain."""


class RangeError(LevyNetError, ValueError):
    """A location or index lies outside the valid range."""


class StructureError(LevyNetError, ValueError):
    """An input object is malformed (e.g. not a valid Lukasiewicz walk)."""


class NumericError(LevyNetError, ArithmeticError):
    """A numerical routine failed to converge or lost its bracket."""


class DegenerateSampleError(LevyNetError, RuntimeError):
    """A Monte Carlo ensemble produced no usable samples."""


class BudgetExceededError(LevyNetError, RuntimeError):
    """A simulation ran out of its step budget.

    Attributes
    ----------
    partial : object
        The partial result at the time the budget ran out.
    """

    def __init__(self, message: str, partial: object = None) -> None:
        super().__init__(message)
        self.partial = partial
