"""Exception types raised by nc_hardy."""

import numpy as np


class DimensionMismatchError(ValueError):
    """An operand does not match the dimension of its algebra."""


class NotSelfAdjointError(ValueError):
    """A self-adjoint operand was required."""


class NotPositiveError(ValueError):
    """A positive semidefinite operand was required."""


class NotAnalyticError(ValueError):
    """An operand was required to lie in H-infinity (block-upper pattern)."""


class SpectrumTooCloseToZeroError(ArithmeticError):
    """A logarithm was requested for an operator whose spectrum nearly touches 0.

    The smallest and largest eigenvalues are kept on the exception so callers
    can decide how far to shift.
    """

    def __init__(self, msg, smallest=None, largest=None):
        super().__init__(msg)
        self.smallest = smallest
        self.largest = largest


class SingularOperatorError(np.linalg.LinAlgError):
    """An inverse was requested for a (numerically) singular operator."""

    def __init__(self, msg, smallest_singular_value=None):
        super().__init__(msg)
        self.smallest_singular_value = smallest_singular_value


class IllConditionedGramError(np.linalg.LinAlgError):
    """The Szego normal equations are numerically singular."""

    def __init__(self, msg, condition=None):
        super().__init__(msg)
        self.condition = condition
