# qklab/exceptions.py

"""
Error types raised across qklab.

Argument problems derive from ValueError so callers that already catch
ValueError keep working; numerical degeneracies derive from ArithmeticError.
"""


class QklabError(Exception):
    """Base class for every error raised by qklab."""


class ShapeError(QklabError, ValueError):
    """Matrix or vector dimensions do not fit together."""


class ValidationError(QklabError, ValueError):
    """A parameter or input lies outside its allowed domain."""


class ConfigError(ValidationError):
    """Malformed experiment configuration or override."""


class UnsupportedSizeError(ValidationError):
    """Problem size beyond what an exhaustive routine supports."""


class EmptyDatasetError(ValidationError):
    """A data file parsed to zero samples."""


class MalformedRowError(ValidationError):
    """A data row holds a value that cannot be parsed as a number."""

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class DegenerateRegressionError(ValidationError):
    """Regression slope undefined because the x values have zero variance."""


class InfeasibleCError(ValidationError):
    """C' lies outside the range where the margin bounds are defined."""

    def __init__(self, message, c_prime_max=None, feasible_range=None):
        super().__init__(message)
        self.c_prime_max = c_prime_max
        self.feasible_range = feasible_range


class DegenerateMarginError(QklabError, ArithmeticError):
    """Squared weight norm is (numerically) zero, so the margin is undefined."""


class SingularParameterError(QklabError, ArithmeticError):
    """Bound denominator is exactly zero."""


class ConvergenceError(QklabError, RuntimeError):
    """The dual solver ran out of iterations.

    ``solution`` holds the best iterate (box and equality constraints hold),
    ``kkt_violation`` its maximal pair violation.
    """

    def __init__(self, message, solution=None, kkt_violation=None):
        super().__init__(message)
        self.solution = solution
        self.kkt_violation = kkt_violation


class InvariantViolation(QklabError, AssertionError):
    """An invariant checked at run time does not hold."""
