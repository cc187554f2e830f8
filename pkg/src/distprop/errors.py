"""Exception types raised across the package."""


class DistPropError(Exception):
    """Base class for computation errors (CLI exit status 1)."""


class DomainError(DistPropError, ValueError):
    """Argument outside the domain of a function."""


class ConvergenceError(DistPropError, RuntimeError):
    """Iterative routine failed to converge.

    ``last`` holds the final iterate so callers can inspect how far it got.
    """

    def __init__(self, message, last=None):
        super().__init__(message)
        self.last = last


class SupportError(DistPropError, ValueError):
    """A distributional proportion is numerically 0 or 1."""


class RankError(DistPropError, ValueError):
    """Design matrix is rank deficient."""

    def __init__(self, message, column=None):
        super().__init__(message)
        self.column = column
