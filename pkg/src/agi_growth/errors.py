"""Exception hierarchy.

Input problems (bad files, bad config, bad series) derive from ``ValueError``
through :class:`DataError`; numerical problems (arguments outside a function's
domain, non-converging kernels) are separate so the CLI can map them to
distinct exit codes.
"""


class AgiGrowthError(Exception):
    """Base class for all errors raised by this package."""


class DataError(AgiGrowthError, ValueError):
    """Malformed, missing or inconsistent input data."""


class ConfigError(DataError):
    """Invalid pipeline configuration document."""


class DomainError(AgiGrowthError, ArithmeticError):
    """A numeric argument lies outside the domain of the function."""


class ConvergenceError(AgiGrowthError, ArithmeticError):
    """An iterative numerical kernel failed to converge."""
