"""AGI technology index from macro time series, with OLS inference."""

from agi_growth.errors import (
    AgiGrowthError,
    ConfigError,
    ConvergenceError,
    DataError,
    DomainError,
)

__version__ = "0.1.0"

__all__ = [
    "AgiGrowthError",
    "ConfigError",
    "ConvergenceError",
    "DataError",
    "DomainError",
    "__version__",
]
