"""Core modules for rmchannel."""

from .errors import (
    RMChannelError,
    NumericError,
    ConfigError,
    InvalidDimensionError,
    NumericInputError,
    DimensionMismatchError,
    NormalizationError,
    UnsupportedDimensionError,
    InvalidIndexError,
    InsufficientSamplesError,
    AccuracyError,
    HorizonError,
)

from .formatter import (
    console,
    print_banner,
    print_error,
    print_warning,
    print_success,
    print_info,
    print_measure_table,
    set_no_color,
    setup_logging,
    LoadingSpinner,
)

__all__ = [
    # Errors
    "RMChannelError",
    "NumericError",
    "ConfigError",
    "InvalidDimensionError",
    "NumericInputError",
    "DimensionMismatchError",
    "NormalizationError",
    "UnsupportedDimensionError",
    "InvalidIndexError",
    "InsufficientSamplesError",
    "AccuracyError",
    "HorizonError",
    # Formatter
    "console",
    "print_banner",
    "print_error",
    "print_warning",
    "print_success",
    "print_info",
    "print_measure_table",
    "set_no_color",
    "setup_logging",
    "LoadingSpinner",
]
