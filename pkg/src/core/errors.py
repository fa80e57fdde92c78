"""Exception hierarchy for rmchannel.

Every numerical failure is a :class:`NumericError` (CLI exit code 3);
configuration problems are :class:`ConfigError` (CLI exit code 2).
"""


class RMChannelError(Exception):
    """Base exception for all rmchannel errors."""
    exit_code = 1


class NumericError(RMChannelError):
    """Raised when a computation cannot produce a trustworthy number."""
    exit_code = 3


class InvalidDimensionError(NumericError):
    """Raised for a matrix dimension of zero or below."""
    pass


class NumericInputError(NumericError):
    """Raised when an input array contains NaN or infinite entries."""
    pass


class DimensionMismatchError(NumericError):
    """Raised when two operands do not have compatible dimensions."""
    pass


class NormalizationError(NumericError):
    """Raised when a state is not a unit-trace density matrix."""
    pass


class UnsupportedDimensionError(NumericError):
    """Raised when a closed-form expression has a pole at the given N."""
    pass


class InvalidIndexError(NumericError):
    """Raised for a negative Hermite index."""
    pass


class InsufficientSamplesError(NumericError):
    """Raised when too few samples are requested for an error estimate."""
    pass


class AccuracyError(NumericError):
    """Raised when quadrature refinement does not converge."""
    pass


class HorizonError(NumericError):
    """Raised when the integration horizon leaves too large a tail."""
    pass


class ConfigError(RMChannelError):
    """Raised for invalid experiment configuration."""
    exit_code = 2
