"""Exception types shared across the package."""


class AgmeanError(Exception):
    """Base class for all package errors."""


class DimMismatch(AgmeanError):
    """Operands have incompatible dimensions."""


class NonPositiveSpectrum(AgmeanError):
    """A matrix required to be positive definite is not."""


class ConvergenceFailure(AgmeanError):
    """An iterative eigensolver failed to converge."""


class GenerationFailure(AgmeanError):
    """Random generation could not meet its constraints within the retry budget."""


class InvalidR(AgmeanError):
    """The exponent r is outside the range an operation supports."""


class ScanBracketFailure(AgmeanError):
    """The one-dimensional scale scan hit its bracket boundary."""


class RankError(AgmeanError):
    """A projection has a rank the operation cannot work with."""


class PartitionMismatch(AgmeanError):
    """A spectral partition does not reduce the matrix it is used with."""


class ConfigError(AgmeanError):
    """An experiment configuration is internally inconsistent."""
