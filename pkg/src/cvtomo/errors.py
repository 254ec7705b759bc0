"""Exception hierarchy shared across the package."""


class TomographyError(Exception):
    """Base class for all cvtomo errors."""


class DomainError(TomographyError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class DimensionMismatchError(TomographyError, ValueError):
    """Operands live in incompatible Hilbert spaces."""


class TruncationError(TomographyError, RuntimeError):
    """The Fock cutoff is too small to represent the requested object."""


class DegenerateDataError(TomographyError, ValueError):
    """A dataset or problem carries no usable information."""


class CompletenessError(TomographyError, ValueError):
    """A measurement family violates the operator-sum bound."""


class AccuracyError(TomographyError, ValueError):
    """A grid or discretization is too coarse for the requested result."""


class ConfigError(TomographyError, ValueError):
    """A run configuration is invalid."""
