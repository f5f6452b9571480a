"""Exception hierarchy shared across the package."""


class CpscoresError(ValueError):
    """Base class for all errors raised by this package."""


class StructuralError(CpscoresError):
    """Dimension, label, or alignment mismatch between inputs."""


class ModelError(CpscoresError):
    """A model is internally inconsistent or implies a degenerate structure."""


class NearSingularError(CpscoresError):
    """A matrix required to be positive definite is singular or nearly so."""


class DataError(CpscoresError):
    """Observed data or score matrices violate a precondition."""
