"""Exception hierarchy. Every input/config error derives from ``StructNetError``."""


class StructNetError(ValueError):
    pass


class MissingValue(StructNetError):
    pass


class DuplicateFeatureName(StructNetError):
    pass


class TargetNotFound(StructNetError):
    pass


class TooFewSamples(StructNetError):
    pass


class InvalidDistribution(StructNetError):
    pass


class LengthMismatch(StructNetError):
    pass


class VertexCountMismatch(StructNetError):
    pass


class NotPositiveDefinite(StructNetError):
    pass


class ClassTooSmall(StructNetError):
    pass


class EmptySubset(StructNetError):
    pass


class InvalidKList(StructNetError):
    pass


class MaxIterationsExceeded(RuntimeWarning):
    """Issued (as a warning) when ADMM stops at ``max_iter`` without converging."""
