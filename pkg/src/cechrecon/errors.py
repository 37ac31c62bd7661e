"""Exception hierarchy.

Everything raised on bad input derives from :class:`ValidationError`; the CLI
maps those to exit status 2.
"""


class CechError(Exception):
    """Base class for all package errors."""


class ValidationError(CechError, ValueError):
    """Input or hypothesis rejected."""


class MetricError(ValidationError):
    """Distance matrix violates the metric-space invariants."""


class ParseError(ValidationError):
    pass


class EmptySample(ValidationError):
    pass


class NotASubset(ValidationError):
    pass


class EmptyWitnessSet(ValidationError):
    pass


class EmptyInput(ValidationError):
    pass


class CapTooLargeForMemory(ValidationError):
    pass


class InsufficientDimCap(ValidationError):
    pass


class VertexMapNotTotal(ValidationError):
    pass


class SourceTargetMismatch(ValidationError):
    pass


class EpsilonTooSmall(ValidationError):
    pass


class DensityTooLow(ValidationError):
    pass


class AlphaOutOfRange(ValidationError):
    pass


class EpsilonOutOfRange(ValidationError):
    pass


class QTooSmall(ValidationError):
    pass
