"""Exception types raised across the pipeline.

Every error carries a ``module`` tag naming the pipeline stage it belongs to,
so the CLI can report provenance without inspecting tracebacks.
"""


class NarrationError(Exception):
    """Base class for all pipeline errors."""

    module = "tsnarrate"


class InvalidK(NarrationError):
    """Bad segment count (segmentation oracle) or truncation size (decoding)."""


# ingest ---------------------------------------------------------------------

class IngestError(NarrationError):
    module = "ingest"


class MissingColumn(IngestError):
    pass


class NonMonotonicTime(IngestError):
    pass


class EmptySeries(IngestError):
    pass


class UnparseableValue(IngestError):
    pass


class NegativeValue(IngestError):
    pass


# segment --------------------------------------------------------------------

class SegmentError(NarrationError):
    module = "segment"


class IndexOutOfRange(SegmentError):
    pass


class DegenerateSpan(SegmentError):
    pass


class NonPositiveThreshold(SegmentError):
    pass


class BufferTooSmall(SegmentError):
    pass


class MismatchedLength(SegmentError):
    pass


class SeriesTooLong(SegmentError):
    pass


# regime ---------------------------------------------------------------------

class RegimeError(NarrationError):
    module = "regime"


class WindowTooLarge(RegimeError):
    pass


class WindowTooSmall(RegimeError):
    pass


class TooManyRegimes(RegimeError):
    pass


class InvalidCount(RegimeError):
    pass


class MismatchedTiling(RegimeError):
    pass


# features -------------------------------------------------------------------

class FeatureError(NarrationError):
    module = "features"


class SeriesTooShort(FeatureError):
    pass


# kg -------------------------------------------------------------------------

class GraphError(NarrationError):
    module = "kg"


class InconsistentInputs(GraphError):
    pass


class ReservedMarkerInField(GraphError):
    pass


class MalformedMarkerSequence(GraphError):
    pass


# decode ---------------------------------------------------------------------

class DecodeError(NarrationError):
    module = "decode"


class InvalidDistribution(DecodeError):
    pass


class InvalidP(DecodeError):
    pass


class LengthMismatch(DecodeError):
    pass


# narrate --------------------------------------------------------------------

class NarrateError(NarrationError):
    module = "narrate"


class NonFiniteValue(NarrateError):
    pass


class UncoveredRelation(NarrateError):
    pass


class BackendUnreachable(NarrateError):
    pass


class BackendError(NarrateError):
    """Backend answered with an error status; carries (status, message)."""

    def __init__(self, status: int, message: str):
        super().__init__(f"backend returned {status}: {message}")
        self.status = status
        self.message = message


class Timeout(NarrateError):
    pass


class ContractViolation(NarrateError):
    pass


# metrics --------------------------------------------------------------------

class MetricsError(NarrationError):
    module = "metrics"


class EmptyText(MetricsError):
    pass
