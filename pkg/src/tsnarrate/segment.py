"""Piecewise-linear approximation of a time series.

Three segmentation algorithms (greedy sliding window, bottom-up merging, and
the buffered SWAB hybrid) share one error criterion: the residual SSE of the
least-squares line over each segment, kept within a per-segment budget.

Segments tile the index range without gaps or overlap: segment i+1 begins on
the index right after segment i ends. Every segment covers at least two
points. Output is deterministic; ties always resolve leftmost.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .errors import (
    BufferTooSmall,
    DegenerateSpan,
    IndexOutOfRange,
    InvalidK,
    MismatchedLength,
    NonPositiveThreshold,
    SeriesTooLong,
)
from .ingest import TimeSeries

FLAT_BAND = 1e-3
ORACLE_MAX_N = 64


def classify_direction(slope: float) -> str:
    """Direction label under the flat dead-band |slope| < 1e-3 per index step."""
    if abs(slope) < FLAT_BAND:
        return "flat"
    return "increasing" if slope > 0 else "decreasing"


@dataclass(frozen=True)
class Segment:
    start_index: int
    end_index: int
    slope: float
    intercept: float
    sse: float
    direction: str


@dataclass(frozen=True)
class SegmentationResult:
    segments: tuple
    algorithm: str
    max_error: float
    total_sse: float
    r_squared: float

    @property
    def k(self) -> int:
        return len(self.segments)


def fit_line(ts: TimeSeries, start: int, end: int):
    """Least-squares line of value against integer index over [start, end].

    Returns (slope, intercept, sse); the intercept is in global index
    coordinates, so the fitted value at index t is slope*t + intercept.
    """
    if start == end:
        raise DegenerateSpan(f"span [{start}, {end}] has a single point")
    if not (0 <= start < end < ts.n):
        raise IndexOutOfRange(f"span [{start}, {end}] outside [0, {ts.n - 1}]")
    cy, cyy, cty = kernels.fit_prefix(ts.values)
    slope, intercept, sse = kernels.fit_span(cy, cyy, cty, start, end)
    return float(slope), float(intercept), float(sse)


def _prepare(ts: TimeSeries, max_error: float):
    if max_error <= 0:
        raise NonPositiveThreshold(f"max_error must be positive, got {max_error}")
    if not ts.is_regular():
        warnings.warn(
            "timestamps are irregularly spaced; fits use integer index positions",
            stacklevel=3,
        )
    return kernels.fit_prefix(ts.values)


def _build_result(ts, ends, algorithm, max_error, prefix) -> SegmentationResult:
    cy, cyy, cty = prefix
    segments = []
    start = 0
    for end in (int(e) for e in ends):
        slope, intercept, sse = kernels.fit_span(cy, cyy, cty, start, end)
        segments.append(
            Segment(start, end, float(slope), float(intercept), float(sse),
                    classify_direction(float(slope)))
        )
        start = end + 1
    result = SegmentationResult(tuple(segments), algorithm, max_error, 0.0, 0.0)
    total, r2 = goodness(result, ts)
    return replace(result, total_sse=total, r_squared=r2)


def sliding_window(ts: TimeSeries, max_error: float) -> SegmentationResult:
    """Greedy left-to-right segmentation.

    Each segment is the longest prefix extension whose fit SSE stays within
    the budget; the next window starts from the following data point.
    """
    prefix = _prepare(ts, max_error)
    ends = kernels.sliding_ends(*prefix, ts.n, max_error)
    return _build_result(ts, ends, "sliding_window", max_error, prefix)


def bottom_up(ts: TimeSeries, max_error: float) -> SegmentationResult:
    """Merge adjacent segments cheapest-first, starting from two-point pieces.

    The merge cost is the SSE of the refit line over the union; merging stops
    before any merge would push that SSE above the budget.
    """
    prefix = _prepare(ts, max_error)
    ends = kernels.bottom_up_ends(*prefix, 0, ts.n - 1, max_error)
    return _build_result(ts, ends, "bottom_up", max_error, prefix)


def default_buffer_len(n: int) -> int:
    """SWAB buffer default: ceil(n/8) clamped to [8, 256] and at most n."""
    return min(n, min(256, max(8, -(-n // 8))))


def swab(ts: TimeSeries, max_error: float, buffer_len: int | None = None) -> SegmentationResult:
    """Sliding-Window-And-Bottom-up: bottom-up over a streaming buffer.

    The first bottom-up segment of the buffer is emitted and its points
    removed; fresh points stream in until their linear fit reaches the error
    budget. A buffer that still fits a single line keeps growing instead of
    emitting, so a perfectly linear series yields one segment.
    """
    if buffer_len is None:
        buffer_len = default_buffer_len(ts.n)
    buffer_len = min(buffer_len, ts.n)
    if buffer_len < 4:
        raise BufferTooSmall(f"buffer_len must be at least 4, got {buffer_len}")
    prefix = _prepare(ts, max_error)
    ends = kernels.swab_ends(*prefix, ts.n, max_error, buffer_len)
    return _build_result(ts, ends, "swab", max_error, prefix)


def consolidate(result: SegmentationResult, ts: TimeSeries) -> SegmentationResult:
    """Merge adjacent segments that share a direction, repeated to fixpoint.

    Merged spans are refit from scratch; the output alternates direction.
    """
    prefix = kernels.fit_prefix(ts.values)
    cy, cyy, cty = prefix
    segments = list(result.segments)
    changed = True
    while changed:
        changed = False
        for i in range(len(segments) - 1):
            if segments[i].direction != segments[i + 1].direction:
                continue
            start = segments[i].start_index
            end = segments[i + 1].end_index
            slope, intercept, sse = kernels.fit_span(cy, cyy, cty, start, end)
            segments[i : i + 2] = [
                Segment(start, end, float(slope), float(intercept), float(sse),
                        classify_direction(float(slope)))
            ]
            changed = True
            break
    merged = SegmentationResult(
        tuple(segments), result.algorithm, result.max_error, 0.0, 0.0
    )
    total, r2 = goodness(merged, ts)
    return replace(merged, total_sse=total, r_squared=r2)


def goodness(result: SegmentationResult, ts: TimeSeries):
    """Total SSE across segments and r-squared against the series mean.

    r_squared = 1 - total_sse / SST, clamped below at zero. A constant series
    (SST == 0) scores 1 when the fit is exact and 0 otherwise.
    """
    _check_tiling(result.segments, ts.n)
    total = float(sum(seg.sse for seg in result.segments))
    sst = float(np.sum((ts.values - ts.values.mean()) ** 2))
    if sst == 0.0:
        r2 = 1.0 if total == 0.0 else 0.0
    else:
        r2 = max(0.0, 1.0 - total / sst)
    return total, r2


def _check_tiling(segments, n: int) -> None:
    if not segments:
        raise MismatchedLength("segmentation has no segments")
    if segments[0].start_index != 0 or segments[-1].end_index != n - 1:
        raise MismatchedLength(
            f"segments cover [{segments[0].start_index}, {segments[-1].end_index}], "
            f"series is [0, {n - 1}]"
        )
    for prev, cur in zip(segments, segments[1:]):
        if cur.start_index != prev.end_index + 1:
            raise MismatchedLength(
                f"gap or overlap between segment ending {prev.end_index} "
                f"and segment starting {cur.start_index}"
            )


def optimal_segmentation_oracle(ts: TimeSeries, k: int) -> SegmentationResult:
    """Globally SSE-minimal k-segmentation by dynamic programming.

    Test and benchmark oracle only; quadratic table size caps the series
    length at 64. Ties resolve to the leftmost cut.
    """
    if ts.n > ORACLE_MAX_N:
        raise SeriesTooLong(f"oracle accepts N <= {ORACLE_MAX_N}, got {ts.n}")
    if not (1 <= k <= ts.n // 2):
        raise InvalidK(f"k must be in [1, {ts.n // 2}], got {k}")
    prefix = kernels.fit_prefix(ts.values)
    best, back = kernels.dp_fill(*prefix, ts.n, k)
    if not np.isfinite(best[k - 1, ts.n - 1]):
        raise InvalidK(f"no feasible {k}-segmentation of {ts.n} points")
    ends = [ts.n - 1]
    e = ts.n - 1
    for j in range(k - 1, 0, -1):
        s = int(back[j, e])
        e = s - 1
        ends.append(e)
    ends.reverse()
    return _build_result(ts, ends, "dp_oracle", float("inf"), prefix)
