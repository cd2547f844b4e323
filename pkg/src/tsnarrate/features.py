"""Peak detection and global extrema for narration.

Peaks are strict local maxima of the raw series ranked by topographic
prominence, so narrated values match source units. Troughs are not first
class; negate the series to find them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import peak_prominences

from .errors import EmptySeries, SeriesTooShort
from .ingest import TimeSeries


@dataclass(frozen=True)
class Peak:
    index: int
    timestamp: object
    value: float
    prominence: float


@dataclass(frozen=True)
class SeriesPoint:
    index: int
    timestamp: object
    value: float


def detect_peaks(
    ts: TimeSeries,
    min_prominence: float | None = None,
    max_peaks: int = 3,
) -> list[Peak]:
    """Strict local maxima ranked by prominence, descending.

    ``min_prominence`` defaults to 5% of the value range. At most
    ``max_peaks`` peaks are returned; ties rank the earlier index first.
    """
    if ts.n < 3:
        raise SeriesTooShort(f"peak detection needs at least 3 points, got {ts.n}")
    if max_peaks < 1:
        raise SeriesTooShort(f"max_peaks must be at least 1, got {max_peaks}")
    v = ts.values
    if min_prominence is None:
        min_prominence = 0.05 * float(v.max() - v.min())
    interior = np.arange(1, ts.n - 1)
    strict = interior[(v[interior] > v[interior - 1]) & (v[interior] > v[interior + 1])]
    if strict.size == 0:
        return []
    prominences = peak_prominences(v, strict)[0]
    ranked = sorted(zip(strict, prominences), key=lambda item: (-item[1], item[0]))
    peaks = [
        Peak(int(i), ts.timestamps[int(i)], float(v[int(i)]), float(p))
        for i, p in ranked
        if p >= min_prominence
    ]
    return peaks[:max_peaks]


def global_extrema(ts: TimeSeries):
    """Earliest-index maximum and minimum of the raw values."""
    if ts.n < 1:
        raise EmptySeries("extrema need at least one observation")
    imax = int(np.argmax(ts.values))
    imin = int(np.argmin(ts.values))
    return (
        SeriesPoint(imax, ts.timestamps[imax], float(ts.values[imax])),
        SeriesPoint(imin, ts.timestamps[imin], float(ts.values[imin])),
    )
