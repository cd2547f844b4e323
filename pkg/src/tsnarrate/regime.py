"""Matrix-profile computation and regime-shift extraction.

The matrix profile records, for every length-m sub-sequence, the z-normalized
Euclidean distance to its nearest neighbor outside an exclusion zone of
ceil(m/4) positions. Regime boundaries come from the corrected arc curve:
nearest-neighbor arcs rarely cross structural boundaries, so normalized
crossing counts dip there.

Constant sub-sequences have no defined z-normalization; their normalized form
is taken to be the all-zeros vector, so two constant windows are at distance
zero and a constant/non-constant pair is at distance sqrt(m).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import (
    InvalidCount,
    MismatchedTiling,
    TooManyRegimes,
    WindowTooLarge,
    WindowTooSmall,
)
from .ingest import TimeSeries


@dataclass(frozen=True)
class MatrixProfile:
    window: int
    exclusion: int
    distances: np.ndarray
    neighbor_index: np.ndarray

    def __post_init__(self):
        self.distances.flags.writeable = False
        self.neighbor_index.flags.writeable = False


@dataclass(frozen=True)
class Regime:
    start_index: int
    end_index: int
    mean: float
    std: float


def default_window(n: int) -> int:
    """Profile window default: ceil(n/20) clamped to [4, 128] and to n//2."""
    return min(n // 2, min(128, max(4, -(-n // 20))))


def matrix_profile(ts: TimeSeries, window: int, force_numpy: bool = False) -> MatrixProfile:
    """Self-join matrix profile of the series values.

    Matches the naive all-pairs computation to within 1e-9; shift and scale
    of the input leave the result unchanged to the same tolerance.
    """
    if window < 3:
        raise WindowTooSmall(f"window must be at least 3, got {window}")
    if window > ts.n // 2:
        raise WindowTooLarge(f"window {window} exceeds half the series length {ts.n}")
    excl = math.ceil(window / 4)
    distances, neighbors = kernels.matrix_profile_kernel(
        ts.values, window, excl, force_numpy=force_numpy
    )
    return MatrixProfile(window, excl, distances, neighbors)


def corrected_arc_curve(mp: MatrixProfile) -> np.ndarray:
    """Arc crossings per position, normalized by the idealized parabola.

    Values are capped at 1; a guard band of one window width at each edge is
    pinned to 1 so edge artifacts never read as boundaries.
    """
    p = mp.distances.size
    diff = np.zeros(p + 1)
    idx = np.arange(p)
    lo = np.minimum(idx, mp.neighbor_index)
    hi = np.maximum(idx, mp.neighbor_index)
    np.add.at(diff, lo + 1, 1.0)
    np.add.at(diff, hi, -1.0)
    crossings = np.cumsum(diff[:p])
    positions = idx.astype(np.float64)
    ideal = 2.0 * positions * (p - 1 - positions) / max(p - 1, 1)
    cac = np.minimum(crossings / np.maximum(ideal, 1e-12), 1.0)
    guard = min(mp.window, p)
    cac[:guard] = 1.0
    cac[p - guard :] = 1.0
    return cac


def _pick_boundaries(
    cac: np.ndarray, window: int, wanted: int, allow_flat: bool = False
) -> list[int]:
    # ascending by curve value, then by position; interior positions only
    order = np.lexsort((np.arange(cac.size), cac))
    chosen: list[int] = []
    for q in order:
        q = int(q)
        if cac[q] >= 1.0 and not allow_flat:
            break
        if q < window or q > cac.size - 1 - window:
            continue
        if all(abs(q - c) >= window for c in chosen):
            chosen.append(q)
            if len(chosen) == wanted:
                break
    return sorted(chosen)


def detect_regimes(ts: TimeSeries, mp: MatrixProfile, n_regimes: int) -> list[Regime]:
    """Split the series into exactly n_regimes contiguous regimes.

    Boundaries sit on the n_regimes-1 lowest corrected-arc-curve minima,
    kept at least one window width apart. Raises rather than returning
    fewer regimes than requested.
    """
    if n_regimes < 1:
        raise InvalidCount(f"n_regimes must be at least 1, got {n_regimes}")
    if n_regimes == 1:
        return [_regime(ts, 0, ts.n - 1)]
    if ts.n < 2 * mp.window * n_regimes:
        raise TooManyRegimes(
            f"series of length {ts.n} too short for {n_regimes} regimes "
            f"at window {mp.window}"
        )
    cac = corrected_arc_curve(mp)
    # low minima first; featureless (all-ones) stretches fill remaining slots
    # so a forced count is honored whenever the series has room
    picks = _pick_boundaries(cac, mp.window, n_regimes - 1, allow_flat=True)
    if len(picks) < n_regimes - 1:
        raise TooManyRegimes(
            f"only {len(picks) + 1} regimes separable at window {mp.window}"
        )
    # the arc-curve dip sits where straddling windows start; anchor the
    # boundary at the window center instead
    boundaries = [min(p + mp.window // 2, ts.n - 2) for p in picks]
    regimes = []
    start = 0
    for b in boundaries:
        regimes.append(_regime(ts, start, b))
        start = b + 1
    regimes.append(_regime(ts, start, ts.n - 1))
    return regimes


def _regime(ts: TimeSeries, start: int, end: int) -> Regime:
    chunk = ts.values[start : end + 1]
    return Regime(start, end, float(np.mean(chunk)), float(np.std(chunk, ddof=1)))


def regime_sigma(regimes: list[Regime], ts: TimeSeries) -> float:
    """Unweighted mean of the per-regime sample standard deviations."""
    if not regimes or regimes[0].start_index != 0 or regimes[-1].end_index != ts.n - 1:
        raise MismatchedTiling("regimes do not cover the series")
    for prev, cur in zip(regimes, regimes[1:]):
        if cur.start_index != prev.end_index + 1:
            raise MismatchedTiling(
                f"gap or overlap between regime ending {prev.end_index} "
                f"and regime starting {cur.start_index}"
            )
    stds = [float(np.std(ts.values[r.start_index : r.end_index + 1], ddof=1)) for r in regimes]
    return float(np.mean(stds))


def auto_regime_count(ts: TimeSeries, mp: MatrixProfile, max_regimes: int = 5) -> int:
    """Heuristic regime count: deep corrected-arc-curve minima plus one.

    A minimum counts as a boundary candidate when it falls below 0.45 of the
    curve's median, so flat or featureless curves yield a single regime.
    """
    cac = corrected_arc_curve(mp)
    interior = cac[cac < 1.0]
    feasible = max(1, ts.n // (2 * mp.window))
    cap = min(max_regimes, feasible)
    if interior.size == 0 or cap == 1:
        return 1
    threshold = 0.45 * float(np.median(cac))
    candidates = _pick_boundaries(cac, mp.window, cap - 1)
    deep = [q for q in candidates if cac[q] < threshold]
    return len(deep) + 1
