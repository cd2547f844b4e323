import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import make_series
from tsnarrate import features
from tsnarrate.errors import SeriesTooShort


def prominence_by_definition(values, index):
    """Walk outward until strictly higher ground (or the edge) on each side;
    the prominence is the peak height minus the higher of the two valley
    floors. Equal-height terrain does not stop the walk."""
    values = np.asarray(values, dtype=float)
    height = values[index]
    floors = []
    for step in (-1, 1):
        floor = height
        pos = index + step
        while 0 <= pos < values.size and values[pos] <= height:
            floor = min(floor, values[pos])
            pos += step
        floors.append(floor)
    return height - max(floors)


class TestDetectPeaks:
    def test_toy_series_ranked_by_prominence(self, mkts):
        ts = mkts([0.0, 3, 0, 5, 0])
        peaks = features.detect_peaks(ts, min_prominence=1.0)
        assert [(p.index, p.prominence) for p in peaks] == [(3, 5.0), (1, 3.0)]

    def test_monotone_series_has_no_peaks(self, mkts):
        assert features.detect_peaks(mkts(list(np.arange(10.0)))) == []

    def test_constant_series_has_no_peaks(self, mkts):
        assert features.detect_peaks(mkts([2.0] * 10)) == []

    def test_too_short(self, mkts):
        with pytest.raises(SeriesTooShort):
            features.detect_peaks(mkts([1.0, 2.0]))

    def test_max_peaks_cap(self, mkts):
        ts = mkts([0.0, 9, 0, 8, 0, 7, 0, 6, 0])
        peaks = features.detect_peaks(ts, min_prominence=0.5, max_peaks=2)
        assert [p.index for p in peaks] == [1, 3]

    def test_tie_broken_by_earlier_index(self, mkts):
        ts = mkts([0.0, 4, 0, 4, 0])
        peaks = features.detect_peaks(ts, min_prominence=0.5)
        assert [p.index for p in peaks] == [1, 3]

    @given(st.lists(st.integers(-50, 50), min_size=3, max_size=40))
    @settings(max_examples=100, deadline=None)
    def test_strictness_and_prominence_match_definition(self, raw):
        ts = make_series([float(v) for v in raw])
        peaks = features.detect_peaks(ts, min_prominence=0.0, max_peaks=100)
        v = ts.values
        for peak in peaks:
            i = peak.index
            assert v[i] > v[i - 1] and v[i] > v[i + 1]
            assert peak.value == v[i]
            assert peak.prominence == pytest.approx(
                prominence_by_definition(v, i), abs=1e-9
            )
        proms = [p.prominence for p in peaks]
        assert proms == sorted(proms, reverse=True)

    @given(st.lists(st.integers(-30, 30), min_size=3, max_size=25))
    @settings(max_examples=60, deadline=None)
    def test_mirror_symmetry(self, half):
        values = [float(v) for v in half]
        palindrome = values + values[::-1]
        ts = make_series(palindrome)
        peaks = features.detect_peaks(ts, min_prominence=0.0, max_peaks=100)
        n = len(palindrome)
        mirrored = sorted(n - 1 - p.index for p in peaks)
        assert mirrored == sorted(p.index for p in peaks)


class TestGlobalExtrema:
    def test_tie_takes_earliest(self, mkts):
        high, low = features.global_extrema(mkts([1.0, 9, 9, 2]))
        assert (high.index, high.value) == (1, 9.0)
        assert (low.index, low.value) == (0, 1.0)

    def test_constant_series(self, mkts):
        high, low = features.global_extrema(mkts([4.0] * 5))
        assert high.value == low.value == 4.0
        assert high.index == low.index == 0

    def test_covid_fixture_matches_linear_scan(self, us_covid):
        high, low = features.global_extrema(us_covid)
        values = list(us_covid.values)
        assert high.value == max(values)
        assert high.index == values.index(max(values))
        assert low.value == min(values)
