import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import make_series
from tsnarrate import kernels, segment
from tsnarrate.errors import (
    BufferTooSmall,
    DegenerateSpan,
    IndexOutOfRange,
    InvalidK,
    NonPositiveThreshold,
    SeriesTooLong,
)
from tsnarrate.ingest import log_transform

ALL_ALGORITHMS = [segment.sliding_window, segment.bottom_up, segment.swab]

series_strategy = st.lists(
    st.floats(min_value=-1e3, max_value=1e3, allow_nan=False),
    min_size=4, max_size=48,
)


def spans(result):
    return [(s.start_index, s.end_index) for s in result.segments]


def exhaustive_two_split(ts):
    """Oracle: best 2-segmentation by trying every cut, leftmost tie."""
    best = (np.inf, None)
    for c in range(1, ts.n - 2):
        sse = segment.fit_line(ts, 0, c)[2] + segment.fit_line(ts, c + 1, ts.n - 1)[2]
        if sse < best[0]:
            best = (sse, c)
    return best


class TestFitLine:
    def test_exact_line(self, mkts):
        slope, intercept, sse = segment.fit_line(mkts([0.0, 1, 2, 3]), 0, 3)
        assert (slope, intercept, sse) == (1.0, 0.0, 0.0)

    def test_closed_form_vee(self, mkts):
        slope, intercept, sse = segment.fit_line(mkts([0.0, 2, 0]), 0, 2)
        assert slope == pytest.approx(0.0, abs=1e-12)
        assert intercept == pytest.approx(2 / 3)
        assert sse == pytest.approx(8 / 3)

    def test_constant_pair(self, mkts):
        slope, intercept, sse = segment.fit_line(mkts([5.0, 5.0]), 0, 1)
        assert (slope, intercept, sse) == (0.0, 5.0, 0.0)

    def test_degenerate_span(self, mkts):
        with pytest.raises(DegenerateSpan):
            segment.fit_line(mkts([1.0, 2, 3]), 1, 1)

    def test_out_of_range(self, mkts):
        with pytest.raises(IndexOutOfRange):
            segment.fit_line(mkts([1.0, 2, 3]), 0, 3)

    @given(series_strategy, st.data())
    @settings(max_examples=60, deadline=None)
    def test_matches_polyfit(self, values, data):
        ts = make_series(values)
        start = data.draw(st.integers(0, ts.n - 2))
        end = data.draw(st.integers(start + 1, ts.n - 1))
        slope, intercept, sse = segment.fit_line(ts, start, end)
        x = np.arange(start, end + 1, dtype=float)
        y = ts.values[start : end + 1]
        coeffs = np.polyfit(x, y, 1)
        residuals = y - np.polyval(coeffs, x)
        assert slope == pytest.approx(coeffs[0], abs=1e-7)
        assert intercept == pytest.approx(coeffs[1], abs=1e-6)
        assert sse == pytest.approx(float(np.sum(residuals**2)), abs=1e-6)


class TestSlidingWindow:
    def test_perfect_line_single_segment(self, mkts):
        result = segment.sliding_window(mkts(list(np.arange(30.0))), 0.5)
        assert spans(result) == [(0, 29)]
        assert result.total_sse == 0.0

    def test_split_at_jump(self, mkts):
        ts = mkts([0.0, 1, 2, 3, 10, 11, 12, 13])
        result = segment.sliding_window(ts, 0.5)
        assert spans(result) == [(0, 3), (4, 7)]
        # the greedy alternative that swallows the jump would blow the budget
        assert segment.fit_line(ts, 0, 4)[2] > 0.5

    def test_non_positive_threshold(self, mkts):
        with pytest.raises(NonPositiveThreshold):
            segment.sliding_window(mkts([1.0, 2, 3]), 0.0)


class TestBottomUp:
    def test_constant_series_single_segment(self, mkts):
        result = segment.bottom_up(mkts([4.0] * 17), 0.1)
        assert spans(result) == [(0, 16)]

    def test_vee_matches_exhaustive_split(self, mkts):
        ts = mkts([4.0, 3, 2, 1, 0, 1, 2, 3, 4])
        result = segment.bottom_up(ts, 0.1)
        oracle_sse, oracle_cut = exhaustive_two_split(ts)
        assert spans(result) == [(0, oracle_cut), (oracle_cut + 1, 8)]
        assert result.total_sse == pytest.approx(oracle_sse, abs=1e-12)
        assert result.segments[1].start_index == 4


class TestSwab:
    def test_perfect_line_single_segment(self, mkts):
        result = segment.swab(mkts(list(np.arange(120.0))), 0.5)
        assert spans(result) == [(0, 119)]

    def test_three_slope_recovery(self, mkts):
        values = (list(np.arange(40.0)) + [39.0] * 40
                  + list(39.0 - np.arange(1.0, 41.0)))
        result = segment.swab(mkts(values), 0.1)
        assert spans(result) == [(0, 39), (40, 79), (80, 119)]

    def test_three_slope_matches_dp_oracle(self, mkts):
        values = (list(np.arange(20.0)) + [19.0] * 20
                  + list(19.0 - np.arange(1.0, 21.0)))
        ts = mkts(values)
        result = segment.swab(ts, 0.1)
        oracle = segment.optimal_segmentation_oracle(ts, result.k)
        assert result.total_sse == pytest.approx(oracle.total_sse, abs=1e-9)

    def test_buffer_too_small(self, mkts):
        with pytest.raises(BufferTooSmall):
            segment.swab(mkts(list(np.arange(20.0))), 1.0, buffer_len=3)


class TestOracle:
    def test_linear_k1(self, mkts):
        result = segment.optimal_segmentation_oracle(mkts(list(np.arange(16.0))), 1)
        assert result.total_sse == 0.0

    def test_step_boundary(self, mkts):
        ts = mkts([0.0] * 8 + [10.0] * 8)
        result = segment.optimal_segmentation_oracle(ts, 2)
        assert spans(result) == [(0, 7), (8, 15)]
        assert result.total_sse == 0.0

    def test_series_too_long(self, mkts):
        with pytest.raises(SeriesTooLong):
            segment.optimal_segmentation_oracle(mkts([0.0] * 65), 2)

    def test_invalid_k(self, mkts):
        with pytest.raises(InvalidK):
            segment.optimal_segmentation_oracle(mkts([0.0] * 10), 6)

    @given(st.lists(st.floats(-100, 100, allow_nan=False), min_size=6, max_size=20))
    @settings(max_examples=40, deadline=None)
    def test_k2_matches_exhaustive_split(self, values):
        ts = make_series(values)
        result = segment.optimal_segmentation_oracle(ts, 2)
        oracle_sse, _ = exhaustive_two_split(ts)
        assert result.total_sse == pytest.approx(oracle_sse, abs=1e-9)


class TestInvariants:
    @given(series_strategy, st.floats(0.01, 50.0))
    @settings(max_examples=80, deadline=None)
    def test_tiling(self, values, budget):
        ts = make_series(values)
        for algorithm in ALL_ALGORITHMS:
            result = algorithm(ts, budget)
            assert result.segments[0].start_index == 0
            assert result.segments[-1].end_index == ts.n - 1
            for prev, cur in zip(result.segments, result.segments[1:]):
                assert cur.start_index == prev.end_index + 1
            for seg in result.segments:
                assert seg.end_index > seg.start_index
                assert seg.sse >= 0.0

    @given(series_strategy, st.floats(0.01, 50.0))
    @settings(max_examples=80, deadline=None)
    def test_threshold_respect(self, values, budget):
        # sliding window and swab respect the per-segment budget; the final
        # segment may exceed it only as an unavoidable short tail
        ts = make_series(values)
        for algorithm in (segment.sliding_window, segment.swab):
            result = algorithm(ts, budget)
            for i, seg in enumerate(result.segments):
                if seg.sse > budget + 1e-9:
                    assert i == len(result.segments) - 1
                    assert seg.end_index - seg.start_index + 1 <= 3

    @given(series_strategy, st.floats(0.05, 20.0), st.floats(0.05, 20.0))
    @settings(max_examples=80, deadline=None)
    def test_sliding_monotone_in_threshold(self, values, b1, b2):
        ts = make_series(values)
        lo, hi = min(b1, b2), max(b1, b2)
        assert segment.sliding_window(ts, lo).k >= segment.sliding_window(ts, hi).k

    @given(series_strategy, st.floats(0.01, 50.0))
    @settings(max_examples=30, deadline=None)
    def test_total_is_sum_of_parts(self, values, budget):
        ts = make_series(values)
        for algorithm in ALL_ALGORITHMS:
            result = algorithm(ts, budget)
            assert result.total_sse == pytest.approx(
                sum(s.sse for s in result.segments), rel=1e-9, abs=1e-12
            )

    def test_oracle_lower_bound_small(self, mkts):
        rng = np.random.default_rng(5)
        for _ in range(20):
            ts = make_series(rng.normal(size=int(rng.integers(8, 64))) * 3)
            budget = float(rng.uniform(0.2, 8))
            for algorithm in ALL_ALGORITHMS:
                result = algorithm(ts, budget)
                oracle = segment.optimal_segmentation_oracle(ts, result.k)
                assert result.total_sse >= oracle.total_sse - 1e-9

    def test_deterministic(self, mkts):
        rng = np.random.default_rng(11)
        ts = make_series(rng.normal(size=60))
        for algorithm in ALL_ALGORITHMS:
            first = algorithm(ts, 1.3)
            second = algorithm(ts, 1.3)
            assert spans(first) == spans(second)
            assert first.total_sse == second.total_sse


class TestConsolidate:
    def test_single_segment_unchanged(self, mkts):
        ts = mkts(list(np.arange(10.0)))
        result = segment.sliding_window(ts, 5.0)
        merged = segment.consolidate(result, ts)
        assert spans(merged) == spans(result)

    def test_merges_same_direction_with_refit(self, mkts):
        values = [0.5 * t for t in range(10)] + [4.5 + 0.7 * t for t in range(1, 11)]
        ts = mkts(values)
        pieces = segment.optimal_segmentation_oracle(ts, 2)
        assert {s.direction for s in pieces.segments} == {"increasing"}
        merged = segment.consolidate(pieces, ts)
        assert spans(merged) == [(0, 19)]
        slope, intercept, sse = segment.fit_line(ts, 0, 19)
        seg = merged.segments[0]
        assert seg.slope == pytest.approx(slope)
        assert seg.intercept == pytest.approx(intercept)
        assert seg.sse == pytest.approx(sse)

    def test_us_covid_fixture_consolidates_to_six(self, us_covid):
        transformed = log_transform(us_covid)
        result = segment.swab(transformed, 2.75)
        merged = segment.consolidate(result, transformed)
        assert merged.k == 6

    @given(series_strategy, st.floats(0.01, 50.0))
    @settings(max_examples=60, deadline=None)
    def test_fixpoint_and_alternation(self, values, budget):
        ts = make_series(values)
        merged = segment.consolidate(segment.bottom_up(ts, budget), ts)
        again = segment.consolidate(merged, ts)
        assert spans(again) == spans(merged)
        for prev, cur in zip(merged.segments, merged.segments[1:]):
            assert prev.direction != cur.direction


class TestGoodness:
    def test_exact_fit(self, mkts):
        ts = mkts(list(np.arange(12.0)))
        result = segment.sliding_window(ts, 1.0)
        total, r2 = segment.goodness(result, ts)
        assert total == 0.0
        assert r2 == 1.0

    def test_constant_series_convention(self, mkts):
        ts = mkts([3.0] * 8)
        result = segment.sliding_window(ts, 1.0)
        total, r2 = segment.goodness(result, ts)
        assert (total, r2) == (0.0, 1.0)

    def test_hand_series(self, mkts):
        ts = mkts([0.0, 2, 0])
        result = segment.sliding_window(ts, 10.0)
        assert spans(result) == [(0, 2)]
        total, r2 = segment.goodness(result, ts)
        assert total == pytest.approx(8 / 3)
        assert r2 == pytest.approx(0.0, abs=1e-12)


class TestKernelPaths:
    """The jitted dispatchers and the interpreted loops must agree exactly."""

    def test_segment_kernels_agree(self):
        rng = np.random.default_rng(17)
        for _ in range(25):
            values = rng.normal(size=int(rng.integers(6, 80))) * 4
            budget = float(rng.uniform(0.05, 10))
            prefix = kernels.fit_prefix(values)
            n = values.size
            assert np.array_equal(
                kernels.sliding_ends(*prefix, n, budget),
                kernels._sliding_ends_impl(*prefix, n, budget),
            )
            assert np.array_equal(
                kernels.bottom_up_ends(*prefix, 0, n - 1, budget),
                kernels._bottom_up_ends_impl(*prefix, 0, n - 1, budget),
            )
            buffer_len = min(n, 8)
            assert np.array_equal(
                kernels.swab_ends(*prefix, n, budget, buffer_len),
                kernels._swab_ends_impl(*prefix, n, budget, buffer_len),
            )

    def test_dp_kernels_agree(self):
        rng = np.random.default_rng(23)
        values = rng.normal(size=30)
        prefix = kernels.fit_prefix(values)
        jit_best, jit_back = kernels.dp_fill(*prefix, 30, 5)
        py_best, py_back = kernels._dp_fill_impl(*prefix, 30, 5)
        assert np.allclose(jit_best, py_best, equal_nan=True)
        assert np.array_equal(jit_back, py_back)
