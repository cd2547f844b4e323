import numpy as np
import pytest

from conftest import make_series
from tsnarrate import regime
from tsnarrate.errors import (
    InvalidCount,
    MismatchedTiling,
    TooManyRegimes,
    WindowTooLarge,
    WindowTooSmall,
)
from tsnarrate.ingest import log_transform


def naive_matrix_profile(x, m, excl):
    """Definition-level oracle: z-normalize every window, take the nearest
    neighbor outside the exclusion zone. Constant windows normalize to zero."""
    x = np.asarray(x, dtype=float)
    p = x.size - m + 1
    z = np.empty((p, m))
    for i in range(p):
        w = x[i : i + m]
        if np.all(w == w[0]):
            z[i] = 0.0
        else:
            z[i] = (w - w.mean()) / w.std()
    dist = np.full((p, p), np.inf)
    for i in range(p):
        d = np.sqrt(np.sum((z - z[i]) ** 2, axis=1))
        d[max(0, i - excl + 1) : i + excl] = np.inf
        dist[i] = d
    return dist.min(axis=1), dist.argmin(axis=1)


def planted_change(seed, n=300, window=16):
    """Two noise regimes differing in level and temporal character."""
    rng = np.random.default_rng(seed)
    tau = int(rng.integers(100, 200))
    t = np.arange(n)
    fast = 1.0 * np.sin(2 * np.pi * t[:tau] / rng.uniform(7, 10) + rng.uniform(0, 6.28))
    slow = 2.5 * np.sin(2 * np.pi * t[tau:] / rng.uniform(18, 26) + rng.uniform(0, 6.28))
    values = np.concatenate([fast, slow + 6.0]) + rng.normal(scale=0.15, size=n)
    return make_series(values), tau, window


class TestMatrixProfile:
    def test_matches_naive_oracle(self):
        rng = np.random.default_rng(2)
        for _ in range(8):
            n = int(rng.integers(40, 180))
            ts = make_series(np.cumsum(rng.normal(size=n)))
            m = int(rng.integers(4, max(5, n // 4)))
            mp = regime.matrix_profile(ts, m)
            oracle_dist, _ = naive_matrix_profile(ts.values, m, mp.exclusion)
            assert np.max(np.abs(mp.distances - oracle_dist)) < 1e-9

    def test_planted_twin_motif(self):
        rng = np.random.default_rng(9)
        copy_len = 80
        walk = np.cumsum(rng.normal(size=copy_len))
        ts = make_series(np.concatenate([walk, walk]))
        mp = regime.matrix_profile(ts, 10)
        aligned = copy_len - 10
        assert np.all(mp.distances[:aligned] < 1e-6)
        offsets = np.abs(mp.neighbor_index[:aligned] - np.arange(aligned))
        assert np.all(offsets == copy_len)

    def test_constant_series_all_zero(self):
        mp = regime.matrix_profile(make_series([5.0] * 60), 6)
        assert np.array_equal(mp.distances, np.zeros(55))

    def test_sine_wave_near_zero_profile(self):
        t = np.arange(200)
        period = 25
        ts = make_series(np.sin(2 * np.pi * t / period))
        mp = regime.matrix_profile(ts, period)
        oracle_dist, _ = naive_matrix_profile(ts.values, period, mp.exclusion)
        assert np.max(np.abs(mp.distances - oracle_dist)) < 1e-6
        assert np.median(mp.distances) < 1e-3

    def test_shift_and_scale_invariance(self):
        rng = np.random.default_rng(4)
        values = np.cumsum(rng.normal(size=150))
        base = regime.matrix_profile(make_series(values), 12)
        shifted = regime.matrix_profile(make_series(values + 12345.0), 12)
        scaled = regime.matrix_profile(make_series(values * 41.5), 12)
        assert np.max(np.abs(base.distances - shifted.distances)) < 1e-9
        assert np.max(np.abs(base.distances - scaled.distances)) < 1e-9

    def test_exclusion_zone_respected(self):
        rng = np.random.default_rng(6)
        ts = make_series(rng.normal(size=120))
        mp = regime.matrix_profile(ts, 8)
        gaps = np.abs(mp.neighbor_index - np.arange(mp.distances.size))
        assert np.all(gaps >= mp.exclusion)

    def test_distance_consistent_with_neighbor(self):
        rng = np.random.default_rng(13)
        ts = make_series(np.cumsum(rng.normal(size=90)))
        m = 9
        mp = regime.matrix_profile(ts, m)

        def zdist(i, j):
            a, b = ts.values[i : i + m], ts.values[j : j + m]
            za = (a - a.mean()) / a.std()
            zb = (b - b.mean()) / b.std()
            return float(np.sqrt(np.sum((za - zb) ** 2)))

        for i in range(0, mp.distances.size, 7):
            j = int(mp.neighbor_index[i])
            assert mp.distances[i] == pytest.approx(zdist(i, j), abs=1e-9)

    def test_window_validation(self):
        ts = make_series(np.arange(40.0))
        with pytest.raises(WindowTooSmall):
            regime.matrix_profile(ts, 2)
        with pytest.raises(WindowTooLarge):
            regime.matrix_profile(ts, 21)

    def test_paths_agree(self):
        rng = np.random.default_rng(31)
        ts = make_series(np.cumsum(rng.normal(size=140)))
        fast = regime.matrix_profile(ts, 11)
        numpy_path = regime.matrix_profile(ts, 11, force_numpy=True)
        assert np.max(np.abs(fast.distances - numpy_path.distances)) < 1e-9


class TestDetectRegimes:
    def test_single_regime_spans_series(self):
        ts = make_series(np.arange(50.0))
        mp = regime.matrix_profile(ts, 5)
        regimes = regime.detect_regimes(ts, mp, 1)
        assert len(regimes) == 1
        assert (regimes[0].start_index, regimes[0].end_index) == (0, 49)

    def test_planted_change_recovered(self):
        hits = 0
        for seed in range(20):
            ts, tau, window = planted_change(500 + seed)
            mp = regime.matrix_profile(ts, window)
            regimes = regime.detect_regimes(ts, mp, 2)
            assert len(regimes) == 2
            if abs(regimes[0].end_index - tau) <= window:
                hits += 1
        assert hits >= 19

    def test_planted_change_agrees_with_variance_split(self):
        ts, tau, window = planted_change(42)
        n = ts.n
        best, best_cut = np.inf, -1
        for c in range(2, n - 2):
            left, right = ts.values[: c + 1], ts.values[c + 1 :]
            pooled = left.size * np.var(left) + right.size * np.var(right)
            if pooled < best:
                best, best_cut = pooled, c
        assert abs(best_cut - tau) <= window
        mp = regime.matrix_profile(ts, window)
        regimes = regime.detect_regimes(ts, mp, 2)
        assert abs(regimes[0].end_index - best_cut) <= 2 * window

    def test_exact_count_or_error(self):
        ts, _, window = planted_change(7)
        mp = regime.matrix_profile(ts, window)
        for n_regimes in (1, 2, 3):
            assert len(regime.detect_regimes(ts, mp, n_regimes)) == n_regimes
        with pytest.raises(TooManyRegimes):
            regime.detect_regimes(ts, mp, 50)

    def test_invalid_count(self):
        ts = make_series(np.arange(50.0))
        mp = regime.matrix_profile(ts, 5)
        with pytest.raises(InvalidCount):
            regime.detect_regimes(ts, mp, 0)

    def test_regimes_tile(self):
        ts, _, window = planted_change(21)
        mp = regime.matrix_profile(ts, window)
        regimes = regime.detect_regimes(ts, mp, 3)
        assert regimes[0].start_index == 0
        assert regimes[-1].end_index == ts.n - 1
        for prev, cur in zip(regimes, regimes[1:]):
            assert cur.start_index == prev.end_index + 1


class TestRegimeSigma:
    def test_constant_single_regime(self):
        ts = make_series([2.0] * 30)
        regimes = [regime.Regime(0, 29, 2.0, 0.0)]
        assert regime.regime_sigma(regimes, ts) == 0.0

    def test_hand_computation(self):
        ts = make_series([0.0, 0, 0, 0, 2, 4, 6, 8])
        regimes = [
            regime.Regime(0, 3, 0.0, 0.0),
            regime.Regime(4, 7, 5.0, float(np.std([2, 4, 6, 8], ddof=1))),
        ]
        expected = np.mean([0.0, np.std([2, 4, 6, 8], ddof=1)])
        assert regime.regime_sigma(regimes, ts) == pytest.approx(float(expected))

    def test_mismatched_tiling(self):
        ts = make_series([1.0] * 10)
        with pytest.raises(MismatchedTiling):
            regime.regime_sigma([regime.Regime(0, 5, 1.0, 0.0)], ts)


class TestCovidFixture:
    def test_forced_regimes_report_sigma(self, us_covid):
        transformed = log_transform(us_covid)
        mp = regime.matrix_profile(transformed, regime.default_window(transformed.n))
        regimes = regime.detect_regimes(transformed, mp, 3)
        sigma = regime.regime_sigma(regimes, transformed)
        assert len(regimes) == 3
        assert sigma > 0.0
