import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tsnarrate.errors import (
    EmptySeries,
    MissingColumn,
    NegativeValue,
    NonMonotonicTime,
    UnparseableValue,
)
from tsnarrate.ingest import (
    ColumnSchema,
    load_series,
    log_transform,
    summary_stats,
    write_series,
)

SCHEMA = ColumnSchema(time_col="date", value_col="value", entity="E", measure="m")


def write_csv(path, rows, header="date,value"):
    path.write_text(header + "\n" + "\n".join(rows) + "\n", encoding="utf-8")
    return path


class TestLoadSeries:
    def test_three_row_file(self, tmp_path):
        path = write_csv(tmp_path / "s.csv",
                         ["2020-01-01,5", "2020-01-02,7", "2020-01-03,6"])
        ts = load_series(path, SCHEMA)
        assert ts.n == 3
        assert list(ts.values) == [5.0, 7.0, 6.0]
        assert ts.entity == "E" and ts.measure == "m"
        assert not ts.transformed

    def test_out_of_order_rows(self, tmp_path):
        path = write_csv(tmp_path / "s.csv",
                         ["2020-01-02,5", "2020-01-01,7", "2020-01-03,6"])
        with pytest.raises(NonMonotonicTime):
            load_series(path, SCHEMA)

    def test_duplicate_timestamps(self, tmp_path):
        path = write_csv(tmp_path / "s.csv",
                         ["2020-01-01,5", "2020-01-01,7"])
        with pytest.raises(NonMonotonicTime):
            load_series(path, SCHEMA)

    def test_missing_column(self, tmp_path):
        path = write_csv(tmp_path / "s.csv", ["2020-01-01,5"], header="date,count")
        with pytest.raises(MissingColumn):
            load_series(path, SCHEMA)

    def test_unparseable_value_reports_row(self, tmp_path):
        path = write_csv(tmp_path / "s.csv",
                         ["2020-01-01,5", "2020-01-02,oops", "2020-01-03,6"])
        with pytest.raises(UnparseableValue, match="row 3"):
            load_series(path, SCHEMA)

    def test_non_finite_rejected(self, tmp_path):
        path = write_csv(tmp_path / "s.csv", ["2020-01-01,5", "2020-01-02,inf"])
        with pytest.raises(UnparseableValue, match="row 3"):
            load_series(path, SCHEMA)

    def test_too_few_rows(self, tmp_path):
        path = write_csv(tmp_path / "s.csv", ["2020-01-01,5"])
        with pytest.raises(EmptySeries):
            load_series(path, SCHEMA)

    def test_scientific_notation(self, tmp_path):
        path = write_csv(tmp_path / "s.csv", ["2020-01-01,1.5e3", "2020-01-02,2e-2"])
        ts = load_series(path, SCHEMA)
        assert list(ts.values) == [1500.0, 0.02]

    def test_covid_fixture_row_count(self, fixtures_dir):
        schema = ColumnSchema("date", "value", "United States", "COVID19 cases",
                              "cases")
        ts = load_series(fixtures_dir / "covid19" / "united_states.csv", schema)
        assert ts.n == 351

    @given(
        st.lists(
            st.floats(min_value=-1e12, max_value=1e12,
                      allow_nan=False, allow_infinity=False),
            min_size=2, max_size=40,
        )
    )
    def test_round_trip(self, tmp_path_factory, values):
        from conftest import make_series

        ts = make_series(values)
        path = tmp_path_factory.mktemp("rt") / "series.csv"
        write_series(ts, path, SCHEMA)
        loaded = load_series(path, SCHEMA)
        assert loaded.timestamps == ts.timestamps
        assert np.array_equal(loaded.values, ts.values)


class TestLogTransform:
    def test_exact_points(self, mkts):
        ts = mkts([0.0, math.e - 1, math.e**2 - 1])
        out = log_transform(ts)
        assert np.allclose(out.values, [0.0, 1.0, 2.0], atol=1e-12)
        assert out.transformed
        assert out.timestamps == ts.timestamps

    def test_all_zero(self, mkts):
        out = log_transform(mkts([0.0, 0.0, 0.0]))
        assert np.array_equal(out.values, [0.0, 0.0, 0.0])

    def test_negative_reports_index(self, mkts):
        with pytest.raises(NegativeValue, match="index 0"):
            log_transform(mkts([-1.0, 2.0]))

    @given(
        st.lists(st.floats(min_value=0, max_value=1e9, allow_nan=False),
                 min_size=2, max_size=50, unique=True)
    )
    def test_monotone(self, values):
        from conftest import make_series

        ts = make_series(values)
        out = log_transform(ts)
        order_in = np.argsort(ts.values)
        order_out = np.argsort(out.values)
        assert np.array_equal(order_in, order_out)


class TestSummaryStats:
    def test_hand_computation(self, mkts):
        stats = summary_stats(mkts([1.0, 2.0, 3.0]))
        assert stats.n == 3
        assert stats.mean == pytest.approx(2.0)
        assert stats.std == pytest.approx(1.0)

    def test_constant_series_zero_std(self, mkts):
        stats = summary_stats(mkts([5.0, 5.0, 5.0, 5.0]))
        assert stats.mean == 5.0
        assert stats.std == 0.0

    def test_covid_fixture_reference_stats(self, us_covid):
        stats = summary_stats(us_covid)
        assert stats.n == 351
        assert stats.mean == pytest.approx(1.75e4, rel=2e-2)
        assert stats.std == pytest.approx(1.95e4, rel=2e-2)
