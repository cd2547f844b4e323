from datetime import date, timedelta
from pathlib import Path

import numpy as np
import pytest

from tsnarrate.ingest import TimeSeries

REPO = Path(__file__).resolve().parent.parent
FIXTURES = REPO / "fixtures"


def make_series(values, entity="Test", measure="values", unit="", start=date(2020, 1, 1)):
    stamps = tuple(start + timedelta(days=i) for i in range(len(values)))
    return TimeSeries(entity, measure, stamps, np.asarray(values, dtype=float), unit=unit)


@pytest.fixture
def mkts():
    return make_series


@pytest.fixture(scope="session")
def fixtures_dir():
    if not (FIXTURES / "manifest.json").is_file():
        pytest.skip("fixtures not generated; run scripts/make_fixtures.py")
    return FIXTURES


@pytest.fixture(scope="session")
def us_covid(fixtures_dir):
    from tsnarrate.ingest import ColumnSchema, load_series

    schema = ColumnSchema(
        time_col="date", value_col="value",
        entity="United States", measure="COVID19 cases", unit="cases",
    )
    return load_series(fixtures_dir / "covid19" / "united_states.csv", schema)


@pytest.fixture
def stub_backend():
    from stub_backend import StubBackend

    backend = StubBackend()
    backend.start()
    yield backend
    backend.stop()
