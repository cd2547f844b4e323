"""Loading, validation, and transformation of univariate time series.

Series come from UTF-8 comma-separated files with a header row, ISO-8601
dates in the time column, and decimal or scientific-notation reals in the
value column. Loaded series are immutable and safe to share between
concurrent pipeline runs.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from datetime import date, datetime
from pathlib import Path

import numpy as np

from .errors import (
    EmptySeries,
    MissingColumn,
    NegativeValue,
    NonMonotonicTime,
    UnparseableValue,
)


@dataclass(frozen=True)
class ColumnSchema:
    """Mapping from file columns to series fields."""

    time_col: str
    value_col: str
    entity: str
    measure: str
    unit: str = ""


@dataclass(frozen=True)
class TimeSeries:
    """Ordered, timestamped, finite real-valued observations.

    Invariants (checked at construction):
      - timestamps strictly increasing, same length as values
      - all values finite
      - at least two observations
    """

    entity: str
    measure: str
    timestamps: tuple
    values: np.ndarray
    unit: str = ""
    transformed: bool = False

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "timestamps", tuple(self.timestamps))
        if len(self.timestamps) != values.size:
            raise NonMonotonicTime(
                f"{len(self.timestamps)} timestamps for {values.size} values"
            )
        if values.size < 2:
            raise EmptySeries(f"series needs at least 2 observations, got {values.size}")
        if not np.all(np.isfinite(values)):
            bad = int(np.flatnonzero(~np.isfinite(values))[0])
            raise UnparseableValue(f"non-finite value at position {bad}")
        for i in range(len(self.timestamps) - 1):
            if self.timestamps[i + 1] <= self.timestamps[i]:
                raise NonMonotonicTime(
                    f"timestamps not strictly increasing at position {i + 1} "
                    f"({self.timestamps[i]} -> {self.timestamps[i + 1]})"
                )

    @property
    def n(self) -> int:
        return self.values.size

    def is_regular(self) -> bool:
        """True when timestamps are evenly spaced."""
        deltas = {
            self.timestamps[i + 1] - self.timestamps[i]
            for i in range(len(self.timestamps) - 1)
        }
        return len(deltas) <= 1

    def with_values(self, values: np.ndarray, transformed: bool) -> "TimeSeries":
        return TimeSeries(
            entity=self.entity,
            measure=self.measure,
            timestamps=self.timestamps,
            values=values,
            unit=self.unit,
            transformed=transformed,
        )


@dataclass(frozen=True)
class SeriesStats:
    """Count, mean, and sample standard deviation (N-1 divisor) of raw values."""

    n: int
    mean: float
    std: float


def _parse_timestamp(text: str, row: int):
    text = text.strip()
    try:
        if "T" in text or " " in text or ":" in text:
            return datetime.fromisoformat(text)
        return date.fromisoformat(text)
    except ValueError:
        raise UnparseableValue(f"row {row}: cannot parse timestamp {text!r}") from None


def load_series(path: str | Path, schema: ColumnSchema) -> TimeSeries:
    """Load a series from a delimited file.

    Rows with unparseable or non-finite values are rejected with the row
    number (1-based, counting the header as row 1), never silently dropped.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames or []
        for col in (schema.time_col, schema.value_col):
            if col not in header:
                raise MissingColumn(f"column {col!r} not in header {header}")
        timestamps = []
        values = []
        for row_no, row in enumerate(reader, start=2):
            raw_value = (row.get(schema.value_col) or "").strip()
            try:
                value = float(raw_value)
            except ValueError:
                raise UnparseableValue(
                    f"row {row_no}: cannot parse value {raw_value!r}"
                ) from None
            if not math.isfinite(value):
                raise UnparseableValue(f"row {row_no}: non-finite value {raw_value!r}")
            timestamps.append(_parse_timestamp(row.get(schema.time_col) or "", row_no))
            values.append(value)
    if len(values) < 2:
        raise EmptySeries(f"{path}: found {len(values)} data rows, need at least 2")
    return TimeSeries(
        entity=schema.entity,
        measure=schema.measure,
        timestamps=tuple(timestamps),
        values=np.array(values, dtype=np.float64),
        unit=schema.unit,
    )


def write_series(ts: TimeSeries, path: str | Path, schema: ColumnSchema | None = None) -> None:
    """Write a series back to disk; inverse of :func:`load_series`."""
    time_col = schema.time_col if schema else "date"
    value_col = schema.value_col if schema else "value"
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow([time_col, value_col])
        for stamp, value in zip(ts.timestamps, ts.values):
            writer.writerow([stamp.isoformat(), repr(float(value))])


def log_transform(ts: TimeSeries) -> TimeSeries:
    """Replace values with ln(1+x) element-wise.

    ln(1+x) rather than ln(x) keeps exact zeros at zero and stays monotone.
    Negative observations are refused.
    """
    negative = np.flatnonzero(ts.values < 0)
    if negative.size:
        idx = int(negative[0])
        raise NegativeValue(f"negative value {ts.values[idx]} at index {idx}")
    return ts.with_values(np.log1p(ts.values), transformed=True)


def summary_stats(ts: TimeSeries) -> SeriesStats:
    """Mean and sample standard deviation of the stored values."""
    if ts.n < 2:
        raise EmptySeries("summary statistics need at least 2 observations")
    return SeriesStats(
        n=ts.n,
        mean=float(np.mean(ts.values)),
        std=float(np.std(ts.values, ddof=1)),
    )
