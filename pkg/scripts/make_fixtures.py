#!/usr/bin/env python3
"""Regenerate the fixture datasets under fixtures/.

The fixtures are deterministic synthetic snapshots: shapes and summary
statistics mirror the public sources named in the manifest, but the numbers
are generated here (the build environment has no network access). The
United States COVID-19 series is additionally pinned so the default
pipeline (log1p, SWAB at error budget 2.75, slope consolidation) yields
exactly six consolidated trends; this script fails rather than write a
snapshot that breaks that property.

Usage: python scripts/make_fixtures.py [--out fixtures]
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from datetime import date, timedelta
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from tsnarrate.ingest import TimeSeries, log_transform  # noqa: E402
from tsnarrate import segment  # noqa: E402

GENERATED_ON = "2026-08-08"

COVID_COUNTRIES = [
    "United States", "India", "Brazil", "Russia", "United Kingdom",
    "France", "Spain", "Italy", "Turkey", "Germany",
]
DOTS_COUNTRIES = ["United States", "Germany", "India"]
CO_STATES = ["Alabama", "Alaska", "Arizona"]
POP_COUNTRIES = ["United States", "India", "Brazil"]
TEMP_COUNTRIES = ["United States", "Russia", "Brazil"]


def slug(name: str) -> str:
    return name.lower().replace(" ", "_")


def daily(start: date, n: int):
    return [start + timedelta(days=i) for i in range(n)]


def monthly(start_year: int, n: int):
    out = []
    for i in range(n):
        out.append(date(start_year + i // 12, 1 + i % 12, 1))
    return out


def yearly(start_year: int, n: int):
    return [date(start_year + i, 7, 1) for i in range(n)]


def bump(t: np.ndarray, center: float, width: float, amp: float) -> np.ndarray:
    return amp * np.exp(-0.5 * ((t - center) / width) ** 2)


def scale_to_mean(values: np.ndarray, mean: float) -> np.ndarray:
    return values * (mean / values.mean())


def calibrate(make, target_cov: float, lo: float, hi: float, steps: int = 40) -> float:
    """Find the shape parameter whose output matches the target CoV."""
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        values = make(mid)
        cov = values.std(ddof=1) / values.mean()
        if cov < target_cov:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# --- domain generators -------------------------------------------------------

def covid_series(seed: int, amps, centers, widths, base: float, mean: float) -> np.ndarray:
    rng = np.random.default_rng(seed)
    t = np.arange(351)
    shape = base + sum(bump(t, c, w, a) for c, w, a in zip(centers, widths, amps))
    values = shape * rng.lognormal(0.0, 0.18, size=t.size)
    values = np.round(scale_to_mean(values, mean))
    values[values < 0] = 0
    return values


def make_covid():
    # reference series pinned to N=351, mean 1.75e4, std 1.95e4, 6 trends
    series = {
        "United States": covid_series(
            7, amps=[25, 55, 170], centers=[55, 170, 295], widths=[18, 22, 28],
            base=1.2, mean=1.75e4,
        )
    }
    params = [
        (11, [30, 70, 150], [70, 185, 300], [20, 24, 26], 2.0, 9.6e3),
        (12, [45, 60, 120], [60, 175, 290], [17, 23, 27], 1.5, 1.21e4),
        (13, [35, 80, 140], [65, 180, 298], [19, 21, 25], 1.0, 8.4e3),
        (14, [28, 65, 155], [58, 172, 302], [18, 25, 27], 1.4, 7.7e3),
        (15, [33, 58, 130], [62, 178, 292], [16, 22, 26], 1.1, 5.9e3),
        (16, [26, 72, 145], [68, 182, 296], [18, 23, 28], 1.3, 5.2e3),
        (17, [38, 66, 135], [57, 169, 288], [17, 21, 27], 1.2, 4.8e3),
        (18, [29, 61, 125], [63, 176, 294], [19, 24, 26], 1.6, 6.3e3),
        (19, [31, 69, 142], [59, 174, 299], [18, 22, 27], 1.0, 5.6e3),
    ]
    for country, p in zip(COVID_COUNTRIES[1:], params):
        seed, amps, centers, widths, base, mean = p
        series[country] = covid_series(seed, amps, centers, widths, base, mean)
    return daily(date(2020, 3, 1), 351), series


def make_dots():
    timestamps = monthly(2000, 254)
    t = np.arange(254)

    def shape_for(growth, seed):
        rng = np.random.default_rng(seed)
        trend = np.exp(growth * t / 254.0)
        dips = (1.0 - 0.35 * np.exp(-0.5 * ((t - 104) / 7.0) ** 2)
                - 0.30 * np.exp(-0.5 * ((t - 243) / 5.0) ** 2))
        return trend * dips * rng.lognormal(0.0, 0.05, size=t.size)

    growth = calibrate(lambda g: shape_for(g, 21), 6.27e3 / 1.35e4, 0.2, 4.0)
    series = {}
    for i, (country, mean) in enumerate(
        zip(DOTS_COUNTRIES, [1.35e4, 1.12e4, 3.1e3])
    ):
        values = scale_to_mean(shape_for(growth * (1 + 0.1 * i), 21 + i), mean)
        series[country] = np.round(values, 1)
    return timestamps, series


def make_co():
    timestamps = daily(date(2000, 1, 1), 4722)
    t = np.arange(4722)

    def shape_for(season_amp, seed):
        rng = np.random.default_rng(seed)
        decline = 1.6 - 0.9 * t / 4722.0
        season = 1.0 + season_amp * np.cos(2 * np.pi * t / 365.25)
        return decline * season * rng.lognormal(0.0, 0.30, size=t.size)

    amp = calibrate(lambda a: shape_for(a, 31), 0.22 / 0.39, 0.05, 0.95)
    series = {}
    for i, (state, mean) in enumerate(zip(CO_STATES, [0.39, 0.33, 0.47])):
        values = scale_to_mean(shape_for(amp, 31 + i), mean)
        series[state] = np.round(np.clip(values, 0.001, None), 3)
    return timestamps, series


def make_population():
    timestamps = yearly(1999, 22)
    t = np.arange(22)

    def shape_for(growth, seed):
        rng = np.random.default_rng(seed)
        return np.exp(growth * t / 22.0) * rng.lognormal(0.0, 0.01, size=t.size)

    growth = calibrate(lambda g: shape_for(g, 41), 4.82e7 / 8.02e7, 0.2, 6.0)
    series = {}
    for i, (country, mean) in enumerate(
        zip(POP_COUNTRIES, [8.02e7, 9.4e7, 5.5e7])
    ):
        values = scale_to_mean(shape_for(growth, 41 + i), mean)
        series[country] = np.round(values)
    return timestamps, series


def make_temperature():
    timestamps = daily(date(2012, 1, 1), 3166)
    t = np.arange(3166)

    def shape_for(gamma, seed):
        rng = np.random.default_rng(seed)
        wave = (1.0 + np.sin(2 * np.pi * t / 365.25 - 1.2)) / 2.0
        base = np.power(wave, gamma)
        warming = 1.0 + 0.05 * t / 3166.0
        return base * warming + rng.normal(0.0, 0.02, size=t.size) ** 2

    gamma = calibrate(lambda g: shape_for(g, 51), 6.91 / 8.15, 0.3, 4.0)
    series = {}
    for i, (country, mean) in enumerate(zip(TEMP_COUNTRIES, [8.15, 5.1, 21.4])):
        values = scale_to_mean(shape_for(gamma, 51 + i), mean)
        series[country] = np.round(np.clip(values, 0.0, None), 2)
    return timestamps, series


# --- output ------------------------------------------------------------------

def write_csv(path: Path, timestamps, values) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["date", "value"])
        for stamp, value in zip(timestamps, values):
            value = float(value)
            text = str(int(value)) if value.is_integer() else repr(value)
            writer.writerow([stamp.isoformat(), text])


def check_reference_properties(us_values: np.ndarray, out: Path) -> None:
    from tsnarrate import features, kg, regime
    from tsnarrate.ingest import summary_stats

    stamps = tuple(daily(date(2020, 3, 1), 351))
    ts = TimeSeries("United States", "COVID19 cases", stamps, us_values, unit="cases")
    assert ts.n == 351
    mean, std = us_values.mean(), us_values.std(ddof=1)
    assert abs(mean - 1.75e4) / 1.75e4 < 0.01, mean
    assert abs(std - 1.95e4) / 1.95e4 < 0.01, std
    transformed = log_transform(ts)
    consolidated = segment.consolidate(segment.swab(transformed, 2.75), transformed)
    assert consolidated.k == 6, f"expected 6 consolidated trends, got {consolidated.k}"
    # reference linearization for wire-level consumers (serving backend tests)
    mp = regime.matrix_profile(transformed, regime.default_window(transformed.n))
    regimes = regime.detect_regimes(transformed, mp, 3)
    graph = kg.build_graph(
        ts, summary_stats(ts), consolidated, regimes,
        features.detect_peaks(ts), features.global_extrema(ts),
    )
    (out / "us_covid_linearized.txt").write_text(
        kg.linearize(graph) + "\n", encoding="utf-8"
    )


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="fixtures")
    args = parser.parse_args()
    out = Path(args.out)

    domains = {
        "covid19": {
            "source_url": "https://ourworldindata.org/",
            "measure": "COVID19 cases",
            "unit": "cases",
            "cadence": "daily",
            "n_regimes": 3,
            "build": make_covid,
        },
        "dots_exports": {
            "source_url": "https://data.imf.org/",
            "measure": "merchandise exports",
            "unit": "million USD",
            "cadence": "monthly",
            "n_regimes": 2,
            "build": make_dots,
        },
        "co_pollution": {
            "source_url": "https://data.world/data-society/",
            "measure": "CO pollution",
            "unit": "parts per million",
            "cadence": "daily",
            "n_regimes": 2,
            "build": make_co,
        },
        "world_population": {
            "source_url": "https://ourworldindata.org/",
            "measure": "population",
            "unit": "people",
            "cadence": "yearly",
            "n_regimes": 2,
            "build": make_population,
        },
        "global_temperature": {
            "source_url": "https://data.world/data-society/",
            "measure": "surface temperature",
            "unit": "degrees Celsius",
            "cadence": "daily",
            "n_regimes": 2,
            "build": make_temperature,
        },
    }

    manifest = {
        "schema_version": "fixtures/1",
        "synthetic": True,
        "generator": "scripts/make_fixtures.py",
        "generated": GENERATED_ON,
        "notes": (
            "Deterministic synthetic snapshots shaped to the published summary "
            "statistics of the named sources; regenerate with the generator "
            "script. Values are not real observations."
        ),
        "domains": {},
    }

    for domain, cfg in domains.items():
        timestamps, series = cfg["build"]()
        entries = []
        for entity, values in series.items():
            rel = f"{domain}/{slug(entity)}.csv"
            write_csv(out / rel, timestamps, values)
            entries.append({"entity": entity, "file": rel, "rows": len(values)})
            if domain == "covid19" and entity == "United States":
                check_reference_properties(np.asarray(values, dtype=float), out)
        manifest["domains"][domain] = {
            "source_url": cfg["source_url"],
            "retrieved": GENERATED_ON,
            "measure": cfg["measure"],
            "unit": cfg["unit"],
            "cadence": cfg["cadence"],
            "time_col": "date",
            "value_col": "value",
            "n_regimes": cfg["n_regimes"],
            "series": entries,
        }

    manifest_path = out / "manifest.json"
    manifest_path.write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    total = sum(len(d["series"]) for d in manifest["domains"].values())
    print(f"wrote {total} series across {len(domains)} domains to {out}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
