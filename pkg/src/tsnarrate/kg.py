"""Knowledge-graph assembly and linearization.

Stage-one findings (trends, regimes, peaks, extrema) become an ordered list
of subject-predicate-object triples rooted at the series entity. The graph
linearizes to a token string with ``<H>``/``<R>``/``<T>`` markers for the
text generator, and parses back losslessly.

Relation vocabulary (normative for templates and the serving backend):
has observations, spans, unit, maximum, minimum, has trend, direction,
from, to, percent change, has regime, average level, has peak, peak value,
peak date.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InconsistentInputs, MalformedMarkerSequence, ReservedMarkerInField
from .ingest import SeriesStats, TimeSeries
from .narrate import verbalize_number

MARKERS = ("<H>", "<R>", "<T>")

RELATIONS = (
    "has observations",
    "spans",
    "unit",
    "maximum",
    "minimum",
    "has trend",
    "direction",
    "from",
    "to",
    "percent change",
    "has regime",
    "average level",
    "has peak",
    "peak value",
    "peak date",
)


def _check_field(name: str, value: str) -> str:
    if not value:
        raise ReservedMarkerInField(f"triple {name} must be non-empty")
    if value != value.strip():
        raise ReservedMarkerInField(
            f"triple {name} {value!r} has leading or trailing whitespace"
        )
    for marker in MARKERS:
        if marker in value:
            raise ReservedMarkerInField(f"triple {name} {value!r} contains {marker}")
    return value


@dataclass(frozen=True)
class Triple:
    head: str
    relation: str
    tail: str

    def __post_init__(self):
        _check_field("head", self.head)
        _check_field("relation", self.relation)
        _check_field("tail", self.tail)


@dataclass(frozen=True)
class KnowledgeGraph:
    triples: tuple
    root_entity: str

    def __post_init__(self):
        object.__setattr__(self, "triples", tuple(self.triples))
        if not self.triples:
            raise InconsistentInputs("knowledge graph must be non-empty")
        if self.triples[0].head != self.root_entity:
            raise InconsistentInputs(
                f"first triple head {self.triples[0].head!r} "
                f"is not the root entity {self.root_entity!r}"
            )


def build_graph(
    series: TimeSeries,
    stats: SeriesStats,
    segmentation,
    regimes,
    peaks,
    extrema=None,
) -> KnowledgeGraph:
    """Encode stage-one outputs as triples.

    ``series`` must be the raw-domain series: trend percent changes, regime
    average levels, and peak values are narrated in source units. Emission
    order is metadata, trends (chronological), regimes (chronological),
    peaks (prominence order). Flat trends carry no percent-change triple.
    """
    n = series.n
    for seg in segmentation.segments:
        if seg.end_index >= n:
            raise InconsistentInputs(
                f"segment ends at {seg.end_index}, series has {n} points"
            )
    for reg in regimes:
        if reg.end_index >= n:
            raise InconsistentInputs(
                f"regime ends at {reg.end_index}, series has {n} points"
            )
    for peak in peaks:
        if peak.index >= n:
            raise InconsistentInputs(f"peak at {peak.index}, series has {n} points")

    root = f"{series.entity} {series.measure}".strip()
    dates = series.timestamps
    triples = [
        Triple(root, "has observations", str(stats.n)),
        Triple(root, "spans", f"{dates[0].isoformat()}..{dates[-1].isoformat()}"),
    ]
    if series.unit:
        triples.append(Triple(root, "unit", series.unit))
    if extrema is not None:
        high, low = extrema
        triples.append(
            Triple(root, "maximum",
                   f"{verbalize_number(high.value, series.unit)} "
                   f"on {dates[high.index].isoformat()}")
        )
        triples.append(
            Triple(root, "minimum",
                   f"{verbalize_number(low.value, series.unit)} "
                   f"on {dates[low.index].isoformat()}")
        )
    for i, seg in enumerate(segmentation.segments, start=1):
        node = f"trend {i}"
        triples.append(Triple(root, "has trend", node))
        triples.append(Triple(node, "direction", seg.direction))
        triples.append(Triple(node, "from", dates[seg.start_index].isoformat()))
        triples.append(Triple(node, "to", dates[seg.end_index].isoformat()))
        if seg.direction != "flat":
            start_value = float(series.values[seg.start_index])
            end_value = float(series.values[seg.end_index])
            pct = 100.0 * (end_value - start_value) / max(abs(start_value), 1e-9)
            triples.append(Triple(node, "percent change", f"{pct:+.1f}%"))
    for i, reg in enumerate(regimes, start=1):
        node = f"regime {i}"
        level = float(np.mean(series.values[reg.start_index : reg.end_index + 1]))
        triples.append(Triple(root, "has regime", node))
        triples.append(Triple(node, "from", dates[reg.start_index].isoformat()))
        triples.append(Triple(node, "to", dates[reg.end_index].isoformat()))
        triples.append(Triple(node, "average level", verbalize_number(level, series.unit)))
    for i, peak in enumerate(peaks, start=1):
        node = f"peak {i}"
        triples.append(Triple(root, "has peak", node))
        triples.append(Triple(node, "peak value", verbalize_number(peak.value, series.unit)))
        triples.append(Triple(node, "peak date", dates[peak.index].isoformat()))
    return KnowledgeGraph(tuple(triples), root)


def linearize(kg: KnowledgeGraph) -> str:
    """Render triples as '<H> head <R> relation <T> tail ...', space separated."""
    parts = []
    for triple in kg.triples:
        parts.append(f"<H> {triple.head} <R> {triple.relation} <T> {triple.tail}")
    return " ".join(parts)


def to_lines(kg: KnowledgeGraph) -> str:
    """Human-readable one-triple-per-line form: 'head | relation | tail'."""
    return "\n".join(f"{t.head} | {t.relation} | {t.tail}" for t in kg.triples)


def parse_linearized(text: str) -> KnowledgeGraph:
    """Exact inverse of :func:`linearize` on its image."""
    if not text or not text.startswith("<H> "):
        raise MalformedMarkerSequence("linearization must start with '<H> '")
    triples = []
    chunks = text.split("<H> ")
    if chunks[0] != "":
        raise MalformedMarkerSequence(f"unexpected prefix {chunks[0]!r}")
    for chunk in chunks[1:]:
        if " <R> " not in chunk:
            raise MalformedMarkerSequence(f"chunk {chunk!r} missing <R> marker")
        head, rest = chunk.split(" <R> ", 1)
        if " <T> " not in rest:
            raise MalformedMarkerSequence(f"chunk {chunk!r} missing <T> marker")
        relation, tail = rest.split(" <T> ", 1)
        tail = tail[:-1] if tail.endswith(" ") else tail
        try:
            triples.append(Triple(head, relation, tail))
        except ReservedMarkerInField as exc:
            raise MalformedMarkerSequence(str(exc)) from None
    return KnowledgeGraph(tuple(triples), triples[0].head)
