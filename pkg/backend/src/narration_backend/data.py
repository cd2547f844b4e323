"""Training-data preparation for graph-to-text fine-tuning.

Datasets are consumed as JSONL files (``webnlg.jsonl``, ``dart.jsonl``) with
one record per line: ``{"triples": [[head, relation, tail], ...],
"text": "reference realization"}``. Convert the official WebNLG v3.0 /
DART v1.1 releases to this layout before training; the loaders here only
linearize and pair. Malformed records are skipped and counted, never
silently dropped without trace.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .linearize import MalformedRecord, linearize_triples

DATASET_FILES = {"webnlg": "webnlg.jsonl", "dart": "dart.jsonl"}


class DatasetMissing(FileNotFoundError):
    pass


@dataclass(frozen=True)
class TrainingPair:
    source: str
    target: str


@dataclass(frozen=True)
class PreparedDataset:
    pairs: list
    skipped: int
    sources: tuple


def _load_file(path: Path):
    pairs = []
    skipped = 0
    with path.open(encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                triples = [tuple(str(f) for f in t) for t in record["triples"]]
                text = str(record["text"]).strip()
                if not text:
                    raise MalformedRecord("empty reference text")
                pairs.append(TrainingPair(linearize_triples(triples), text))
            except (MalformedRecord, KeyError, TypeError, ValueError, json.JSONDecodeError):
                skipped += 1
    return pairs, skipped


def prepare_dataset(selection: str, data_dir: str | Path) -> PreparedDataset:
    """Load and linearize the selected corpora.

    ``selection`` is ``webnlg``, ``dart``, or ``both``. Raises
    :class:`DatasetMissing` when a requested file is absent.
    """
    if selection not in ("webnlg", "dart", "both"):
        raise ValueError(f"unknown dataset selection {selection!r}")
    names = ("webnlg", "dart") if selection == "both" else (selection,)
    data_dir = Path(data_dir)
    pairs = []
    skipped = 0
    for name in names:
        path = data_dir / DATASET_FILES[name]
        if not path.is_file():
            raise DatasetMissing(f"dataset file {path} not found")
        loaded, bad = _load_file(path)
        pairs.extend(loaded)
        skipped += bad
    return PreparedDataset(pairs=pairs, skipped=skipped, sources=names)
