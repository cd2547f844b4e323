"""Command-line pipeline: analyze, narrate, benchmarks, and text evaluation.

Configuration comes from an optional JSON config file plus flags; flags win.
All documents are JSON with a ``schema_version`` field and are written
atomically (temp file, then rename). Identical config, fixtures, and seed
produce byte-identical documents; benchmark wall times go to the console
only, never into documents.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, fields, replace
from pathlib import Path

from . import features, kg, metrics, regime, segment
from .decode import DecodingConfig
from .errors import NarrationError
from .ingest import ColumnSchema, load_series, log_transform, summary_stats
from .narrate import load_templates, load_templates_from, narrate, select_domain

DEFAULT_MAX_ERROR = 2.75
DEFAULT_ALGORITHM = "swab"
DEFAULT_TOP_K = 50
DEFAULT_TOP_P = 0.92

_ALGORITHMS = {
    "sliding_window": segment.sliding_window,
    "bottom_up": segment.bottom_up,
    "swab": segment.swab,
}


@dataclass(frozen=True)
class PipelineConfig:
    """Pipeline defaults: error budget 2.75, SWAB, k=50, p=0.92."""

    input: str | None = None
    time_col: str = "date"
    value_col: str = "value"
    entity: str = "Series"
    measure: str = "values"
    unit: str = ""
    max_error: float = DEFAULT_MAX_ERROR
    algorithm: str = DEFAULT_ALGORITHM
    buffer_len: int | None = None
    window: int | None = None
    n_regimes: int | None = None
    min_prominence: float | None = None
    max_peaks: int = 3
    mode: str = "templated"
    endpoint: str | None = None
    strategy: str = "top_p"
    k: int = DEFAULT_TOP_K
    p: float = DEFAULT_TOP_P
    seed: int = 0
    max_tokens: int = 256
    templates: str | None = None
    out: str = "out"

    def decoding(self) -> DecodingConfig:
        return DecodingConfig(
            strategy=self.strategy, k=self.k, p=self.p,
            seed=self.seed, max_tokens=self.max_tokens,
        )


def _config_from_args(args) -> PipelineConfig:
    config = PipelineConfig()
    if getattr(args, "config", None):
        raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
        known = {f.name for f in fields(PipelineConfig)}
        unknown = set(raw) - known
        if unknown:
            raise NarrationError(f"unknown config keys: {sorted(unknown)}")
        config = replace(config, **raw)
    overrides = {}
    for f in fields(PipelineConfig):
        value = getattr(args, f.name, None)
        if value is not None:
            overrides[f.name] = value
    if overrides:
        config = replace(config, **overrides)
    if config.endpoint is None:
        config = replace(config, endpoint=os.environ.get("T3_ENDPOINT"))
    return config


def write_document(path: Path, payload: dict) -> None:
    """Atomic JSON write: temp file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    os.replace(tmp, path)


def write_text(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _segmentation_dict(result) -> dict:
    return {
        "algorithm": result.algorithm,
        "max_error": result.max_error,
        "k": result.k,
        "total_sse": result.total_sse,
        "r_squared": result.r_squared,
        "segments": [
            {
                "start": seg.start_index,
                "end": seg.end_index,
                "slope": seg.slope,
                "intercept": seg.intercept,
                "sse": seg.sse,
                "direction": seg.direction,
            }
            for seg in result.segments
        ],
    }


@dataclass(frozen=True)
class PipelineOutputs:
    raw: object
    transformed: object
    stats: object
    segmentation: object
    consolidated: object
    window: int
    mp: object
    regimes: list
    peaks: list
    extrema: tuple
    graph: object


def run_pipeline(config: PipelineConfig) -> PipelineOutputs:
    """Ingest through graph construction; shared by analyze and narrate."""
    if not config.input:
        raise NarrationError("no input file configured")
    schema = ColumnSchema(
        time_col=config.time_col,
        value_col=config.value_col,
        entity=config.entity,
        measure=config.measure,
        unit=config.unit,
    )
    raw = load_series(config.input, schema)
    transformed = log_transform(raw)
    stats = summary_stats(raw)
    algorithm = _ALGORITHMS.get(config.algorithm)
    if algorithm is None:
        raise NarrationError(f"unknown algorithm {config.algorithm!r}")
    if config.algorithm == "swab":
        seg_result = segment.swab(transformed, config.max_error, config.buffer_len)
    else:
        seg_result = algorithm(transformed, config.max_error)
    consolidated = segment.consolidate(seg_result, transformed)
    window = config.window or regime.default_window(transformed.n)
    mp = regime.matrix_profile(transformed, window)
    n_regimes = config.n_regimes or regime.auto_regime_count(transformed, mp)
    regimes = regime.detect_regimes(transformed, mp, n_regimes)
    peaks = features.detect_peaks(raw, config.min_prominence, config.max_peaks)
    extrema = features.global_extrema(raw)
    graph = kg.build_graph(raw, stats, consolidated, regimes, peaks, extrema)
    return PipelineOutputs(
        raw, transformed, stats, seg_result, consolidated,
        window, mp, regimes, peaks, extrema, graph,
    )


def _analysis_document(config: PipelineConfig, run: PipelineOutputs) -> dict:
    raw = run.raw
    return {
        "schema_version": "analysis/1",
        "series": {
            "entity": raw.entity,
            "measure": raw.measure,
            "unit": raw.unit,
            "n": raw.n,
            "start": raw.timestamps[0].isoformat(),
            "end": raw.timestamps[-1].isoformat(),
        },
        "stats": {"n": run.stats.n, "mean": run.stats.mean, "std": run.stats.std,
                  "value_domain": "raw"},
        "transform": "log1p",
        "segmentation": _segmentation_dict(run.segmentation),
        "consolidated": _segmentation_dict(run.consolidated),
        "regimes": {
            "window": run.window,
            "n_regimes": len(run.regimes),
            "value_domain": "log1p",
            "mean_sigma": regime.regime_sigma(run.regimes, run.transformed),
            "regimes": [
                {
                    "start": r.start_index,
                    "end": r.end_index,
                    "start_date": raw.timestamps[r.start_index].isoformat(),
                    "end_date": raw.timestamps[r.end_index].isoformat(),
                    "mean": r.mean,
                    "std": r.std,
                }
                for r in run.regimes
            ],
        },
        "peaks": [
            {
                "index": p.index,
                "date": p.timestamp.isoformat(),
                "value": p.value,
                "prominence": p.prominence,
            }
            for p in run.peaks
        ],
        "extrema": {
            "maximum": {"index": run.extrema[0].index,
                        "date": run.extrema[0].timestamp.isoformat(),
                        "value": run.extrema[0].value},
            "minimum": {"index": run.extrema[1].index,
                        "date": run.extrema[1].timestamp.isoformat(),
                        "value": run.extrema[1].value},
        },
        "graph": {
            "root": run.graph.root_entity,
            "triples": [[t.head, t.relation, t.tail] for t in run.graph.triples],
            "linearized": kg.linearize(run.graph),
        },
    }


def cmd_analyze(args) -> int:
    config = _config_from_args(args)
    run = run_pipeline(config)
    out_dir = Path(config.out)
    document = _analysis_document(config, run)
    write_document(out_dir / "analysis.json", document)
    write_text(out_dir / "graph.txt", kg.to_lines(run.graph) + "\n")
    write_text(out_dir / "linearized.txt", kg.linearize(run.graph) + "\n")
    print(f"analysis written to {out_dir / 'analysis.json'}")
    print(f"trends: {run.consolidated.k}  regimes: {len(run.regimes)}  "
          f"peaks: {len(run.peaks)}")
    return 0


def _graph_from_document(doc: dict) -> kg.KnowledgeGraph:
    triples = tuple(kg.Triple(h, r, t) for h, r, t in doc["graph"]["triples"])
    return kg.KnowledgeGraph(triples, doc["graph"]["root"])


def cmd_narrate(args) -> int:
    config = _config_from_args(args)
    if getattr(args, "analysis", None):
        doc = json.loads(Path(args.analysis).read_text(encoding="utf-8"))
        graph = _graph_from_document(doc)
        measure = doc["series"]["measure"]
    else:
        run = run_pipeline(config)
        graph = run.graph
        measure = config.measure
    if config.templates:
        template_set = load_templates_from(config.templates)
    else:
        template_set = load_templates(select_domain(measure))
    mode = config.mode.replace("-", "_")
    narrative = narrate(
        graph,
        mode=mode,
        templates=template_set,
        endpoint=config.endpoint,
        decoding=config.decoding(),
    )
    report = metrics.compute_report(narrative.text)
    document = {
        "schema_version": "narrative/1",
        "narrative": {
            "text": narrative.text,
            "generator": narrative.generator,
            "model_id": narrative.model_id,
            "decoding": None if narrative.decoding is None else {
                "strategy": narrative.decoding.strategy,
                "k": narrative.decoding.k,
                "p": narrative.decoding.p,
                "seed": narrative.decoding.seed,
                "max_tokens": narrative.decoding.max_tokens,
            },
            "warning": narrative.warning,
        },
        "metrics": {
            "re": report.re,
            "ttr": report.ttr,
            "g": report.g,
            "word_count": report.word_count,
            "sentence_count": report.sentence_count,
            "type_count": report.type_count,
        },
    }
    out_dir = Path(config.out)
    write_document(out_dir / "narrative.json", document)
    if narrative.warning:
        print(f"warning: {narrative.warning}", file=sys.stderr)
    print(narrative.text)
    return 0


def _load_manifest(fixtures_dir: Path) -> dict:
    manifest_path = fixtures_dir / "manifest.json"
    if not manifest_path.is_file():
        raise NarrationError(f"no fixture manifest at {manifest_path}")
    return json.loads(manifest_path.read_text(encoding="utf-8"))


def _fixture_series(fixtures_dir: Path, domain_cfg: dict, entry: dict):
    schema = ColumnSchema(
        time_col=domain_cfg.get("time_col", "date"),
        value_col=domain_cfg.get("value_col", "value"),
        entity=entry["entity"],
        measure=domain_cfg["measure"],
        unit=domain_cfg.get("unit", ""),
    )
    return load_series(fixtures_dir / entry["file"], schema)


def cmd_bench_seg(args) -> int:
    config = _config_from_args(args)
    fixtures_dir = Path(args.fixtures)
    manifest = _load_manifest(fixtures_dir)
    sweep = getattr(args, "sweep", False)
    document = {"schema_version": "bench-seg/1", "max_error": config.max_error,
                "value_domain": "log1p", "domains": {}}
    header = f"{'domain':<20} {'algorithm':<15} {'SSE':>10} {'r2':>6} {'k':>5} {'time':>9}"
    print(header)
    print("-" * len(header))
    for domain, domain_cfg in sorted(manifest["domains"].items()):
        per_algorithm = {name: [] for name in _ALGORITHMS}
        entries = []
        for entry in domain_cfg["series"]:
            transformed = log_transform(
                _fixture_series(fixtures_dir, domain_cfg, entry)
            )
            row = {"entity": entry["entity"], "algorithms": {}}
            for name, func in _ALGORITHMS.items():
                start = time.perf_counter()
                result = func(transformed, config.max_error)
                elapsed = time.perf_counter() - start
                row["algorithms"][name] = {
                    "total_sse": result.total_sse,
                    "r_squared": result.r_squared,
                    "k": result.k,
                }
                per_algorithm[name].append((result.total_sse, result.r_squared,
                                            result.k, elapsed))
            entries.append(row)
        means = {}
        for name, rows in per_algorithm.items():
            count = len(rows)
            means[name] = {
                "total_sse": sum(r[0] for r in rows) / count,
                "r_squared": sum(r[1] for r in rows) / count,
                "k": sum(r[2] for r in rows) / count,
            }
            wall = sum(r[3] for r in rows)
            print(f"{domain:<20} {name:<15} {means[name]['total_sse']:>10.2f} "
                  f"{means[name]['r_squared']:>6.2f} {means[name]['k']:>5.1f} "
                  f"{wall:>8.3f}s")
        document["domains"][domain] = {"series": entries, "mean": means}
        if sweep:
            document["domains"][domain]["sweep"] = _threshold_sweep(
                fixtures_dir, domain_cfg
            )
    out_dir = Path(config.out)
    write_document(out_dir / "bench_seg.json", document)
    print(f"benchmark written to {out_dir / 'bench_seg.json'}")
    return 0


def _threshold_sweep(fixtures_dir: Path, domain_cfg: dict) -> list:
    thresholds = [0.5, 1.0, 1.5, 2.0, 2.5, 2.75, 3.0, 3.5, 4.0, 5.0]
    first = domain_cfg["series"][0]
    transformed = log_transform(_fixture_series(fixtures_dir, domain_cfg, first))
    rows = []
    for threshold in thresholds:
        result = segment.swab(transformed, threshold)
        rows.append({"max_error": threshold, "total_sse": result.total_sse,
                     "k": result.k})
    return rows


def cmd_bench_regime(args) -> int:
    config = _config_from_args(args)
    fixtures_dir = Path(args.fixtures)
    manifest = _load_manifest(fixtures_dir)
    document = {"schema_version": "bench-regime/1", "value_domain": "log1p",
                "domains": {}}
    header = f"{'domain':<20} {'entity':<18} {'regimes':>8} {'mean sigma':>11}"
    print(header)
    print("-" * len(header))
    for domain, domain_cfg in sorted(manifest["domains"].items()):
        n_regimes = config.n_regimes or domain_cfg.get("n_regimes", 2)
        rows = []
        sigmas = []
        for entry in domain_cfg["series"]:
            transformed = log_transform(
                _fixture_series(fixtures_dir, domain_cfg, entry)
            )
            window = config.window or regime.default_window(transformed.n)
            mp = regime.matrix_profile(transformed, window)
            regimes = regime.detect_regimes(transformed, mp, n_regimes)
            sigma = regime.regime_sigma(regimes, transformed)
            sigmas.append(sigma)
            rows.append({
                "entity": entry["entity"],
                "window": window,
                "boundaries": [r.end_index for r in regimes[:-1]],
                "sigmas": [r.std for r in regimes],
                "mean_sigma": sigma,
            })
            print(f"{domain:<20} {entry['entity']:<18} {n_regimes:>8} "
                  f"{sigma:>11.4f}")
        document["domains"][domain] = {
            "n_regimes": n_regimes,
            "series": rows,
            "mean_sigma": sum(sigmas) / len(sigmas),
        }
    out_dir = Path(config.out)
    write_document(out_dir / "bench_regime.json", document)
    print(f"benchmark written to {out_dir / 'bench_regime.json'}")
    return 0


def cmd_eval(args) -> int:
    config = _config_from_args(args)
    if getattr(args, "text", None):
        text = args.text
    elif config.input:
        text = Path(config.input).read_text(encoding="utf-8")
    else:
        raise NarrationError("eval needs --text or --input")
    report = metrics.compute_report(text)
    document = {
        "schema_version": "eval/1",
        "metrics": {
            "re": report.re,
            "ttr": report.ttr,
            "g": report.g,
            "word_count": report.word_count,
            "sentence_count": report.sentence_count,
            "type_count": report.type_count,
        },
    }
    out_dir = Path(config.out)
    write_document(out_dir / "eval.json", document)
    print(json.dumps(document["metrics"], indent=2, sort_keys=True))
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file; flags override it")
    parser.add_argument("--input", help="input CSV file")
    parser.add_argument("--time-col", dest="time_col")
    parser.add_argument("--value-col", dest="value_col")
    parser.add_argument("--entity")
    parser.add_argument("--measure")
    parser.add_argument("--unit")
    parser.add_argument("--max-error", dest="max_error", type=float)
    parser.add_argument("--algorithm",
                        choices=["sliding_window", "bottom_up", "swab"])
    parser.add_argument("--buffer-len", dest="buffer_len", type=int)
    parser.add_argument("--window", type=int)
    parser.add_argument("--n-regimes", dest="n_regimes", type=int)
    parser.add_argument("--min-prominence", dest="min_prominence", type=float)
    parser.add_argument("--max-peaks", dest="max_peaks", type=int)
    parser.add_argument("--mode",
                        choices=["templated", "neural", "neural-with-fallback"])
    parser.add_argument("--endpoint")
    parser.add_argument("--strategy", choices=["basic", "top_k", "top_p"])
    parser.add_argument("--k", type=int)
    parser.add_argument("--p", type=float)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--max-tokens", dest="max_tokens", type=int)
    parser.add_argument("--templates", help="custom template file")
    parser.add_argument("--out", help="output directory (default: out)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tsnarrate",
        description="Time-series narration pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_analyze = sub.add_parser("analyze", help="extract trends, regimes, peaks")
    _add_common(p_analyze)
    p_analyze.set_defaults(func=cmd_analyze)

    p_narrate = sub.add_parser("narrate", help="realize the graph as text")
    _add_common(p_narrate)
    p_narrate.add_argument("--analysis", help="existing analysis.json to narrate")
    p_narrate.set_defaults(func=cmd_narrate)

    p_bench_seg = sub.add_parser("bench-seg", help="segmentation benchmark")
    _add_common(p_bench_seg)
    p_bench_seg.add_argument("--fixtures", default="fixtures")
    p_bench_seg.add_argument("--sweep", action="store_true",
                             help="also sweep error thresholds")
    p_bench_seg.set_defaults(func=cmd_bench_seg)

    p_bench_regime = sub.add_parser("bench-regime", help="regime benchmark")
    _add_common(p_bench_regime)
    p_bench_regime.add_argument("--fixtures", default="fixtures")
    p_bench_regime.set_defaults(func=cmd_bench_regime)

    p_eval = sub.add_parser("eval", help="linguistic metrics on text")
    _add_common(p_eval)
    p_eval.add_argument("--text", help="evaluate this literal text")
    p_eval.set_defaults(func=cmd_eval)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        name = exc.filename or exc
        print(f"cli: file not found: {name}", file=sys.stderr)
        return 1
    except NarrationError as exc:
        print(f"{exc.module}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
