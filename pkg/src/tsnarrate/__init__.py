"""Domain-agnostic time-series narration.

Pipeline: load a univariate series, log-transform it, extract trends
(piecewise-linear segmentation), regimes (matrix profile), and peaks,
encode everything as a knowledge graph, and realize the graph as text
through templates or a neural backend speaking the t3/1 wire contract.
"""

from .decode import DecodingConfig, TokenDistribution
from .ingest import ColumnSchema, SeriesStats, TimeSeries, load_series, log_transform, summary_stats
from .kg import KnowledgeGraph, Triple, build_graph, linearize, parse_linearized
from .metrics import MetricsReport, compute_report
from .narrate import Narrative, TemplateSet, narrate, template_render, verbalize_number
from .regime import MatrixProfile, Regime, detect_regimes, matrix_profile, regime_sigma
from .segment import (
    Segment,
    SegmentationResult,
    bottom_up,
    consolidate,
    fit_line,
    goodness,
    optimal_segmentation_oracle,
    sliding_window,
    swab,
)

__version__ = "0.1.0"

__all__ = [
    "ColumnSchema",
    "DecodingConfig",
    "KnowledgeGraph",
    "MatrixProfile",
    "MetricsReport",
    "Narrative",
    "Regime",
    "Segment",
    "SegmentationResult",
    "SeriesStats",
    "TemplateSet",
    "TimeSeries",
    "TokenDistribution",
    "Triple",
    "bottom_up",
    "build_graph",
    "compute_report",
    "consolidate",
    "detect_regimes",
    "fit_line",
    "goodness",
    "linearize",
    "load_series",
    "log_transform",
    "matrix_profile",
    "narrate",
    "optimal_segmentation_oracle",
    "parse_linearized",
    "regime_sigma",
    "sliding_window",
    "summary_stats",
    "swab",
    "template_render",
    "verbalize_number",
]
