"""Sampling-time truncation with the reference semantics of the pipeline.

Top-K keeps the K most probable tokens, top-p the shortest most-probable
prefix whose cumulative mass reaches p (>=, so p=1 keeps everything); ties
break toward the smaller token id, and when nothing is dropped the
distribution is returned untouched. These rules are checked against the
shared conformance vectors exported by the analysis package.
"""

from __future__ import annotations

import numpy as np


def truncate_top_k(probabilities: np.ndarray, k: int) -> np.ndarray:
    """Zero all but the k most probable entries and renormalize."""
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    probs = np.asarray(probabilities, dtype=np.float64)
    if k >= probs.size:
        return probs.copy()
    order = np.lexsort((np.arange(probs.size), -probs))
    kept = order[:k]
    out = np.zeros_like(probs)
    out[kept] = probs[kept]
    return out / out.sum()


def truncate_top_p(probabilities: np.ndarray, p: float) -> np.ndarray:
    """Keep the shortest probability-sorted prefix with cumulative mass >= p."""
    if not (0 < p <= 1):
        raise ValueError(f"p must be in (0, 1], got {p}")
    probs = np.asarray(probabilities, dtype=np.float64)
    order = np.lexsort((np.arange(probs.size), -probs))
    cumulative = np.cumsum(probs[order])
    cut = int(np.searchsorted(cumulative, p)) + 1
    if cut >= probs.size:
        return probs.copy()
    kept = order[:cut]
    out = np.zeros_like(probs)
    out[kept] = probs[kept]
    return out / out.sum()


def apply_strategy(probabilities: np.ndarray, strategy: str, k: int, p: float) -> np.ndarray:
    if strategy == "top_k":
        return truncate_top_k(probabilities, k)
    if strategy == "top_p":
        return truncate_top_p(probabilities, p)
    if strategy == "basic":
        return np.asarray(probabilities, dtype=np.float64).copy()
    raise ValueError(f"unknown strategy {strategy!r}")
