"""Decoding strategies over next-token probability distributions.

Basic sampling draws proportionally to mass; top-K keeps the K most probable
tokens; top-p keeps the smallest probability-sorted prefix whose cumulative
mass reaches p ("exceeds" is implemented as >=, so p=1 keeps everything).
Ties break toward the smaller token id in both truncations. When nothing is
dropped the distribution is returned untouched, so identity cases are exact.

These definitions are the conformance reference for any serving backend;
:func:`conformance_vectors` emits shared test vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidDistribution, InvalidK, InvalidP, LengthMismatch

_SUM_TOLERANCE = 1e-9


@dataclass(frozen=True)
class TokenDistribution:
    """Probability mass over integer token ids; validates on construction."""

    probabilities: dict

    def __post_init__(self):
        probs = dict(self.probabilities)
        object.__setattr__(self, "probabilities", probs)
        if not probs:
            raise InvalidDistribution("distribution is empty")
        for token, p in probs.items():
            if p < 0:
                raise InvalidDistribution(f"token {token} has negative mass {p}")
        total = sum(probs.values())
        if abs(total - 1.0) > _SUM_TOLERANCE:
            raise InvalidDistribution(f"mass sums to {total}, expected 1")

    def support(self):
        return set(self.probabilities)


@dataclass(frozen=True)
class DecodingConfig:
    strategy: str = "top_p"
    k: int = 50
    p: float = 0.92
    seed: int = 0
    max_tokens: int = 256

    def __post_init__(self):
        if self.strategy not in ("basic", "top_k", "top_p"):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.k < 1:
            raise InvalidK(f"k must be at least 1, got {self.k}")
        if not (0 < self.p <= 1):
            raise InvalidP(f"p must be in (0, 1], got {self.p}")


def sample_basic(dist: TokenDistribution, rng: np.random.Generator) -> int:
    """Draw one token with probability proportional to its mass."""
    tokens = sorted(dist.probabilities)
    masses = [dist.probabilities[t] for t in tokens]
    u = rng.random()
    acc = 0.0
    for token, mass in zip(tokens, masses):
        acc += mass
        if u < acc:
            return token
    return tokens[-1]


def truncate_top_k(dist: TokenDistribution, k: int) -> TokenDistribution:
    """Keep the k most probable tokens and renormalize."""
    if k < 1:
        raise InvalidK(f"k must be at least 1, got {k}")
    if k >= len(dist.probabilities):
        return dist
    ranked = sorted(dist.probabilities.items(), key=lambda kv: (-kv[1], kv[0]))
    kept = ranked[:k]
    total = sum(p for _, p in kept)
    return TokenDistribution({t: p / total for t, p in kept})


def truncate_top_p(dist: TokenDistribution, p: float) -> TokenDistribution:
    """Keep the shortest most-probable prefix with cumulative mass >= p."""
    if not (0 < p <= 1):
        raise InvalidP(f"p must be in (0, 1], got {p}")
    ranked = sorted(dist.probabilities.items(), key=lambda kv: (-kv[1], kv[0]))
    kept = []
    acc = 0.0
    for token, mass in ranked:
        kept.append((token, mass))
        acc += mass
        if acc >= p:
            break
    if len(kept) == len(ranked):
        return dist
    total = sum(mass for _, mass in kept)
    return TokenDistribution({t: mass / total for t, mass in kept})


def sample(dist: TokenDistribution, config: DecodingConfig, rng: np.random.Generator) -> int:
    """Apply the configured truncation, then draw."""
    if config.strategy == "top_k":
        dist = truncate_top_k(dist, config.k)
    elif config.strategy == "top_p":
        dist = truncate_top_p(dist, config.p)
    return sample_basic(dist, rng)


def chain_probability(step_dists, sequence) -> float:
    """Product of per-step conditional probabilities of the given sequence.

    A token absent from its step distribution contributes zero mass, making
    the whole chain zero; that is a result, not an error.
    """
    if len(step_dists) != len(sequence):
        raise LengthMismatch(
            f"{len(step_dists)} step distributions for {len(sequence)} tokens"
        )
    product = 1.0
    for dist, token in zip(step_dists, sequence):
        product *= dist.probabilities.get(token, 0.0)
    return min(max(product, 0.0), 1.0)


def conformance_vectors(seed: int = 20240311, cases: int = 24) -> dict:
    """Shared truncation test vectors for backend conformance checks."""
    rng = np.random.default_rng(seed)
    out = []

    def add(name, dist, op, param):
        d = TokenDistribution(dist)
        if op == "top_k":
            expected = truncate_top_k(d, param)
            entry = {"name": name, "distribution": _keys_to_str(dist), "op": op,
                     "k": param}
        else:
            expected = truncate_top_p(d, param)
            entry = {"name": name, "distribution": _keys_to_str(dist), "op": op,
                     "p": param}
        entry["expected"] = _keys_to_str(expected.probabilities)
        out.append(entry)

    add("hand-top-k-2", {0: 0.5, 1: 0.3, 2: 0.2}, "top_k", 2)
    add("hand-top-p-0.7", {0: 0.5, 1: 0.3, 2: 0.2}, "top_p", 0.7)
    add("hand-top-p-0.5", {0: 0.9, 1: 0.1}, "top_p", 0.5)
    add("hand-tie-k-1", {0: 0.4, 1: 0.4, 2: 0.2}, "top_k", 1)
    for i in range(cases):
        size = int(rng.integers(2, 40))
        raw = rng.dirichlet(np.ones(size) * rng.uniform(0.2, 3.0))
        dist = {t: float(p) for t, p in enumerate(raw)}
        total = sum(dist.values())
        dist = {t: p / total for t, p in dist.items()}
        if i % 2 == 0:
            add(f"random-top-k-{i}", dist, "top_k", int(rng.integers(1, size + 2)))
        else:
            add(f"random-top-p-{i}", dist, "top_p", float(rng.uniform(0.1, 1.0)))
    return {"version": "t3/1-conformance/1", "tolerance": 1e-6, "cases": out}


def _keys_to_str(mapping: dict) -> dict:
    return {str(k): float(v) for k, v in mapping.items()}
