#!/usr/bin/env python3
"""Compare the numba kernels against the pure-numpy/python fallbacks.

The dispatchers pick numba automatically; set TSNARRATE_NUMBA=0 to force the
fallback everywhere. This script calls both implementations directly so one
run shows the gap.

Usage: python benchmarks/bench_kernels.py [--n 4000] [--repeats 5]
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from tsnarrate import kernels  # noqa: E402


def timer(func, *args, repeats=5):
    best = float("inf")
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = func(*args)
        best = min(best, time.perf_counter() - start)
    return best, result


def bench_matrix_profile(n: int, repeats: int):
    rng = np.random.default_rng(0)
    values = np.cumsum(rng.normal(size=n))
    m = max(8, n // 40)
    excl = -(-m // 4)
    x = values - values.mean()
    means, sigs, const = kernels._window_stats(x, m)

    if kernels.NUMBA_ENABLED:
        kernels._mp_loop(x[:200], m, excl, *kernels._window_stats(x[:200], m))  # compile
        jit_time, jit_out = timer(kernels._mp_loop, x, m, excl, means, sigs, const,
                                  repeats=repeats)
    else:
        jit_time, jit_out = float("nan"), None
    np_time, np_out = timer(kernels._mp_numpy, x, m, excl, means, sigs, const,
                            repeats=repeats)
    if jit_out is not None:
        drift = float(np.max(np.abs(jit_out[0] - np_out[0])))
        assert drift < 1e-6, drift
    return "matrix profile", jit_time, np_time


def bench_bottom_up(n: int, repeats: int):
    rng = np.random.default_rng(1)
    values = np.cumsum(rng.normal(size=n)) + rng.normal(scale=0.4, size=n)
    prefix = kernels.fit_prefix(values)
    budget = 2.75

    if kernels.NUMBA_ENABLED:
        kernels.bottom_up_ends(*prefix, 0, min(n, 100) - 1, budget)  # compile
        jit_time, jit_out = timer(kernels.bottom_up_ends, *prefix, 0, n - 1, budget,
                                  repeats=repeats)
    else:
        jit_time, jit_out = float("nan"), None
    py_time, py_out = timer(kernels._bottom_up_ends_impl, *prefix, 0, n - 1, budget,
                            repeats=repeats)
    if jit_out is not None:
        assert np.array_equal(jit_out, py_out)
    return "bottom-up merge", jit_time, py_time


def bench_sliding(n: int, repeats: int):
    rng = np.random.default_rng(2)
    values = np.cumsum(rng.normal(size=n))
    prefix = kernels.fit_prefix(values)
    budget = 2.75

    if kernels.NUMBA_ENABLED:
        kernels.sliding_ends(*prefix, min(n, 100), budget)  # compile
        jit_time, jit_out = timer(kernels.sliding_ends, *prefix, n, budget,
                                  repeats=repeats)
    else:
        jit_time, jit_out = float("nan"), None
    py_time, py_out = timer(kernels._sliding_ends_impl, *prefix, n, budget,
                            repeats=repeats)
    if jit_out is not None:
        assert np.array_equal(jit_out, py_out)
    return "sliding window", jit_time, py_time


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=4000, help="series length")
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    print(f"numba enabled: {kernels.numba_enabled()}  (series length {args.n})")
    header = f"{'kernel':<18} {'numba':>10} {'fallback':>10} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for bench in (bench_matrix_profile, bench_bottom_up, bench_sliding):
        name, jit_time, other_time = bench(args.n, args.repeats)
        if jit_time == jit_time:  # not NaN
            speedup = other_time / jit_time
            print(f"{name:<18} {jit_time * 1e3:>8.2f}ms {other_time * 1e3:>8.2f}ms "
                  f"{speedup:>8.1f}x")
        else:
            print(f"{name:<18} {'n/a':>10} {other_time * 1e3:>8.2f}ms "
                  f"{'n/a':>9}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
