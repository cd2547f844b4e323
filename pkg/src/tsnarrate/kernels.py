"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

Kernel selection: numba is used when importable unless the environment
variable ``TSNARRATE_NUMBA`` is set to ``0``/``false``/``off``/``no``, in
which case the interpreted implementations run instead. Both paths compute
the same quantities; ``benchmarks/bench_kernels.py`` compares them.

Least-squares fits over index spans are O(1) via prefix sums; the matrix
profile walks diagonals of the (implicit) distance matrix with incremental
dot products.
"""

from __future__ import annotations

import os

import numpy as np

_ENV_FLAG = "TSNARRATE_NUMBA"


def _numba_requested() -> bool:
    value = os.environ.get(_ENV_FLAG, "1").strip().lower()
    return value not in {"0", "false", "off", "no"}


NUMBA_ENABLED = False
if _numba_requested():
    try:
        from numba import njit as _njit

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        NUMBA_ENABLED = False


def _jit(func):
    if NUMBA_ENABLED:
        return _njit(cache=True)(func)
    return func


def numba_enabled() -> bool:
    """True when the jitted kernel path is active."""
    return NUMBA_ENABLED


# ---------------------------------------------------------------------------
# Least-squares over index spans
# ---------------------------------------------------------------------------

def fit_prefix(values: np.ndarray):
    """Prefix sums of y, y^2, and t*y enabling O(1) span fits."""
    values = np.asarray(values, dtype=np.float64)
    n = values.size
    t = np.arange(n, dtype=np.float64)
    cy = np.empty(n + 1)
    cyy = np.empty(n + 1)
    cty = np.empty(n + 1)
    cy[0] = cyy[0] = cty[0] = 0.0
    np.cumsum(values, out=cy[1:])
    np.cumsum(values * values, out=cyy[1:])
    np.cumsum(t * values, out=cty[1:])
    return cy, cyy, cty


def _fit_span_impl(cy, cyy, cty, s, e):
    # OLS of y against the global integer index over [s, e] inclusive.
    # Centered coordinates keep the SSE numerically stable for long series.
    n = e - s + 1.0
    sy = cy[e + 1] - cy[s]
    syy = cyy[e + 1] - cyy[s]
    sty = cty[e + 1] - cty[s]
    tbar = (s + e) / 2.0
    ybar = sy / n
    sxx = n * (n * n - 1.0) / 12.0
    sxy = sty - tbar * sy
    slope = sxy / sxx
    intercept = ybar - slope * tbar
    sse = (syy - n * ybar * ybar) - slope * sxy
    if sse < 0.0:
        sse = 0.0
    return slope, intercept, sse


fit_span = _jit(_fit_span_impl)


def _sse_span_impl(cy, cyy, cty, s, e):
    return fit_span(cy, cyy, cty, s, e)[2]


_sse_span = _jit(_sse_span_impl)


# ---------------------------------------------------------------------------
# Segmentation kernels (all return inclusive segment end indices)
# ---------------------------------------------------------------------------

def _sliding_ends_impl(cy, cyy, cty, n, max_error):
    out = np.empty(n // 2 + 1, np.int64)
    count = 0
    anchor = 0
    while anchor < n - 1:
        e = anchor + 1
        while e + 1 <= n - 1 and _sse_span(cy, cyy, cty, anchor, e + 1) <= max_error:
            e += 1
        if e == n - 2:
            # never strand a single trailing point
            if e - 1 >= anchor + 1:
                e -= 1
            else:
                e = n - 1
        out[count] = e
        count += 1
        anchor = e + 1
    return out[:count].copy()


sliding_ends = _jit(_sliding_ends_impl)


def _bottom_up_ends_impl(cy, cyy, cty, lo, hi, max_error):
    n = hi - lo + 1
    if n <= 3:
        out = np.empty(1, np.int64)
        out[0] = hi
        return out
    nseg = n // 2
    starts = np.empty(nseg, np.int64)
    ends = np.empty(nseg, np.int64)
    for i in range(nseg):
        starts[i] = lo + 2 * i
        ends[i] = lo + 2 * i + 1
    ends[nseg - 1] = hi  # a trailing odd point joins the last pair
    costs = np.empty(nseg - 1, np.float64)
    for i in range(nseg - 1):
        costs[i] = _sse_span(cy, cyy, cty, starts[i], ends[i + 1])
    while nseg > 1:
        j = 0
        best = costs[0]
        for t in range(1, nseg - 1):
            if costs[t] < best:
                best = costs[t]
                j = t
        if best > max_error:
            break
        ends[j] = ends[j + 1]
        for t in range(j + 1, nseg - 1):
            starts[t] = starts[t + 1]
            ends[t] = ends[t + 1]
        for t in range(j + 1, nseg - 2):
            costs[t] = costs[t + 1]
        nseg -= 1
        if j > 0:
            costs[j - 1] = _sse_span(cy, cyy, cty, starts[j - 1], ends[j])
        if j < nseg - 1:
            costs[j] = _sse_span(cy, cyy, cty, starts[j], ends[j + 1])
    return ends[:nseg].copy()


bottom_up_ends = _jit(_bottom_up_ends_impl)


def _read_chunk_impl(cy, cyy, cty, n, max_error, read):
    # Stream points into the buffer until the fit over the fresh span
    # exceeds the budget; never leaves a single unread point behind.
    c0 = read
    e = read
    while e + 1 <= n - 1 and _sse_span(cy, cyy, cty, c0, e + 1) <= max_error:
        e += 1
    new_read = e + 1
    if n - new_read == 1:
        new_read = n
    return new_read


_read_chunk = _jit(_read_chunk_impl)


def _swab_ends_impl(cy, cyy, cty, n, max_error, buffer_len):
    out = np.empty(n // 2 + 1, np.int64)
    count = 0
    lower = buffer_len // 2
    if lower < 4:
        lower = 4
    buf_lo = 0
    read = buffer_len if buffer_len < n else n
    while True:
        sub = bottom_up_ends(cy, cyy, cty, buf_lo, read - 1, max_error)
        if read >= n:
            for t in range(sub.size):
                out[count] = sub[t]
                count += 1
            break
        if sub.size == 1:
            # whole buffer still fits one line; keep growing before emitting
            read = _read_chunk(cy, cyy, cty, n, max_error, read)
            continue
        fe = sub[0]
        if n - 1 - fe == 1:
            if fe - 1 >= buf_lo + 1:
                fe = fe - 1
            else:
                fe = n - 1
        out[count] = fe
        count += 1
        if fe == n - 1:
            break
        buf_lo = fe + 1
        while read < n and read - buf_lo < lower:
            read = _read_chunk(cy, cyy, cty, n, max_error, read)
    return out[:count].copy()


swab_ends = _jit(_swab_ends_impl)


def _dp_fill_impl(cy, cyy, cty, n, kmax):
    # best[j, e]: minimal total SSE tiling [0, e] with j+1 segments,
    # every segment spanning at least two points. Ties keep the leftmost cut.
    best = np.full((kmax, n), np.inf)
    back = np.full((kmax, n), -1, np.int64)
    for e in range(1, n):
        best[0, e] = _sse_span(cy, cyy, cty, 0, e)
    for j in range(1, kmax):
        for e in range(2 * j + 1, n):
            b = np.inf
            arg = -1
            for s in range(2 * j, e):
                prev = best[j - 1, s - 1]
                if prev == np.inf:
                    continue
                c = prev + _sse_span(cy, cyy, cty, s, e)
                if c < b:
                    b = c
                    arg = s
            best[j, e] = b
            back[j, e] = arg
    return best, back


dp_fill = _jit(_dp_fill_impl)


# ---------------------------------------------------------------------------
# Matrix profile kernels
# ---------------------------------------------------------------------------

def _mp_loop_impl(x, m, excl, means, sigs, const):
    n = x.size
    p = n - m + 1
    prof = np.full(p, np.inf)
    nbr = np.full(p, -1, np.int64)
    scratch = np.empty(p, np.float64)
    fm = float(m)
    for k in range(excl, p):
        length = p - k
        qt = 0.0
        for t in range(m):
            qt += x[t] * x[t + k]
        for i in range(length):
            if i > 0:
                qt += x[i + m - 1] * x[i + k + m - 1] - x[i - 1] * x[i + k - 1]
            j = i + k
            if const[i] and const[j]:
                d2 = 0.0
            elif const[i] or const[j]:
                d2 = fm
            else:
                rho = (qt - fm * means[i] * means[j]) / (fm * sigs[i] * sigs[j])
                d2 = 2.0 * fm * (1.0 - rho)
                if d2 < 0.0:
                    d2 = 0.0
            scratch[i] = d2
        for i in range(length):
            if scratch[i] < prof[i]:
                prof[i] = scratch[i]
                nbr[i] = i + k
        for i in range(length):
            j = i + k
            if scratch[i] < prof[j]:
                prof[j] = scratch[i]
                nbr[j] = i
    return np.sqrt(prof), nbr


_mp_loop = _jit(_mp_loop_impl)


def _mp_numpy(x, m, excl, means, sigs, const):
    n = x.size
    p = n - m + 1
    prof = np.full(p, np.inf)
    nbr = np.full(p, -1, np.int64)
    fm = float(m)
    for k in range(excl, p):
        length = p - k
        prods = x[: n - k] * x[k:]
        cp = np.empty(prods.size + 1)
        cp[0] = 0.0
        np.cumsum(prods, out=cp[1:])
        qt = cp[m : m + length] - cp[:length]
        ci = const[:length]
        cj = const[k : k + length]
        with np.errstate(divide="ignore", invalid="ignore"):
            rho = (qt - fm * means[:length] * means[k : k + length]) / (
                fm * sigs[:length] * sigs[k : k + length]
            )
        d2 = 2.0 * fm * (1.0 - rho)
        d2 = np.where(d2 > 0.0, d2, 0.0)
        d2 = np.where(ci & cj, 0.0, np.where(ci ^ cj, fm, d2))
        upd = d2 < prof[:length]
        prof[:length] = np.where(upd, d2, prof[:length])
        nbr[:length] = np.where(upd, np.arange(length) + k, nbr[:length])
        updj = d2 < prof[k : k + length]
        prof[k : k + length] = np.where(updj, d2, prof[k : k + length])
        nbr[k : k + length] = np.where(updj, np.arange(length), nbr[k : k + length])
    return np.sqrt(prof), nbr


def _window_stats(x: np.ndarray, m: int):
    n = x.size
    cum = np.empty(n + 1)
    cum2 = np.empty(n + 1)
    cum[0] = cum2[0] = 0.0
    np.cumsum(x, out=cum[1:])
    np.cumsum(x * x, out=cum2[1:])
    win_sum = cum[m:] - cum[:-m]
    means = win_sum / m
    var = (cum2[m:] - cum2[:-m]) / m - means * means
    np.maximum(var, 0.0, out=var)
    sigs = np.sqrt(var)
    # exact constant-window detection via zero-difference runs
    diffs = np.diff(x) != 0.0
    cnz = np.empty(n, np.int64)
    cnz[0] = 0
    np.cumsum(diffs.astype(np.int64), out=cnz[1:])
    const = (cnz[m - 1 :] - cnz[: n - m + 1]) == 0
    return means, sigs, const


def matrix_profile_kernel(values: np.ndarray, m: int, excl: int, force_numpy: bool = False):
    """Self-join matrix profile: z-normalized distances plus neighbor indices.

    Values are centered first so the result is numerically shift invariant.
    Tie handling (strictly-smaller updates walking diagonals outward) is
    identical on both paths.
    """
    x = np.asarray(values, dtype=np.float64)
    x = x - x.mean()
    means, sigs, const = _window_stats(x, m)
    if NUMBA_ENABLED and not force_numpy:
        return _mp_loop(x, m, excl, means, sigs, const)
    return _mp_numpy(x, m, excl, means, sigs, const)
