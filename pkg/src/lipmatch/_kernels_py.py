"""Pure numpy implementations of the sliding-window kernels.

Selected at import time when the compiled extension is unavailable (or
forced via ``LIPMATCH_BACKEND=python``).  Semantics are identical to the C
kernels: windows are restricted to the image domain, so results match
padding with the neutral element of the reduction.

The tolerant (rank) kernels stack the weighted window values strip by
strip and sort once per strip; per-pixel drop counts are taken from the
actual border window cardinality.
"""

from __future__ import annotations

import numpy as np

_STRIP_BUDGET = 4_000_000  # doubles per stacked strip


def window_counts(height: int, width: int, oy: np.ndarray, ox: np.ndarray) -> np.ndarray:
    """Per-pixel count of in-bounds window samples (corner-increment trick)."""
    acc = np.zeros((height + 1, width + 1), dtype=np.int64)
    for j in range(len(oy)):
        r0, r1 = max(0, -oy[j]), min(height, height - oy[j])
        c0, c1 = max(0, -ox[j]), min(width, width - ox[j])
        if r0 >= r1 or c0 >= c1:
            continue
        acc[r0, c0] += 1
        acc[r0, c1] -= 1
        acc[r1, c0] -= 1
        acc[r1, c1] += 1
    return acc.cumsum(axis=0).cumsum(axis=1)[:height, :width]


def _valid_box(shape, oy: int, ox: int):
    h, w = shape
    return max(0, -oy), min(h, h - oy), max(0, -ox), min(w, w - ox)


def extremum(u, oy, ox, w, want_max: bool, empty_val: float) -> np.ndarray:
    """max/min over {u(x+h) + w(h)} per pixel; empty windows get empty_val."""
    u = np.asarray(u, dtype=np.float64)
    out = np.full(u.shape, -np.inf if want_max else np.inf)
    op = np.maximum if want_max else np.minimum
    for j in range(len(oy)):
        r0, r1, c0, c1 = _valid_box(u.shape, oy[j], ox[j])
        if r0 >= r1 or c0 >= c1:
            continue
        block = u[r0 + oy[j] : r1 + oy[j], c0 + ox[j] : c1 + ox[j]] + w[j]
        np.copyto(out[r0:r1, c0:c1], op(out[r0:r1, c0:c1], block))
    if not np.isinf(empty_val):
        out[np.isinf(out) & (window_counts(*u.shape, oy, ox) == 0)] = empty_val
    return out


def span_minmax(u, oy, ox, w):
    """(max, min) over {u(x+h) + w(h)} per pixel, in one offset sweep."""
    u = np.asarray(u, dtype=np.float64)
    hi = np.full(u.shape, -np.inf)
    lo = np.full(u.shape, np.inf)
    for j in range(len(oy)):
        r0, r1, c0, c1 = _valid_box(u.shape, oy[j], ox[j])
        if r0 >= r1 or c0 >= c1:
            continue
        block = u[r0 + oy[j] : r1 + oy[j], c0 + ox[j] : c1 + ox[j]] + w[j]
        np.copyto(hi[r0:r1, c0:c1], np.maximum(hi[r0:r1, c0:c1], block))
        np.copyto(lo[r0:r1, c0:c1], np.minimum(lo[r0:r1, c0:c1], block))
    return hi, lo


def _strip_rows(height: int, width: int, n_off: int):
    rows = max(1, _STRIP_BUDGET // max(1, n_off * width))
    for r0 in range(0, height, rows):
        yield r0, min(height, r0 + rows)


def _stack_strip(u, oy, ox, r0, r1, sample):
    """Stack transformed window values for rows [r0, r1); invalid = +inf."""
    h, w = u.shape
    stack = np.full((len(oy), r1 - r0, w), np.inf)
    for j in range(len(oy)):
        rr0, rr1 = max(r0, -oy[j]), min(r1, h - oy[j])
        c0, c1 = max(0, -ox[j]), min(w, w - ox[j])
        if rr0 >= rr1 or c0 >= c1:
            continue
        block = u[rr0 + oy[j] : rr1 + oy[j], c0 + ox[j] : c1 + ox[j]]
        stack[j, rr0 - r0 : rr1 - r0, c0:c1] = sample(j, block)
    return stack


def _rank_strip(stack, counts, k):
    """((k+1)-th largest, (k+1)-th smallest) of the valid entries per pixel."""
    stack.sort(axis=0)
    empty = counts == 0
    c = np.maximum(counts, 1)
    kk = np.minimum(k, c - 1)
    top = np.take_along_axis(stack, (c - 1 - kk)[None], axis=0)[0]
    bot = np.take_along_axis(stack, kk[None], axis=0)[0]
    top[empty] = -np.inf
    bot[empty] = np.inf
    return top, bot


def span_rank(u, oy, ox, w, drop_frac: float):
    """Tolerant version of span_minmax: per-window order statistics.

    Per pixel the drop count is floor(drop_frac * n) for the actual window
    cardinality n.  Returns (top, bot) arrays.
    """
    u = np.asarray(u, dtype=np.float64)
    counts = window_counts(*u.shape, oy, ox)
    hi = np.empty(u.shape)
    lo = np.empty(u.shape)
    for r0, r1 in _strip_rows(*u.shape, len(oy)):
        stack = _stack_strip(u, oy, ox, r0, r1, lambda j, b: b + w[j])
        c = counts[r0:r1]
        k = (drop_frac * c).astype(np.int64)
        hi[r0:r1], lo[r0:r1] = _rank_strip(stack, c, k)
    return hi, lo


def rank_filter(u, oy, ox, w, top: bool, k, empty_val: float) -> np.ndarray:
    """(k+1)-th largest (top) or smallest of {u(x+h) + w(h)}; fixed k."""
    u = np.asarray(u, dtype=np.float64)
    counts = window_counts(*u.shape, oy, ox)
    out = np.empty(u.shape)
    for r0, r1 in _strip_rows(*u.shape, len(oy)):
        stack = _stack_strip(u, oy, ox, r0, r1, lambda j, b: b + w[j])
        c = counts[r0:r1]
        hi, lo = _rank_strip(stack, c, np.full(c.shape, k, dtype=np.int64))
        out[r0:r1] = hi if top else lo
    out[counts == 0] = empty_val
    return out


def _finish_mult(top, bot, counts, out):
    with np.errstate(invalid="ignore", divide="ignore"):
        np.copyto(out, np.log(top / bot))
    out[counts == 0] = 0.0


def _finish_add(top, bot, counts, m, out):
    with np.errstate(invalid="ignore"):
        np.copyto(out, (top - bot) / (1.0 - bot / m))
    out[counts == 0] = 0.0


def map_mult_direct(f, oy, ox, btilde, m: float, drop_frac: float) -> np.ndarray:
    """Per-window multiplicative probing distance, evaluated directly.

    Window sample -> contrast ratio ln(1 - f/m)/ln(1 - b/m); the map value
    is ln of the ratio between the retained extremal contrasts.
    """
    f = np.asarray(f, dtype=np.float64)
    t = np.log1p(-f / m)
    counts = window_counts(*f.shape, oy, ox)
    out = np.empty(f.shape)

    def sample(j, block):
        return block / btilde[j]

    if drop_frac == 0.0:
        hi = np.full(f.shape, -np.inf)
        lo = np.full(f.shape, np.inf)
        for j in range(len(oy)):
            r0, r1, c0, c1 = _valid_box(f.shape, oy[j], ox[j])
            if r0 >= r1 or c0 >= c1:
                continue
            block = sample(j, t[r0 + oy[j] : r1 + oy[j], c0 + ox[j] : c1 + ox[j]])
            np.copyto(hi[r0:r1, c0:c1], np.maximum(hi[r0:r1, c0:c1], block))
            np.copyto(lo[r0:r1, c0:c1], np.minimum(lo[r0:r1, c0:c1], block))
        _finish_mult(hi, lo, counts, out)
        return out
    for r0, r1 in _strip_rows(*f.shape, len(oy)):
        stack = _stack_strip(t, oy, ox, r0, r1, sample)
        c = counts[r0:r1]
        k = (drop_frac * c).astype(np.int64)
        hi, lo = _rank_strip(stack, c, k)
        _finish_mult(hi, lo, c, out[r0:r1])
    return out


def map_add_direct(f, oy, ox, bval, bden, m: float, drop_frac: float) -> np.ndarray:
    """Per-window additive probing distance, evaluated directly.

    Window sample -> additive contrast (f - b)/(1 - b/m); the map value is
    the LIP difference of the retained extremal contrasts.
    """
    f = np.asarray(f, dtype=np.float64)
    counts = window_counts(*f.shape, oy, ox)
    out = np.empty(f.shape)

    def sample(j, block):
        return (block - bval[j]) / bden[j]

    if drop_frac == 0.0:
        hi = np.full(f.shape, -np.inf)
        lo = np.full(f.shape, np.inf)
        for j in range(len(oy)):
            r0, r1, c0, c1 = _valid_box(f.shape, oy[j], ox[j])
            if r0 >= r1 or c0 >= c1:
                continue
            block = sample(j, f[r0 + oy[j] : r1 + oy[j], c0 + ox[j] : c1 + ox[j]])
            np.copyto(hi[r0:r1, c0:c1], np.maximum(hi[r0:r1, c0:c1], block))
            np.copyto(lo[r0:r1, c0:c1], np.minimum(lo[r0:r1, c0:c1], block))
        _finish_add(hi, lo, counts, m, out)
        return out
    for r0, r1 in _strip_rows(*f.shape, len(oy)):
        stack = _stack_strip(f, oy, ox, r0, r1, sample)
        c = counts[r0:r1]
        k = (drop_frac * c).astype(np.int64)
        hi, lo = _rank_strip(stack, c, k)
        _finish_add(hi, lo, c, m, out[r0:r1])
    return out


def reconstruct_erosion(marker, mask) -> np.ndarray:
    """Morphological reconstruction by erosion of marker above mask.

    Iterates r <- max(erode3x3(r), mask) until the fixpoint; the 3x3
    erosion uses the 8-neighbourhood restricted to the domain.
    """
    marker = np.asarray(marker, dtype=np.float64)
    mask = np.asarray(mask, dtype=np.float64)
    if marker.shape != mask.shape:
        raise ValueError("marker and mask shapes differ")
    if np.any(marker < mask):
        raise ValueError("marker must dominate the mask for reconstruction by erosion")
    r = marker.copy()
    while True:
        e = r.copy()
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                if dy == 0 and dx == 0:
                    continue
                r0, r1, c0, c1 = _valid_box(r.shape, dy, dx)
                np.copyto(
                    e[r0:r1, c0:c1],
                    np.minimum(e[r0:r1, c0:c1], r[r0 + dy : r1 + dy, c0 + dx : c1 + dx]),
                )
        nxt = np.maximum(e, mask)
        if np.array_equal(nxt, r):
            return nxt
        r = nxt
