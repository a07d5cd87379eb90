"""Grayscale morphology on arbitrary real arrays.

Dilation/erosion with structuring functions (additive and multiplicative),
windowed rank filters, reconstruction by erosion, h-minima, regional
minima and area filtering.  The border policy is always *restrict*: the
window at x is intersected with the domain, which is equivalent to padding
with the neutral element of the reduction.

All operators are pure functions; the heavy sliding-window work is
delegated to the selected kernel backend.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from . import _backend as bk
from .probes import ProbeFunction, reflect

EIGHT_CONN = np.ones((3, 3), dtype=bool)


def _offsets(probe_or_offsets):
    if isinstance(probe_or_offsets, ProbeFunction):
        off = probe_or_offsets.offsets
    else:
        off = np.asarray(probe_or_offsets, dtype=np.int64)
    return off[:, 0], off[:, 1]


def dilate_add(f: np.ndarray, probe: ProbeFunction) -> np.ndarray:
    """Additive dilation: max over h of f(x - h) + b(h); empty windows -> -inf."""
    refl = reflect(probe)
    oy, ox = _offsets(refl)
    return bk.extremum(f, oy, ox, refl.values, True, -np.inf)


def erode_add(f: np.ndarray, probe: ProbeFunction) -> np.ndarray:
    """Additive erosion: min over h of f(x + h) - b(h); empty windows -> +inf."""
    oy, ox = _offsets(probe)
    return bk.extremum(f, oy, ox, -probe.values, False, np.inf)


def dilate_mult(f: np.ndarray, values: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """Multiplicative dilation: max over h of f(x - h) * b(h).

    f and b are nonnegative extended reals; the product is taken as 0
    whenever either factor is 0 (even against +inf).
    """
    f = np.asarray(f, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if np.any(f < 0) or np.any(values < 0):
        raise ValueError("multiplicative morphology needs nonnegative operands")
    oy, ox = _offsets(np.asarray(offsets) * -1)
    out = np.full(f.shape, -np.inf)
    h, w = f.shape
    for j in range(len(oy)):
        r0, r1 = max(0, -oy[j]), min(h, h - oy[j])
        c0, c1 = max(0, -ox[j]), min(w, w - ox[j])
        if r0 >= r1 or c0 >= c1:
            continue
        block = f[r0 + oy[j] : r1 + oy[j], c0 + ox[j] : c1 + ox[j]]
        with np.errstate(invalid="ignore"):
            prod = block * values[j]
        prod[np.isnan(prod)] = 0.0  # 0 * inf convention
        np.copyto(out[r0:r1, c0:c1], np.maximum(out[r0:r1, c0:c1], prod))
    return out


def erode_mult(f: np.ndarray, values: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """Multiplicative erosion: min over h of f(x + h) / b(h).

    The quotient is +inf whenever f is +inf or b is 0.
    """
    f = np.asarray(f, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if np.any(f < 0) or np.any(values < 0):
        raise ValueError("multiplicative morphology needs nonnegative operands")
    oy, ox = _offsets(np.asarray(offsets))
    out = np.full(f.shape, np.inf)
    h, w = f.shape
    for j in range(len(oy)):
        r0, r1 = max(0, -oy[j]), min(h, h - oy[j])
        c0, c1 = max(0, -ox[j]), min(w, w - ox[j])
        if r0 >= r1 or c0 >= c1:
            continue
        block = f[r0 + oy[j] : r1 + oy[j], c0 + ox[j] : c1 + ox[j]]
        with np.errstate(invalid="ignore", divide="ignore"):
            quot = block / values[j]
        quot[np.isnan(quot)] = np.inf  # inf / inf and x / 0 conventions
        np.copyto(out[r0:r1, c0:c1], np.minimum(out[r0:r1, c0:c1], quot))
    return out


def window_min_count(shape, probe_or_offsets) -> int:
    oy, ox = _offsets(probe_or_offsets)
    return int(bk.window_counts(shape[0], shape[1], oy, ox).min())


def rank_window(
    f: np.ndarray,
    offsets: np.ndarray,
    weights: np.ndarray,
    k: int,
    side: str,
) -> np.ndarray:
    """Windowed order statistic of {f(x+h) - weights(h)}.

    side='top' returns the (k+1)-th largest value, side='bottom' the
    (k+1)-th smallest.  k=0 reduces to the corresponding dilation/erosion.
    Raises if k reaches the cardinality of some border window.
    """
    if side not in ("top", "bottom"):
        raise ValueError("side must be 'top' or 'bottom'")
    if k < 0:
        raise ValueError("drop count must be nonnegative")
    f = np.asarray(f, dtype=np.float64)
    offsets = np.asarray(offsets, dtype=np.int64)
    weights = np.asarray(weights, dtype=np.float64)
    if k >= window_min_count(f.shape, offsets):
        raise ValueError(f"drop count {k} exhausts a border window")
    oy, ox = offsets[:, 0], offsets[:, 1]
    return bk.rank_fixed(f, oy, ox, -weights, side == "top", k, np.nan)


def flat_max_filter(f: np.ndarray, probe_or_offsets) -> np.ndarray:
    """Sliding max of f over the window {x + h}; restrict border."""
    oy, ox = _offsets(probe_or_offsets)
    return bk.extremum(f, oy, ox, np.zeros(len(oy)), True, -np.inf)


def flat_min_filter(f: np.ndarray, probe_or_offsets) -> np.ndarray:
    """Sliding min of f over the window {x + h}; restrict border."""
    oy, ox = _offsets(probe_or_offsets)
    return bk.extremum(f, oy, ox, np.zeros(len(oy)), False, np.inf)


def reconstruct_erosion(marker: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Geodesic reconstruction by erosion of marker above mask (8-conn)."""
    return bk.reconstruct_erosion(marker, mask)


def hminima(f: np.ndarray, h: float) -> np.ndarray:
    """Suppress regional minima shallower than h.

    Reconstruction by erosion of f + h above f; minima of depth < h merge
    into their surroundings, deeper ones are raised by exactly h.
    """
    if not (h > 0):
        raise ValueError("minimum depth h must be positive")
    f = np.asarray(f, dtype=np.float64)
    if not np.all(np.isfinite(f)):
        raise ValueError("h-minima needs finite values")
    return bk.reconstruct_erosion(f + h, f)


def regional_minima(f: np.ndarray) -> np.ndarray:
    """Label the regional minima of f (8-connectivity).

    A regional minimum is a connected plateau with no strictly lower
    neighbour.  Returns an int32 label array, 0 outside minima.  Exact:
    plateau propagation uses value equality, no tolerance.
    """
    f = np.asarray(f, dtype=np.float64)
    if not np.all(np.isfinite(f)):
        raise ValueError("regional minima need finite values")
    h, w = f.shape
    nonmin = np.zeros(f.shape, dtype=bool)
    # seed: pixels with a strictly lower 8-neighbour
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dy == 0 and dx == 0:
                continue
            r0, r1 = max(0, -dy), min(h, h - dy)
            c0, c1 = max(0, -dx), min(w, w - dx)
            nonmin[r0:r1, c0:c1] |= f[r0 + dy : r1 + dy, c0 + dx : c1 + dx] < f[r0:r1, c0:c1]
    # spread through equal-valued plateaus
    while True:
        grew = False
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                if dy == 0 and dx == 0:
                    continue
                r0, r1 = max(0, -dy), min(h, h - dy)
                c0, c1 = max(0, -dx), min(w, w - dx)
                src = nonmin[r0 + dy : r1 + dy, c0 + dx : c1 + dx]
                eq = f[r0 + dy : r1 + dy, c0 + dx : c1 + dx] == f[r0:r1, c0:c1]
                add = src & eq & ~nonmin[r0:r1, c0:c1]
                if add.any():
                    nonmin[r0:r1, c0:c1] |= add
                    grew = True
        if not grew:
            break
    labels, _ = ndimage.label(~nonmin, structure=EIGHT_CONN)
    return labels.astype(np.int32)


def area_opening(mask: np.ndarray, min_area: int, max_area: int) -> np.ndarray:
    """Keep the 8-connected components of a binary mask with area in [min_area, max_area]."""
    if not (0 < min_area <= max_area):
        raise ValueError("need 0 < min_area <= max_area")
    labels, n = ndimage.label(np.asarray(mask, dtype=bool), structure=EIGHT_CONN)
    if n == 0:
        return np.zeros(mask.shape, dtype=bool)
    areas = np.bincount(labels.ravel(), minlength=n + 1)
    keep = (areas >= min_area) & (areas <= max_area)
    keep[0] = False
    return keep[labels]
