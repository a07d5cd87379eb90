"""Kernel backend selection: compiled extension with numpy fallback.

The compiled kernels are used when importable; ``LIPMATCH_BACKEND=python``
(or :func:`set_backend`) forces the numpy implementation, which is handy
for debugging and for benchmarking one against the other.
"""

from __future__ import annotations

import contextlib
import os

import numpy as np

from . import _kernels_py as _py

try:
    from . import _kernels as _c

    HAVE_COMPILED = True
except ImportError:  # pragma: no cover - build-environment dependent
    _c = None
    HAVE_COMPILED = False

_FORCED = os.environ.get("LIPMATCH_BACKEND", "auto").lower()
_current = "c" if (HAVE_COMPILED and _FORCED != "python") else "python"
if _FORCED == "c" and not HAVE_COMPILED:
    raise ImportError("LIPMATCH_BACKEND=c but the compiled kernels are not built")


def get_backend() -> str:
    """Name of the active kernel backend: 'c' or 'python'."""
    return _current


def set_backend(name: str) -> None:
    global _current
    if name == "auto":
        name = "c" if HAVE_COMPILED else "python"
    if name not in ("c", "python"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "c" and not HAVE_COMPILED:
        raise ValueError("compiled kernels are not available")
    _current = name


@contextlib.contextmanager
def use_backend(name: str):
    """Temporarily switch the kernel backend."""
    prev = _current
    set_backend(name)
    try:
        yield
    finally:
        set_backend(prev)


def _prep(u, oy, ox, w):
    u = np.ascontiguousarray(u, dtype=np.float64)
    oy = np.ascontiguousarray(oy, dtype=np.int64)
    ox = np.ascontiguousarray(ox, dtype=np.int64)
    w = np.ascontiguousarray(w, dtype=np.float64)
    return u, oy, ox, w


def window_counts(height, width, oy, ox):
    return _py.window_counts(
        height, width, np.asarray(oy, dtype=np.int64), np.asarray(ox, dtype=np.int64)
    )


def extremum(u, oy, ox, w, want_max, empty_val):
    u, oy, ox, w = _prep(u, oy, ox, w)
    if _current == "c":
        return _c.extremum(u, oy, ox, w, want_max, empty_val)
    return _py.extremum(u, oy, ox, w, want_max, empty_val)


def span_minmax(u, oy, ox, w):
    u, oy, ox, w = _prep(u, oy, ox, w)
    if _current == "c":
        return _c.span_minmax(u, oy, ox, w)
    return _py.span_minmax(u, oy, ox, w)


def span_rank(u, oy, ox, w, drop_frac):
    u, oy, ox, w = _prep(u, oy, ox, w)
    if drop_frac == 0.0:
        return span_minmax(u, oy, ox, w)
    if _current == "c":
        return _c.span_rank(u, oy, ox, w, drop_frac)
    return _py.span_rank(u, oy, ox, w, drop_frac)


def rank_fixed(u, oy, ox, w, top_side, k, empty_val):
    u, oy, ox, w = _prep(u, oy, ox, w)
    if _current == "c":
        return _c.rank_fixed(u, oy, ox, w, top_side, int(k), empty_val)
    return _py.rank_filter(u, oy, ox, w, top_side, int(k), empty_val)


def map_mult_direct(f, oy, ox, btilde, m, drop_frac):
    f, oy, ox, btilde = _prep(f, oy, ox, btilde)
    if _current == "c":
        dummy = np.empty(0)
        return _c.map_direct(f, oy, ox, btilde, dummy, m, drop_frac, True)
    return _py.map_mult_direct(f, oy, ox, btilde, m, drop_frac)


def map_add_direct(f, oy, ox, bval, bden, m, drop_frac):
    f, oy, ox, bval = _prep(f, oy, ox, bval)
    bden = np.ascontiguousarray(bden, dtype=np.float64)
    if _current == "c":
        return _c.map_direct(f, oy, ox, bval, bden, m, drop_frac, False)
    return _py.map_add_direct(f, oy, ox, bval, bden, m, drop_frac)


def reconstruct_erosion(marker, mask):
    marker = np.ascontiguousarray(marker, dtype=np.float64)
    mask = np.ascontiguousarray(mask, dtype=np.float64)
    if marker.shape != mask.shape:
        raise ValueError("marker and mask shapes differ")
    if np.any(marker < mask):
        raise ValueError("marker must dominate the mask for reconstruction by erosion")
    if _current == "c":
        return _c.reconstruct_erosion(marker, mask)
    return _py.reconstruct_erosion(marker, mask)
