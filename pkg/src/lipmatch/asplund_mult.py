"""Multiplicative Asplund probing: distances and distance maps.

The probe brackets each window between its smallest upper and largest
lower LIP-homotheties; the distance is the log-ratio of the two scaling
factors, which makes it blind to any LIP-multiplicative lighting change.
Three equivalent map computations are provided: the direct per-window
evaluation, the morphological form (a max/min span of the log-absorbance
image under probe weights) and the closed form for flat probes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _backend as bk
from .distmap import MULT, DistanceMap
from .lip import GreyImage, clamp_grey, log_transmittance
from .probes import ProbeFunction

DEFAULT_CLAMP = 0.5


def _image_values(f) -> tuple[np.ndarray, float | None]:
    if isinstance(f, GreyImage):
        return f.values, f.m
    return np.asarray(f, dtype=np.float64), None


@dataclass
class MultProbeContext:
    """Probe with the precomputed arrays used by every multiplicative map.

    drop_frac = (1-p)/2 is the per-side fraction of window samples
    discarded by the tolerant metric; border windows recompute their drop
    count from their actual size.
    """

    probe: ProbeFunction
    p: float = 1.0
    btilde: np.ndarray = field(init=False)
    bhat: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        if not (0.0 < self.p <= 1.0):
            raise ValueError("tolerance p must lie in ]0, 1]")
        v = self.probe.values
        if np.any(v <= 0) or np.any(v >= self.probe.m):
            raise ValueError("multiplicative probes need values strictly inside ]0, m[")
        self.btilde = log_transmittance(v, self.probe.m)
        self.bhat = np.log(-self.btilde)

    @property
    def m(self) -> float:
        return self.probe.m

    @property
    def drop_frac(self) -> float:
        return (1.0 - self.p) / 2.0

    @property
    def n_drop(self) -> int:
        """Per-side drop count for a full window."""
        return int(self.drop_frac * len(self.probe))


def _as_context(probe, p: float | None) -> MultProbeContext:
    if isinstance(probe, MultProbeContext):
        if p is not None and probe.p != p:
            raise ValueError("tolerance disagrees with the prepared context")
        return probe
    return MultProbeContext(probe, 1.0 if p is None else p)


def dist_mult(f, g, p: float = 1.0, m: float = 256.0) -> float:
    """Multiplicative probing distance between two same-shape value sets.

    With p < 1, a fraction (1-p)/2 of the most extreme contrast ratios is
    discarded on each side before taking the bracketing factors.
    """
    f = np.asarray(f, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    if f.shape != g.shape:
        raise ValueError("operands must share their index set")
    for name, a in (("image patch", f), ("probe", g)):
        if np.any(a <= 0) or np.any(a >= m):
            raise ValueError(f"{name} values must lie strictly inside ]0, {m}[")
    gamma = (log_transmittance(f, m) / log_transmittance(g, m)).ravel()
    lam, mu = _bracket(gamma, p)
    return float(np.log(lam / mu))


def _bracket(gamma: np.ndarray, p: float) -> tuple[float, float]:
    if not (0.0 < p <= 1.0):
        raise ValueError("tolerance p must lie in ]0, 1]")
    if p == 1.0:
        return float(gamma.max()), float(gamma.min())
    k = int((1.0 - p) / 2.0 * gamma.size)
    if 2 * k >= gamma.size:
        raise ValueError("tolerance drops every window sample")
    s = np.sort(gamma)
    return float(s[gamma.size - 1 - k]), float(s[k])


def map_mult_direct(f, probe, p: float | None = None, clamp_eps: float = DEFAULT_CLAMP) -> DistanceMap:
    """Distance map by direct double-sided probing of every window."""
    ctx = _as_context(probe, p)
    vals, m = _image_values(f)
    _check_scale(m, ctx)
    fc = clamp_grey(vals, ctx.m, clamp_eps)
    _check_positive(fc, ctx.m)
    out = bk.map_mult_direct(
        fc, ctx.probe.offsets[:, 0], ctx.probe.offsets[:, 1], ctx.btilde, ctx.m, ctx.drop_frac
    )
    return DistanceMap(out, MULT, ctx.probe.describe(), ctx.p)


def map_mult_morpho(f, probe, p: float | None = None, clamp_eps: float = DEFAULT_CLAMP) -> DistanceMap:
    """Distance map as a dilation-erosion span of the log-absorbance image.

    Equals the direct map pointwise; the tolerant version swaps the
    extrema for rank filters over the same weighted windows.
    """
    ctx = _as_context(probe, p)
    vals, m = _image_values(f)
    _check_scale(m, ctx)
    fc = clamp_grey(vals, ctx.m, clamp_eps)
    _check_positive(fc, ctx.m)
    fhat = np.log(-log_transmittance(fc, ctx.m))
    top, bot = bk.span_rank(
        fhat, ctx.probe.offsets[:, 0], ctx.probe.offsets[:, 1], -ctx.bhat, ctx.drop_frac
    )
    out = top - bot
    out[np.isneginf(top)] = 0.0  # empty border windows
    return DistanceMap(out, MULT, ctx.probe.describe(), ctx.p)


def map_mult_flat(f, probe, p: float | None = None, clamp_eps: float = DEFAULT_CLAMP) -> DistanceMap:
    """Closed form for flat probes: only plain max/min (or rank) filters.

    The probe grey value cancels, so the map depends on the support alone.
    """
    ctx = _as_context(probe, p)
    if not ctx.probe.is_flat:
        raise ValueError("the flat closed form needs a flat probe")
    vals, m = _image_values(f)
    _check_scale(m, ctx)
    fc = clamp_grey(vals, ctx.m, clamp_eps)
    _check_positive(fc, ctx.m)
    oy, ox = ctx.probe.offsets[:, 0], ctx.probe.offsets[:, 1]
    top, bot = bk.span_rank(fc, oy, ox, np.zeros(len(oy)), ctx.drop_frac)
    empty = np.isneginf(top)
    top[empty] = bot[empty] = fc.flat[0]
    with np.errstate(divide="ignore"):
        out = np.log(np.log1p(-top / ctx.m) / np.log1p(-bot / ctx.m))
    out[empty] = 0.0
    return DistanceMap(out, MULT, ctx.probe.describe(), ctx.p)


def scale_upper_map(f, probe: ProbeFunction, clamp_eps: float = 0.0) -> np.ndarray:
    """Least upper scaling map: smallest alpha with window <= alpha (x) probe.

    A dilation from the image lattice to the nonnegative extended reals;
    accepts the closed value range [0, m].
    """
    return _scale_bound(f, probe, want_max=True, clamp_eps=clamp_eps)


def scale_lower_map(f, probe: ProbeFunction, clamp_eps: float = 0.0) -> np.ndarray:
    """Greatest lower scaling map (an erosion); dual of scale_upper_map."""
    return _scale_bound(f, probe, want_max=False, clamp_eps=clamp_eps)


def _scale_bound(f, probe, want_max: bool, clamp_eps: float) -> np.ndarray:
    ctx = MultProbeContext(probe)
    vals, m = _image_values(f)
    _check_scale(m, ctx)
    if clamp_eps:
        vals = clamp_grey(vals, ctx.m, clamp_eps)
    if np.any(vals < 0) or np.any(vals > ctx.m):
        raise ValueError(f"values must lie in [0, {ctx.m}]")
    with np.errstate(divide="ignore"):
        fhat = np.log(-np.log1p(-vals / ctx.m))
    oy, ox = ctx.probe.offsets[:, 0], ctx.probe.offsets[:, 1]
    ext = bk.extremum(fhat, oy, ox, -ctx.bhat, want_max, -np.inf if want_max else np.inf)
    return np.exp(ext)


def _check_scale(m: float | None, ctx: MultProbeContext) -> None:
    if m is not None and m != ctx.m:
        raise ValueError(f"image scale {m} does not match probe scale {ctx.m}")


def _check_positive(fc: np.ndarray, m: float) -> None:
    if np.any(fc <= 0) or np.any(fc >= m):
        raise ValueError(
            "multiplicative maps need values strictly inside ]0, m[; "
            "use a positive clamp width for raw 8-bit data"
        )
