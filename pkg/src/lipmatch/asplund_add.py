"""Additive Asplund probing: distances and distance maps.

The probe brackets each window between two LIP-translates of itself; the
distance is the LIP difference of the two bracketing constants, which
makes it blind to exposure-time changes (LIP addition of any constant).
Negative-valued inputs, as produced by darkening with a negative constant,
are handled as-is.  The morphological form conjugates ordinary
dilation/erosion with the order isomorphism onto the additive reals.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _backend as bk
from .distmap import ADD, DistanceMap
from .lip import GREY_CAP_BELOW_M, GreyImage, lip_sub
from .probes import ProbeFunction


def _image_values(f) -> tuple[np.ndarray, float | None]:
    if isinstance(f, GreyImage):
        return f.values, f.m
    return np.asarray(f, dtype=np.float64), None


@dataclass
class AddProbeContext:
    """Probe with the precomputed arrays used by every additive map.

    Grey values within 2**-20 of the bound m are capped before the linear
    transform so the span arithmetic stays finite; the perturbation is far
    below 8-bit quantization.
    """

    probe: ProbeFunction
    p: float = 1.0
    bval: np.ndarray = field(init=False)
    bden: np.ndarray = field(init=False)
    xib: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        if not (0.0 < self.p <= 1.0):
            raise ValueError("tolerance p must lie in ]0, 1]")
        m = self.probe.m
        self.bval = np.minimum(self.probe.values, m - GREY_CAP_BELOW_M)
        self.bden = 1.0 - self.bval / m
        self.xib = -m * np.log1p(-self.bval / m)

    @property
    def m(self) -> float:
        return self.probe.m

    @property
    def drop_frac(self) -> float:
        return (1.0 - self.p) / 2.0

    @property
    def n_drop(self) -> int:
        return int(self.drop_frac * len(self.probe))


def _as_context(probe, p: float | None) -> AddProbeContext:
    if isinstance(probe, AddProbeContext):
        if p is not None and probe.p != p:
            raise ValueError("tolerance disagrees with the prepared context")
        return probe
    return AddProbeContext(probe, 1.0 if p is None else p)


def dist_add(f, g, p: float = 1.0, m: float = 256.0) -> float:
    """Additive probing distance between two same-shape value sets.

    Values may be negative but must stay finite and below m.  The result
    lies in [0, m[.
    """
    f = np.asarray(f, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    if f.shape != g.shape:
        raise ValueError("operands must share their index set")
    for name, a in (("image patch", f), ("probe", g)):
        if not np.all(np.isfinite(a)) or np.any(a >= m):
            raise ValueError(f"{name} values must be finite and below {m}")
    gamma = lip_sub(f, g, m).ravel()
    c1, c2 = _bracket(gamma, p)
    return float(lip_sub(c1, c2, m))


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


def _prep_values(f, ctx: AddProbeContext) -> np.ndarray:
    vals, m = _image_values(f)
    if m is not None and m != ctx.m:
        raise ValueError(f"image scale {m} does not match probe scale {ctx.m}")
    if not np.all(np.isfinite(vals)) or np.any(vals >= ctx.m):
        raise ValueError(f"additive maps need finite values below {ctx.m}")
    return np.minimum(vals, ctx.m - GREY_CAP_BELOW_M)


def map_add_direct(f, probe, p: float | None = None) -> DistanceMap:
    """Distance map by direct double-sided probing of every window."""
    ctx = _as_context(probe, p)
    fv = _prep_values(f, ctx)
    out = bk.map_add_direct(
        fv, ctx.probe.offsets[:, 0], ctx.probe.offsets[:, 1], ctx.bval, ctx.bden,
        ctx.m, ctx.drop_frac,
    )
    return DistanceMap(out, ADD, ctx.probe.describe(), ctx.p)


def map_add_morpho(f, probe, p: float | None = None) -> DistanceMap:
    """Distance map via the linear-domain dilation-erosion span.

    The image is carried to the additive reals, spanned by max/min (or
    rank) filters under the transformed probe weights, and the span is
    carried back.  Equals the direct map pointwise.
    """
    ctx = _as_context(probe, p)
    fv = _prep_values(f, ctx)
    u = -ctx.m * np.log1p(-fv / ctx.m)
    top, bot = bk.span_rank(
        u, ctx.probe.offsets[:, 0], ctx.probe.offsets[:, 1], -ctx.xib, ctx.drop_frac
    )
    span = top - bot
    span[np.isneginf(top)] = 0.0  # empty border windows
    out = -ctx.m * np.expm1(-span / ctx.m)
    return DistanceMap(out, ADD, ctx.probe.describe(), ctx.p)


def map_add_flat(f, probe, p: float | None = None) -> DistanceMap:
    """Closed form for flat probes: a LIP difference of plain max/min filters.

    The probe grey value cancels, so the map depends on the support alone.
    """
    ctx = _as_context(probe, p)
    if not ctx.probe.is_flat:
        raise ValueError("the flat closed form needs a flat probe")
    fv = _prep_values(f, ctx)
    oy, ox = ctx.probe.offsets[:, 0], ctx.probe.offsets[:, 1]
    top, bot = bk.span_rank(fv, oy, ox, np.zeros(len(oy)), ctx.drop_frac)
    empty = np.isneginf(top)
    top[empty] = bot[empty] = 0.0
    out = lip_sub(top, bot, ctx.m)
    out[empty] = 0.0
    return DistanceMap(out, ADD, ctx.probe.describe(), ctx.p)


def shift_upper_map(f, probe: ProbeFunction) -> np.ndarray:
    """Least upper shift map: smallest c with window <= c (+) probe.

    A dilation on the extended value lattice ]-inf, m]; constants map to
    themselves shifted, and the lattice bottom is a fixed point.
    """
    return _shift_bound(f, probe, want_max=True)


def shift_lower_map(f, probe: ProbeFunction) -> np.ndarray:
    """Greatest lower shift map (an erosion); dual of shift_upper_map."""
    return _shift_bound(f, probe, want_max=False)


def _shift_bound(f, probe, want_max: bool) -> np.ndarray:
    ctx = AddProbeContext(probe)
    vals, m = _image_values(f)
    if m is not None and m != ctx.m:
        raise ValueError(f"image scale {m} does not match probe scale {ctx.m}")
    if np.any(vals > ctx.m):
        raise ValueError(f"values must lie in [-inf, {ctx.m}]")
    with np.errstate(divide="ignore"):
        u = -ctx.m * np.log1p(-vals / ctx.m)
    oy, ox = ctx.probe.offsets[:, 0], ctx.probe.offsets[:, 1]
    ext = bk.extremum(u, oy, ox, -ctx.xib, want_max, -np.inf if want_max else np.inf)
    return -ctx.m * np.expm1(-ext / ctx.m)
