"""Logarithmic image processing (LIP) arithmetic and grey-scale transforms.

The LIP convention inverts the usual display scale: grey level 0 is white
(fully transparent) and the upper bound M (256 for 8-bit data) is black.
Under that convention images form the positive cone of a real vector space
whose addition and scalar multiplication model physical stacking of
half-transparent layers.  Everything in this module is a pure pointwise
function of numpy arrays (or scalars); arrays are never modified in place.

Value domains
-------------
Image values live in ``[0, M[``.  Several operations (LIP negation, LIP
subtraction, addition of negative constants) leave that cone and produce
values in ``]-inf, M[``; such arrays are said to be in *extended* range
mode.  All functions accept extended-range input unless documented
otherwise.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

DEFAULT_M = 256.0

# Grey levels closer to M than this are capped before the linearizing
# transform so downstream min/max arithmetic stays finite.  The cap is far
# below 8-bit quantization.
GREY_CAP_BELOW_M = 2.0 ** -20


class RangeMode(enum.Enum):
    """Value-range contract of a grey image."""

    IMAGE = "image"          # values in [0, M[
    EXTENDED = "extended"    # values in ]-inf, M[


@dataclass(frozen=True)
class LipScale:
    """Grey-scale configuration: the exclusive upper bound M."""

    m: float = DEFAULT_M

    def __post_init__(self) -> None:
        if not (self.m > 0 and np.isfinite(self.m)):
            raise ValueError(f"grey-scale bound must be positive and finite, got {self.m}")


@dataclass
class GreyImage:
    """A 2-D grey-level image with its scale and range mode.

    ``values`` is a float64 array indexed ``[row, col]``.  Mixing images
    with different scales is an error, never a silent coercion.
    """

    values: np.ndarray
    scale: LipScale = field(default_factory=LipScale)
    range_mode: RangeMode = RangeMode.IMAGE

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.size == 0:
            raise ValueError("image values must form a non-empty 2-D array")
        m = self.scale.m
        if np.any(np.isnan(v)):
            raise ValueError("image contains NaN")
        if np.any(v >= m):
            raise ValueError(f"image values must stay below the scale bound {m}")
        if self.range_mode is RangeMode.IMAGE and np.any(v < 0):
            raise ValueError("negative values require extended range mode")
        self.values = v

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def m(self) -> float:
        return self.scale.m

    def check_compatible(self, other: "GreyImage") -> None:
        if self.scale != other.scale:
            raise ValueError(f"grey-scale mismatch: {self.scale} vs {other.scale}")
        if self.values.shape != other.values.shape:
            raise ValueError(f"shape mismatch: {self.values.shape} vs {other.values.shape}")

    # Thin arithmetic wrappers; the array functions below do the work.
    def add(self, other) -> "GreyImage":
        if isinstance(other, GreyImage):
            self.check_compatible(other)
            g, g_img = other.values, other.range_mode is RangeMode.IMAGE
        else:
            g, g_img = float(other), float(other) >= 0
        out = lip_add(self.values, g, self.m)
        mode = RangeMode.IMAGE if (self.range_mode is RangeMode.IMAGE and g_img) else RangeMode.EXTENDED
        return GreyImage(out, self.scale, mode)

    def negate(self) -> "GreyImage":
        return GreyImage(lip_neg(self.values, self.m), self.scale, RangeMode.EXTENDED)

    def subtract(self, other) -> "GreyImage":
        if isinstance(other, GreyImage):
            self.check_compatible(other)
            g = other.values
        else:
            g = float(other)
        return GreyImage(lip_sub(self.values, g, self.m), self.scale, RangeMode.EXTENDED)

    def scale_by(self, alpha: float) -> "GreyImage":
        return GreyImage(lip_mul(alpha, self.values, self.m), self.scale, self.range_mode)

    def complemented(self) -> "GreyImage":
        if self.range_mode is not RangeMode.IMAGE:
            raise ValueError("complement is only defined for image-range values")
        return GreyImage(complement(self.values, self.m), self.scale, RangeMode.IMAGE)


def _check_at_most(f, m: float, what: str = "operand") -> None:
    # the closure value m itself is allowed: it absorbs under (+) and (x)
    if np.any(np.asarray(f) > m):
        raise ValueError(f"{what} has values above the scale bound {m}")


def _check_strictly_below(f, m: float, what: str = "operand") -> None:
    if np.any(np.asarray(f) >= m):
        raise ValueError(f"{what} has values at or above the scale bound {m}")


def lip_add(f, g, m: float = DEFAULT_M):
    """LIP addition ``f + g - f*g/m`` (stacking of two absorbing layers)."""
    f = np.asarray(f, dtype=np.float64) if not np.isscalar(f) else float(f)
    g = np.asarray(g, dtype=np.float64) if not np.isscalar(g) else float(g)
    _check_at_most(f, m)
    _check_at_most(g, m)
    return f + g - f * g / m


def lip_neg(f, m: float = DEFAULT_M):
    """LIP opposite ``(-f) / (1 - f/m)``; satisfies f (+) neg(f) = 0.

    The result is generally not an image (it takes negative values for
    f > 0), so callers receive extended-range data.  Errors at f = m, the
    only value without an opposite.
    """
    f = np.asarray(f, dtype=np.float64) if not np.isscalar(f) else float(f)
    _check_strictly_below(f, m)
    return (-f) / (1.0 - f / m)


def lip_sub(f, g, m: float = DEFAULT_M):
    """LIP difference ``(f - g) / (1 - g/m)``; an image iff f >= g."""
    f = np.asarray(f, dtype=np.float64) if not np.isscalar(f) else float(f)
    g = np.asarray(g, dtype=np.float64) if not np.isscalar(g) else float(g)
    _check_at_most(f, m)
    _check_strictly_below(g, m, "subtrahend")
    return (f - g) / (1.0 - g / m)


def lip_mul(alpha: float, f, m: float = DEFAULT_M):
    """LIP scalar multiplication ``m - m*(1 - f/m)**alpha``.

    alpha >= 1 darkens, alpha in ]0,1[ lightens.  Models scaling of the
    absorbing layer thickness by alpha.
    """
    if not (alpha > 0):
        raise ValueError(f"scalar ratio must be positive, got {alpha}")
    f = np.asarray(f, dtype=np.float64) if not np.isscalar(f) else float(f)
    _check_at_most(f, m)
    return m - m * (1.0 - f / m) ** alpha


def complement(f, m: float = DEFAULT_M):
    """Grey-scale complement ``m - f`` (involutive)."""
    f = np.asarray(f, dtype=np.float64) if not np.isscalar(f) else float(f)
    return m - f


def log_transmittance(f, m: float = DEFAULT_M):
    """``ln(1 - f/m)``: log of the fraction of light passing through.

    Decreasing bijection from ]-inf, m[ onto the reals; 0 maps to 0 and
    f = m maps to -inf (representable, never an error).
    """
    f = np.asarray(f, dtype=np.float64) if not np.isscalar(f) else float(f)
    _check_at_most(f, m)
    with np.errstate(divide="ignore"):
        return np.log1p(np.negative(f) / m)


def log_absorbance(f, m: float = DEFAULT_M):
    """``ln(-ln(1 - f/m))``: log of the optical absorbance.

    Requires f > 0 (absorbance must be positive); f = 0 yields -inf.
    LIP scalar multiplication becomes an ordinary shift in this domain:
    ``log_absorbance(lip_mul(a, f)) = log_absorbance(f) + ln(a)``.
    """
    f = np.asarray(f, dtype=np.float64) if not np.isscalar(f) else float(f)
    if np.any(np.asarray(f) < 0):
        raise ValueError("log_absorbance requires nonnegative grey values")
    with np.errstate(divide="ignore"):
        return np.log(-log_transmittance(f, m))


def grey_to_linear(f, m: float = DEFAULT_M):
    """Order isomorphism ``-m * ln(1 - f/m)`` onto the additive reals.

    Carries LIP addition to ordinary addition and LIP difference to
    ordinary difference, which is what lets min/max filters act on
    transformed values.  Increasing bijection; inverse is
    :func:`linear_to_grey`.
    """
    return -m * log_transmittance(f, m)


def linear_to_grey(u, m: float = DEFAULT_M):
    """Inverse isomorphism ``m * (1 - exp(-u/m))``."""
    u = np.asarray(u, dtype=np.float64) if not np.isscalar(u) else float(u)
    return -m * np.expm1(np.negative(u) / m)


def contrast_mult(f, g, m: float = DEFAULT_M):
    """Multiplicative contrast: the ratio by which g must be LIP-scaled to reach f.

    ``contrast_mult(f, g) = ln(1 - f/m) / ln(1 - g/m)``, defined for
    0 < g < m and 0 <= f < m.  Satisfies
    ``lip_mul(contrast_mult(f, g), g) == f`` pointwise.
    """
    g_arr = np.asarray(g)
    if np.any(g_arr <= 0) or np.any(g_arr >= m):
        raise ValueError("multiplicative contrast requires 0 < g < m")
    if np.any(np.asarray(f) < 0):
        raise ValueError("multiplicative contrast requires f >= 0")
    return log_transmittance(f, m) / log_transmittance(g, m)


def contrast_add(f, g, m: float = DEFAULT_M):
    """Additive contrast: the constant to LIP-add to g to reach f.

    Equals ``lip_sub(f, g)``; satisfies ``lip_add(contrast_add(f, g), g) == f``.
    """
    return lip_sub(f, g, m)


def clamp_grey(f, m: float = DEFAULT_M, eps: float = 0.5):
    """Clip values into ``[eps, m - eps]``.

    Multiplicative operations need strictly interior grey values; a
    half-level clamp perturbs 8-bit data by less than quantization.
    ``eps=0`` returns the input unchanged.
    """
    if eps < 0:
        raise ValueError("clamp width must be nonnegative")
    f = np.asarray(f, dtype=np.float64)
    if eps == 0:
        return f
    if 2 * eps >= m:
        raise ValueError("clamp width leaves an empty value range")
    return np.clip(f, eps, m - eps)
