"""Synthetic data: lighting simulation, noisy planes and demo scenes.

All randomness flows through one seeded 64-bit generator per call, so
identical parameters and seed reproduce identical arrays.
"""

from __future__ import annotations

import numpy as np

from .lip import GreyImage, RangeMode, complement, lip_add, lip_mul
from .probes import ProbeFunction, ring_disk_probe


def simulate_mul_darken(img, alpha: float, via_complement: bool = True, m: float = 256.0):
    """Darken by LIP multiplication; via_complement applies it to the complement.

    With the complement convention the returned values stay in [0, m[;
    without it the image itself is LIP-multiplied.
    """
    if not (alpha > 0):
        raise ValueError("darkening ratio must be positive")
    values, mode = _unwrap(img)
    if via_complement:
        out = complement(lip_mul(alpha, complement(values, m), m), m)
    else:
        out = lip_mul(alpha, values, m)
    return _rewrap(img, out, m, mode)


def simulate_add_darken(img, k: float, m: float = 256.0):
    """Darken (k > 0) or lighten (k < 0) by LIP addition of a constant.

    Negative constants produce extended-range (negative) values; callers
    get them as-is.
    """
    if not (k < m):
        raise ValueError(f"constant must stay below the bound {m}")
    values, _ = _unwrap(img)
    out = lip_add(k, values, m)
    mode = RangeMode.IMAGE if np.all(out >= 0) else RangeMode.EXTENDED
    return _rewrap(img, out, m, mode)


def _unwrap(img):
    if isinstance(img, GreyImage):
        return img.values, img.range_mode
    return np.asarray(img, dtype=np.float64), None


def _rewrap(img, values, m, mode):
    if isinstance(img, GreyImage):
        return GreyImage(values, img.scale, mode or img.range_mode)
    return values


def gen_noisy_plane(
    width: int,
    height: int,
    plane_value: float = 100.0,
    noise_density: float = 0.08,
    noise_sigma: float = np.sqrt(5.0),
    seed: int = 0,
    m: float = 256.0,
):
    """A constant plane g and a copy f with sparse Gaussian perturbations.

    A noise_density fraction of the pixels (chosen by the seeded
    generator) receives zero-mean Gaussian noise; values are clipped into
    [0.5, m - 0.5] so both metrics accept them.  Returns (f, g).
    """
    if not (0.0 <= noise_density <= 1.0):
        raise ValueError("noise density must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    g = np.full((height, width), float(plane_value))
    f = g.copy()
    n_noisy = int(noise_density * f.size)
    if n_noisy:
        idx = rng.choice(f.size, size=n_noisy, replace=False)
        f.ravel()[idx] += rng.normal(0.0, noise_sigma, size=n_noisy)
        np.clip(f, 0.5, m - 0.5, out=f)
    return f, g


def stamp_probe(values: np.ndarray, probe: ProbeFunction, row: int, col: int) -> None:
    """Write the probe's grey values into an image at (row, col), in place."""
    rows = row + probe.offsets[:, 0]
    cols = col + probe.offsets[:, 1]
    if rows.min() < 0 or cols.min() < 0 or rows.max() >= values.shape[0] or cols.max() >= values.shape[1]:
        raise ValueError("stamp sticks out of the image")
    values[rows, cols] = probe.values


def make_bench_scene(width: int = 1224, height: int = 918, seed: int = 0, m: float = 256.0):
    """Benchmark image: smooth background, a grid of stamped targets, mild noise.

    Mirrors the kind of content the distance maps are used on; dimensions
    default to the timing comparison's reference size.
    """
    rng = np.random.default_rng(seed)
    probe = ring_disk_probe(m=m)
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    values = (
        110.0
        + 45.0 * np.sin(2.1 * np.pi * yy / height + 0.4)
        + 35.0 * np.cos(1.6 * np.pi * xx / width + 1.1)
    )
    margin = int(probe.offsets.max()) + 2
    for r in range(margin + 45, height - margin, 120):
        for c in range(margin + 45, width - margin, 160):
            stamp_probe(values, probe, r, c)
    values += rng.normal(0.0, 2.0, values.shape)
    return np.clip(values, 1.0, m - 2.0), probe


def make_detection_scene(
    size: int = 256,
    seed: int = 7,
    m: float = 256.0,
    mul_alpha: float = 5.0,
    add_k: float | None = None,
):
    """Demo scene: four probe stamps on a smooth background.

    Two stamps are left as-is, one is darkened by LIP multiplication of
    the complemented patch (ratio mul_alpha) and one by LIP addition of
    add_k (default: the LIP opposite of 100, strongly negative).  Returns
    (values, probe, positions) with positions ordered [plain, plain,
    mul-darkened, add-darkened].  The add-darkened stamp takes the scene
    into extended (negative) value range.
    """
    from .lip import lip_neg

    if add_k is None:
        add_k = float(lip_neg(100.0, m))
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)
    values = (
        100.0
        + 25.0 * np.sin(2.2 * np.pi * yy / size + 0.7)
        + 20.0 * np.cos(1.7 * np.pi * xx / size + rng.uniform(0, np.pi))
    )
    probe = ring_disk_probe(m=m)
    margin = int(probe.offsets.max()) + 4
    quarter = size // 4
    positions = [
        (quarter, quarter),
        (quarter, 3 * quarter),
        (3 * quarter, quarter),
        (3 * quarter, 3 * quarter),
    ]
    positions = [
        (int(np.clip(r, margin, size - margin)), int(np.clip(c, margin, size - margin)))
        for r, c in positions
    ]
    for r, c in positions[:2]:
        stamp_probe(values, probe, r, c)
    darker_mul = ProbeFunction(
        probe.offsets,
        complement(lip_mul(mul_alpha, complement(probe.values, m), m), m),
        probe.scale,
    )
    stamp_probe(values, darker_mul, *positions[2])
    darker_add = ProbeFunction(probe.offsets, lip_add(add_k, probe.values, m), probe.scale)
    stamp_probe(values, darker_add, *positions[3])
    return values, probe, positions
