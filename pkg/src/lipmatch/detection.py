"""Turn a distance map into pattern detections.

Pipeline: suppress shallow minima (h-minima), extract regional minima,
optionally intersect with a low-distance percentile mask, then keep the
components whose area fits the configured bounds.  Lower distance means a
better match, so detections come back sorted by ascending distance.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .distmap import DistanceMap
from .morphology import EIGHT_CONN, hminima, regional_minima


class DetectMethod(enum.Enum):
    PERCENTILE = "percentile"
    HMINIMA = "hminima"
    BOTH = "both"


@dataclass(frozen=True)
class DetectConfig:
    """Detection parameters.

    ``h=None`` picks 5 % of the map's value range, which adapts the
    minimum depth to either metric's scale.  ``max_area=None`` bounds
    components at 1 % of the map (at least 64 px): matches are compact
    minima, while broad flat basins are background.  Pass an explicit
    large value to disable the bound.
    """

    method: DetectMethod = DetectMethod.BOTH
    percentile: float = 37.0
    h: float | None = None
    min_area: int = 1
    max_area: int | None = None

    def __post_init__(self) -> None:
        if not (0.0 < self.percentile < 100.0):
            raise ValueError("percentile must lie in ]0, 100[")
        if self.h is not None and not (self.h > 0):
            raise ValueError("minimum depth h must be positive")
        if self.min_area < 1 or (self.max_area is not None and self.max_area < self.min_area):
            raise ValueError("need 1 <= min_area <= max_area")


@dataclass
class Detection:
    """One located match: the minimum pixel of a surviving component."""

    position: tuple[int, int]
    distance: float
    region: np.ndarray  # (n, 2) pixel coordinates of the component
    area: int


def percentile_threshold(values: np.ndarray, q: float) -> np.ndarray:
    """Mask of pixels at or below the nearest-rank q-th percentile."""
    if not (0.0 < q < 100.0):
        raise ValueError("percentile must lie in ]0, 100[")
    v = np.asarray(values)
    flat = np.sort(v.ravel())
    rank = int(np.ceil(q / 100.0 * flat.size))  # 1-based nearest rank
    thresh = flat[max(rank, 1) - 1]
    return v <= thresh


def detect(dist_map, cfg: DetectConfig = DetectConfig()) -> list[Detection]:
    """Extract detections from a distance map (array or DistanceMap)."""
    values = dist_map.values if isinstance(dist_map, DistanceMap) else np.asarray(dist_map)
    values = values.astype(np.float64)
    if values.size == 0:
        raise ValueError("empty distance map")
    if not np.all(np.isfinite(values)):
        raise ValueError("distance map must be finite")

    if cfg.method is DetectMethod.PERCENTILE:
        candidates = percentile_threshold(values, cfg.percentile)
    else:
        h = cfg.h
        if h is None:
            rng = float(values.max() - values.min())
            h = 0.05 * rng if rng > 0 else 1.0
        candidates = regional_minima(hminima(values, h)) > 0
        if cfg.method is DetectMethod.BOTH:
            candidates &= percentile_threshold(values, cfg.percentile)

    max_area = cfg.max_area if cfg.max_area is not None else max(64, round(0.01 * values.size))
    labels, n = ndimage.label(candidates, structure=EIGHT_CONN)
    detections = []
    for idx in range(1, n + 1):
        rows, cols = np.nonzero(labels == idx)
        area = rows.size
        if area < cfg.min_area or area > max_area:
            continue
        dist = values[rows, cols]
        best = int(np.argmin(dist))
        detections.append(
            Detection(
                position=(int(rows[best]), int(cols[best])),
                distance=float(dist[best]),
                region=np.stack([rows, cols], axis=1),
                area=int(area),
            )
        )
    detections.sort(key=lambda d: (d.distance, d.position))
    return detections
