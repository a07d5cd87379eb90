"""Distance-map container shared by the two metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MULT = "mult"
ADD = "add"
KIND_CODES = {MULT: 0, ADD: 1}
KIND_NAMES = {v: k for k, v in KIND_CODES.items()}


@dataclass
class DistanceMap:
    """Per-pixel probing distances, aligned with the probed image."""

    values: np.ndarray
    kind: str
    probe_id: str = ""
    p: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in KIND_CODES:
            raise ValueError(f"unknown map kind {self.kind!r}")
        self.values = np.asarray(self.values, dtype=np.float64)
        if not (0.0 < self.p <= 1.0):
            raise ValueError("tolerance p must lie in ]0, 1]")

    @property
    def shape(self):
        return self.values.shape
