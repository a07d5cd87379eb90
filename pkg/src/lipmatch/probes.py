"""Probe (structuring function) construction and manipulation.

A probe is a grey-valued template on a finite set of pixel offsets.  It is
used both as the pattern searched for and as the structuring function of
the morphological operators.  Offsets are (row, col) displacements
relative to the probed position: offset h pairs the probe value b(h) with
the image value f(x + h).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lip import DEFAULT_M, LipScale


@dataclass
class ProbeFunction:
    """Structuring function: offsets (n, 2 int array, (drow, dcol)) and values (n floats)."""

    offsets: np.ndarray
    values: np.ndarray
    scale: LipScale = field(default_factory=LipScale)

    def __post_init__(self) -> None:
        off = np.asarray(self.offsets, dtype=np.int64)
        val = np.asarray(self.values, dtype=np.float64)
        if off.ndim != 2 or off.shape[1] != 2:
            raise ValueError("offsets must be an (n, 2) array of (drow, dcol)")
        if val.shape != (off.shape[0],) or off.shape[0] == 0:
            raise ValueError("need one value per offset and at least one offset")
        if len({(int(r), int(c)) for r, c in off}) != off.shape[0]:
            raise ValueError("offsets must be unique")
        if not np.all(np.isfinite(val)):
            raise ValueError("probe values must be finite")
        if np.any(val >= self.scale.m):
            raise ValueError(f"probe values must stay below the scale bound {self.scale.m}")
        self.offsets = off
        self.values = val

    def __len__(self) -> int:
        return self.offsets.shape[0]

    @property
    def m(self) -> float:
        return self.scale.m

    @property
    def is_flat(self) -> bool:
        return bool(np.all(self.values == self.values[0]))

    @property
    def flat_value(self) -> float:
        if not self.is_flat:
            raise ValueError("probe is not flat")
        return float(self.values[0])

    def reflected(self) -> "ProbeFunction":
        """The reflected probe: offset h carries the value of -h."""
        return ProbeFunction(-self.offsets, self.values.copy(), self.scale)

    def describe(self) -> str:
        return f"probe[{len(self)} offsets]"

    def to_dense(self):
        """Render as (values 2-D array, mask, (anchor_row, anchor_col)).

        Unset positions of the bounding box hold 0 with mask False.
        """
        rmin, cmin = self.offsets.min(axis=0)
        rmax, cmax = self.offsets.max(axis=0)
        grid = np.zeros((rmax - rmin + 1, cmax - cmin + 1))
        mask = np.zeros(grid.shape, dtype=bool)
        rows = self.offsets[:, 0] - rmin
        cols = self.offsets[:, 1] - cmin
        grid[rows, cols] = self.values
        mask[rows, cols] = True
        return grid, mask, (-int(rmin), -int(cmin))


def reflect(probe: ProbeFunction) -> ProbeFunction:
    """Functional alias of :meth:`ProbeFunction.reflected`."""
    return probe.reflected()


def _disk_offsets(radius: float) -> np.ndarray:
    r = int(np.floor(radius))
    dy, dx = np.mgrid[-r : r + 1, -r : r + 1]
    keep = dy * dy + dx * dx <= radius * radius
    return np.stack([dy[keep], dx[keep]], axis=1).astype(np.int64)


def disk_probe(radius: float, value: float, m: float = DEFAULT_M) -> ProbeFunction:
    """Flat disk probe of the given grey value, centred on its anchor."""
    off = _disk_offsets(radius)
    return ProbeFunction(off, np.full(off.shape[0], value), LipScale(m))


def rect_probe(width: int, height: int, value: float, m: float = DEFAULT_M) -> ProbeFunction:
    """Flat rectangular probe; the anchor is the geometric centre (odd sizes preferred)."""
    if width < 1 or height < 1:
        raise ValueError("probe sides must be positive")
    dy, dx = np.mgrid[0:height, 0:width]
    off = np.stack([dy.ravel() - (height - 1) // 2, dx.ravel() - (width - 1) // 2], axis=1)
    return ProbeFunction(off.astype(np.int64), np.full(off.shape[0], value), LipScale(m))


def ring_disk_probe(
    outer_radius: float = 15,
    width: float = 3,
    ring_value: float = 18,
    disk_radius: float = 2,
    disk_value: float = 190,
    m: float = DEFAULT_M,
) -> ProbeFunction:
    """A bright ring around a small dark disk (annulus plus centre disk).

    The annulus keeps radii in ``[outer_radius - width, outer_radius]``
    inclusive; with the default geometry this yields a 285-offset probe.
    """
    inner = outer_radius - width
    if inner <= disk_radius:
        raise ValueError("ring must not overlap the centre disk")
    r = int(np.floor(outer_radius))
    dy, dx = np.mgrid[-r : r + 1, -r : r + 1]
    rr = dy * dy + dx * dx
    ring = (rr >= inner * inner) & (rr <= outer_radius * outer_radius)
    disk = rr <= disk_radius * disk_radius
    offs = np.concatenate(
        [
            np.stack([dy[ring], dx[ring]], axis=1),
            np.stack([dy[disk], dx[disk]], axis=1),
        ]
    ).astype(np.int64)
    vals = np.concatenate(
        [
            np.full(int(ring.sum()), ring_value),
            np.full(int(disk.sum()), disk_value),
        ]
    )
    return ProbeFunction(offs, vals, LipScale(m))


def probe_from_image(
    values: np.ndarray,
    row: int,
    col: int,
    offsets: np.ndarray,
    m: float = DEFAULT_M,
) -> ProbeFunction:
    """Extract a probe from an image: values sampled at (row, col) + offsets."""
    values = np.asarray(values, dtype=np.float64)
    off = np.asarray(offsets, dtype=np.int64)
    rows = row + off[:, 0]
    cols = col + off[:, 1]
    if rows.min() < 0 or cols.min() < 0 or rows.max() >= values.shape[0] or cols.max() >= values.shape[1]:
        raise ValueError("probe window sticks out of the source image")
    return ProbeFunction(off, values[rows, cols], LipScale(m))


def parse_probe_spec(spec: str, m: float = DEFAULT_M) -> ProbeFunction:
    """Build a probe from a compact CLI spec string.

    Accepted forms::

        disk:RADIUS:VALUE
        rect:WIDTH:HEIGHT:VALUE
        ring+disk[:OUTER:WIDTH:RINGVAL:DISKR:DISKVAL]   (defaults 15:3:18:2:190)
        file:PATH                                        (CSV written by save_probe)
        image:PATH:ROW:COL:disk:RADIUS                   (values lifted from a PGM)
    """
    parts = spec.split(":")
    kind = parts[0]
    if kind == "disk":
        return disk_probe(float(parts[1]), float(parts[2]), m)
    if kind == "rect":
        return rect_probe(int(parts[1]), int(parts[2]), float(parts[3]), m)
    if kind == "ring+disk":
        args = [float(p) for p in parts[1:]]
        return ring_disk_probe(*args, m=m)
    if kind == "file":
        return load_probe(":".join(parts[1:]), m)
    if kind == "image":
        if len(parts) != 6 or parts[4] != "disk":
            raise ValueError(f"bad image probe spec: {spec!r}")
        from .io import read_pgm

        img = read_pgm(":".join(parts[1:2]))
        off = _disk_offsets(float(parts[5]))
        return probe_from_image(img.values, int(parts[2]), int(parts[3]), off, m)
    raise ValueError(f"unknown probe spec kind: {kind!r}")


def save_probe(probe: ProbeFunction, path) -> None:
    """Write a probe as CSV rows ``drow,dcol,value``."""
    with open(path, "w", newline="") as fh:
        fh.write("drow,dcol,value\r\n")
        for (r, c), v in zip(probe.offsets, probe.values):
            fh.write(f"{int(r)},{int(c)},{v:.9g}\r\n")


def load_probe(path, m: float = DEFAULT_M) -> ProbeFunction:
    """Read a probe written by :func:`save_probe`."""
    offs = []
    vals = []
    with open(path) as fh:
        header = fh.readline()
        if not header.startswith("drow"):
            raise ValueError(f"{path}: not a probe CSV")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            r, c, v = line.split(",")
            offs.append((int(r), int(c)))
            vals.append(float(v))
    return ProbeFunction(np.array(offs, dtype=np.int64), np.array(vals), LipScale(m))
