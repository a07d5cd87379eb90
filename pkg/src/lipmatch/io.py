"""File formats: PGM images, raw float32 maps, CSV and 16-bit PNG output.

PGM (P2/P5, maxval 255) is the canonical 8-bit ingest format; pixel values
round-trip bit-exactly.  Real-valued data (distance maps, darkened images
with negative values) travels in a small raw float32 container:

    16-byte header: magic b"ASPM", u32 width, u32 height, u32 kind (LE)
    then height*width little-endian float32, row-major

kind 0 = multiplicative map, 1 = additive map, 2 = grey image.
"""

from __future__ import annotations

import struct
import zlib
from pathlib import Path

import numpy as np

from .distmap import KIND_CODES, KIND_NAMES, DistanceMap
from .lip import GreyImage, LipScale, RangeMode

MAGIC = b"ASPM"
KIND_IMAGE = 2


def read_pgm(path) -> GreyImage:
    """Read an 8-bit PGM (binary P5 or ASCII P2) as a grey image with m=256."""
    data = Path(path).read_bytes()
    if data[:2] not in (b"P2", b"P5"):
        raise ValueError(f"{path}: not a PGM file")
    binary = data[:2] == b"P5"

    # header tokens, skipping '#' comments
    tokens: list[bytes] = []
    pos = 2
    while len(tokens) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos >= len(data):
            raise ValueError(f"{path}: truncated PGM header")
        if data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    width, height, maxval = (int(t) for t in tokens)
    if maxval != 255:
        raise ValueError(f"{path}: only maxval 255 is supported, got {maxval}")
    if width < 1 or height < 1:
        raise ValueError(f"{path}: bad dimensions {width}x{height}")

    if binary:
        pos += 1  # single whitespace after maxval
        raster = data[pos : pos + width * height]
        if len(raster) != width * height:
            raise ValueError(f"{path}: truncated raster")
        values = np.frombuffer(raster, dtype=np.uint8).astype(np.float64)
    else:
        samples = data[pos:].split()
        if len(samples) != width * height:
            raise ValueError(f"{path}: expected {width * height} samples, got {len(samples)}")
        values = np.array([int(s) for s in samples], dtype=np.float64)
        if values.min() < 0 or values.max() > 255:
            raise ValueError(f"{path}: sample out of range")
    return GreyImage(values.reshape(height, width), LipScale(256.0), RangeMode.IMAGE)


def write_pgm(img, path, binary: bool = True) -> None:
    """Write an image (GreyImage or array) as 8-bit PGM.

    Values are rounded to the nearest integer and clipped to [0, 255];
    integral data in range round-trips exactly.
    """
    values = img.values if isinstance(img, GreyImage) else np.asarray(img)
    raster = np.clip(np.rint(values), 0, 255).astype(np.uint8)
    h, w = raster.shape
    if binary:
        with open(path, "wb") as fh:
            fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
            fh.write(raster.tobytes())
    else:
        lines = [f"P2\n{w} {h}\n255"]
        for row in raster:
            lines.append(" ".join(str(int(v)) for v in row))
        Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def write_raw(values: np.ndarray, path, kind: int) -> None:
    """Write a 2-D float array in the raw float32 container."""
    values = np.asarray(values, dtype=np.float64)
    h, w = values.shape
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<III", w, h, kind))
        fh.write(values.astype("<f4").tobytes())


def read_raw(path) -> tuple[np.ndarray, int]:
    """Read the raw float32 container; returns (float64 array, kind)."""
    data = Path(path).read_bytes()
    if data[:4] != MAGIC:
        raise ValueError(f"{path}: bad magic")
    w, h, kind = struct.unpack("<III", data[4:16])
    raster = np.frombuffer(data[16 : 16 + 4 * w * h], dtype="<f4")
    if raster.size != w * h:
        raise ValueError(f"{path}: truncated raster")
    return raster.astype(np.float64).reshape(h, w), kind


def read_image_any(path) -> GreyImage:
    """Read a PGM or a raw-container grey image (extended range allowed)."""
    path = Path(path)
    with path.open("rb") as fh:
        head = fh.read(4)
    if head[:2] in (b"P2", b"P5"):
        return read_pgm(path)
    if head == MAGIC:
        values, kind = read_raw(path)
        if kind != KIND_IMAGE:
            raise ValueError(f"{path}: container holds a map, not an image")
        mode = RangeMode.IMAGE if values.min() >= 0 else RangeMode.EXTENDED
        return GreyImage(values, LipScale(256.0), mode)
    raise ValueError(f"{path}: unrecognized image format")


def write_map(dist_map: DistanceMap, path, fmt: str = "raw") -> None:
    """Write a distance map as 'raw' (float32 container), 'csv' or 'png'."""
    if fmt == "raw":
        write_raw(dist_map.values, path, KIND_CODES[dist_map.kind])
    elif fmt == "csv":
        write_csv(dist_map.values, path)
    elif fmt == "png":
        write_png16(dist_map.values, path)
    else:
        raise ValueError(f"unknown map format {fmt!r}")


def read_map(path) -> DistanceMap:
    values, kind = read_raw(path)
    if kind not in KIND_NAMES:
        raise ValueError(f"{path}: container holds an image, not a map")
    return DistanceMap(values, KIND_NAMES[kind])


def write_csv(values: np.ndarray, path) -> None:
    """One CSV record per image row, 9 significant digits, CRLF line endings."""
    values = np.asarray(values)
    with open(path, "w", newline="") as fh:
        for row in values:
            fh.write(",".join(f"{v:.9g}" for v in row))
            fh.write("\r\n")


def _png_chunk(tag: bytes, payload: bytes) -> bytes:
    body = tag + payload
    return struct.pack(">I", len(payload)) + body + struct.pack(">I", zlib.crc32(body))


def write_png16(values: np.ndarray, path) -> None:
    """Min-max normalized 16-bit grayscale PNG for visual inspection."""
    values = np.asarray(values, dtype=np.float64)
    lo, hi = float(values.min()), float(values.max())
    if hi > lo:
        norm = (values - lo) / (hi - lo)
    else:
        norm = np.zeros_like(values)
    samples = np.round(norm * 65535.0).astype(">u2")
    h, w = samples.shape
    raster = b"".join(b"\x00" + samples[y].tobytes() for y in range(h))
    ihdr = struct.pack(">IIBBBBB", w, h, 16, 0, 0, 0, 0)  # 16-bit grayscale
    png = b"\x89PNG\r\n\x1a\n"
    png += _png_chunk(b"IHDR", ihdr)
    png += _png_chunk(b"IDAT", zlib.compress(raster, 6))
    png += _png_chunk(b"IEND", b"")
    Path(path).write_bytes(png)


def read_png16_samples(path) -> np.ndarray:
    """Decode the samples of a PNG written by write_png16 (for round-trip checks)."""
    data = Path(path).read_bytes()
    if data[:8] != b"\x89PNG\r\n\x1a\n":
        raise ValueError(f"{path}: not a PNG")
    pos = 8
    w = h = None
    idat = b""
    while pos < len(data):
        (length,) = struct.unpack(">I", data[pos : pos + 4])
        tag = data[pos + 4 : pos + 8]
        payload = data[pos + 8 : pos + 8 + length]
        if tag == b"IHDR":
            w, h, depth, color = struct.unpack(">IIBB", payload[:10])
            if depth != 16 or color != 0:
                raise ValueError("only 16-bit grayscale is supported")
        elif tag == b"IDAT":
            idat += payload
        pos += 12 + length
    raw = zlib.decompress(idat)
    rows = []
    stride = 1 + 2 * w
    for y in range(h):
        line = raw[y * stride : (y + 1) * stride]
        if line[0] != 0:
            raise ValueError("unexpected PNG filter type")
        rows.append(np.frombuffer(line[1:], dtype=">u2"))
    return np.stack(rows).astype(np.uint16)
