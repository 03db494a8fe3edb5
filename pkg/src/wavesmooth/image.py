"""Grayscale image container, PGM/PNG I/O, additive noise, and a synthetic
spot-lattice phantom used as a clean reference in tests and benchmarks.

Pixel data lives in float64 so pipeline intermediates may leave the nominal
[0, 2**depth_bits - 1] range; values are clamped and rounded only on save.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image as _PILImage


class ImageFormatError(ValueError):
    """Unreadable, unsupported, or non-grayscale image file."""


@dataclass
class Image:
    """A 2D grayscale image with a declared bit depth (8 or 16)."""

    data: np.ndarray
    depth_bits: int = 16

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError("image data must be a non-empty 2D array")
        if not np.all(np.isfinite(arr)):
            raise ValueError("image data must contain only finite values")
        if self.depth_bits not in (8, 16):
            raise ValueError(f"depth_bits must be 8 or 16, got {self.depth_bits}")
        self.data = arr

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def max_value(self) -> float:
        """Largest storable intensity, 2**depth_bits - 1."""
        return float(2 ** self.depth_bits - 1)

    def copy(self) -> "Image":
        return Image(self.data.copy(), self.depth_bits)


@dataclass(frozen=True)
class NoiseSpec:
    """Additive Gaussian noise: sigma as a percentage of the full dynamic
    range, generated deterministically from a 64-bit seed."""

    sigma_percent: float
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.sigma_percent <= 100.0:
            raise ValueError("sigma_percent must lie in [0, 100]")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def load_image(path) -> Image:
    """Load an 8- or 16-bit grayscale PGM (P2/P5) or PNG.

    The file's sample values are preserved bit-exactly; color images are
    rejected rather than converted.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such image file: {path}")
    raw = path.read_bytes()
    if raw[:2] in (b"P2", b"P5"):
        return _read_pgm(raw, path)
    if raw[:2] in (b"P3", b"P6"):
        raise ImageFormatError(f"{path}: color PPM input is not supported")
    if raw[:8] == b"\x89PNG\r\n\x1a\n":
        return _read_png(path)
    raise ImageFormatError(f"{path}: not a PGM or PNG file")


def save_image(img: Image, path) -> None:
    """Write ``img`` as PGM (``.pgm``) or PNG (``.png``), chosen by extension.

    Values are clamped to [0, 2**depth_bits - 1] and rounded to the nearest
    integer, halves away from zero.  16-bit PGM samples are written
    big-endian per the format definition.
    """
    path = Path(path)
    maxv = img.max_value
    q = np.clip(img.data, 0.0, maxv)
    q = np.floor(q + 0.5)  # all values >= 0 here, so this is half-away-from-zero
    suffix = path.suffix.lower()
    if suffix == ".pgm":
        _write_pgm(q, img.depth_bits, path)
    elif suffix == ".png":
        dtype = np.uint8 if img.depth_bits == 8 else np.uint16
        _PILImage.fromarray(q.astype(dtype)).save(path)
    else:
        raise ImageFormatError(f"{path}: unsupported output extension (use .pgm or .png)")


def add_noise(img: Image, spec: NoiseSpec) -> Image:
    """Add i.i.d. Gaussian noise with sigma = sigma_percent/100 of the full
    dynamic range.

    The generator is numpy's PCG64 seeded with ``spec.seed`` and sampled via
    ``standard_normal`` in row-major order, so output is a pure function of
    (img, spec).  The result is NOT clamped; storage clamping happens in
    :func:`save_image` only.
    """
    sigma = spec.sigma_percent / 100.0 * img.max_value
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    noise = rng.standard_normal(img.data.shape) * sigma
    return Image(img.data + noise, img.depth_bits)


def make_phantom(
    rows: int,
    cols: int,
    grid: int,
    spot_amplitude: float,
    spot_sigma: float,
    background: float = 0.0,
) -> Image:
    """Deterministic spot-lattice test image: ``background`` plus a
    ``grid`` x ``grid`` lattice of Gaussian bumps of peak ``spot_amplitude``.

    Spot centers sit at ((i + 0.5) * rows / grid, (j + 0.5) * cols / grid).
    Dimensions must be even so one transform level divides exactly.
    """
    if rows <= 0 or cols <= 0 or rows % 2 or cols % 2:
        raise ValueError("phantom dimensions must be positive and even")
    if grid < 1:
        raise ValueError("grid must be at least 1")
    if spot_sigma <= 0:
        raise ValueError("spot_sigma must be positive")
    r = np.arange(rows, dtype=np.float64)[:, None]
    c = np.arange(cols, dtype=np.float64)[None, :]
    out = np.full((rows, cols), float(background))
    denom = 2.0 * spot_sigma * spot_sigma
    for i in range(grid):
        cy = (i + 0.5) * rows / grid
        dy2 = (r - cy) ** 2
        for j in range(grid):
            cx = (j + 0.5) * cols / grid
            out += spot_amplitude * np.exp(-(dy2 + (c - cx) ** 2) / denom)
    return Image(out, 16)


def _read_pgm(raw: bytes, path: Path) -> Image:
    pos = 0

    def next_token() -> bytes:
        nonlocal pos
        while pos < len(raw):
            ch = raw[pos : pos + 1]
            if ch == b"#":
                nl = raw.find(b"\n", pos)
                pos = len(raw) if nl < 0 else nl + 1
            elif ch.isspace():
                pos += 1
            else:
                break
        start = pos
        while pos < len(raw) and not raw[pos : pos + 1].isspace() and raw[pos : pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise ImageFormatError(f"{path}: truncated PGM header")
        return raw[start:pos]

    magic = next_token()
    try:
        cols = int(next_token())
        rows = int(next_token())
        maxval = int(next_token())
    except ValueError as exc:
        raise ImageFormatError(f"{path}: malformed PGM header") from exc
    if rows <= 0 or cols <= 0:
        raise ImageFormatError(f"{path}: bad PGM dimensions {rows}x{cols}")
    if maxval == 255:
        depth = 8
    elif maxval == 65535:
        depth = 16
    else:
        raise ImageFormatError(f"{path}: PGM maxval {maxval} unsupported (use 255 or 65535)")

    count = rows * cols
    if magic == b"P2":
        tokens = raw[pos:].split()
        if len(tokens) < count:
            raise ImageFormatError(f"{path}: PGM data truncated")
        try:
            values = np.array([int(t) for t in tokens[:count]], dtype=np.float64)
        except ValueError as exc:
            raise ImageFormatError(f"{path}: non-integer PGM sample") from exc
    else:  # P5: one whitespace byte after maxval, then binary samples
        pos += 1
        dtype = np.dtype(">u2") if depth == 16 else np.dtype("u1")
        need = count * dtype.itemsize
        body = raw[pos : pos + need]
        if len(body) < need:
            raise ImageFormatError(f"{path}: PGM data truncated")
        values = np.frombuffer(body, dtype=dtype).astype(np.float64)
    if values.min() < 0 or values.max() > maxval:
        raise ImageFormatError(f"{path}: PGM sample outside [0, {maxval}]")
    return Image(values.reshape(rows, cols), depth)


def _write_pgm(q: np.ndarray, depth_bits: int, path: Path) -> None:
    maxval = 2 ** depth_bits - 1
    header = f"P5\n{q.shape[1]} {q.shape[0]}\n{maxval}\n".encode("ascii")
    dtype = np.dtype(">u2") if depth_bits == 16 else np.dtype("u1")
    path.write_bytes(header + q.astype(dtype).tobytes())


def _read_png(path: Path) -> Image:
    with _PILImage.open(path) as im:
        mode = im.mode
        if mode == "L":
            depth = 8
        elif mode in ("I;16", "I;16B", "I"):
            depth = 16
        else:
            raise ImageFormatError(
                f"{path}: PNG mode {mode!r} is not 8/16-bit grayscale (color input rejected)"
            )
        arr = np.asarray(im, dtype=np.float64)
    if arr.ndim != 2:
        raise ImageFormatError(f"{path}: PNG is not single-channel")
    if arr.min() < 0 or arr.max() > 2 ** depth - 1:
        raise ImageFormatError(f"{path}: PNG sample outside the {depth}-bit range")
    return Image(arr, depth)
