"""One-level separable 2D wavelet transform with an exact inverse.

Conventions, fixed so results are reproducible bit-for-bit:

* Boundary handling is periodic (circular).  For orthonormal filters this
  keeps the analysis matrix orthogonal, so reconstruction is exact to
  rounding and Parseval's energy identity holds.
* Each 1D pass keeps the even-indexed samples of the circular convolution
  y[n] = sum_k f[k] * x[(n - k) mod N].  Under the Haar basis a 2x2 input
  [[a, b], [c, d]] therefore yields the single-coefficient subbands
  ca = (a+b+c+d)/2, chd = (a+b-c-d)/2, cvd = (a-b+c-d)/2, cdd = (a-b-c+d)/2.
* The highpass filter is the quadrature mirror of the lowpass:
  g[k] = (-1)**k * h[L-1-k].
* Odd-sized inputs are padded by replicating the last row/column; the
  original dimensions are recorded and the inverse crops back to them.

Bases: Haar and the 4-tap Daubechies orthonormal filter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .image import Image, save_image

_SQRT2 = math.sqrt(2.0)
_SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class WaveletBasis:
    """Orthonormal analysis filter pair derived from a lowpass filter."""

    name: str
    lowpass: tuple

    def __post_init__(self):
        h = np.asarray(self.lowpass, dtype=np.float64)
        if abs(float(h @ h) - 1.0) > 1e-12:
            raise ValueError(f"{self.name}: lowpass filter is not unit-norm")
        if abs(float(h.sum()) - _SQRT2) > 1e-12:
            raise ValueError(f"{self.name}: lowpass filter does not sum to sqrt(2)")

    @property
    def h(self) -> np.ndarray:
        return np.asarray(self.lowpass, dtype=np.float64)

    @property
    def g(self) -> np.ndarray:
        """Quadrature-mirror highpass: g[k] = (-1)**k * h[L-1-k]."""
        h = self.h
        signs = np.where(np.arange(h.size) % 2 == 0, 1.0, -1.0)
        return signs * h[::-1]


HAAR = WaveletBasis("haar", (1.0 / _SQRT2, 1.0 / _SQRT2))
DB4 = WaveletBasis(
    "db4",
    (
        (1.0 + _SQRT3) / (4.0 * _SQRT2),
        (3.0 + _SQRT3) / (4.0 * _SQRT2),
        (3.0 - _SQRT3) / (4.0 * _SQRT2),
        (1.0 - _SQRT3) / (4.0 * _SQRT2),
    ),
)

_BASES = {"haar": HAAR, "db4": DB4}


def get_basis(name) -> WaveletBasis:
    """Look up a basis by name; WaveletBasis instances pass through."""
    if isinstance(name, WaveletBasis):
        return name
    try:
        return _BASES[str(name).lower()]
    except KeyError:
        raise ValueError(f"unknown wavelet basis {name!r} (choose from {sorted(_BASES)})")


@dataclass
class SubbandSet:
    """The four half-resolution coefficient planes of one transform level.

    ``ca`` is the approximation (LL); ``chd``/``cvd``/``cdd`` are the
    horizontal (LH), vertical (HL) and diagonal (HH) detail planes.  The
    pre-padding source dimensions are kept so the inverse can crop.
    """

    ca: np.ndarray
    chd: np.ndarray
    cvd: np.ndarray
    cdd: np.ndarray
    source_rows: int
    source_cols: int
    depth_bits: int = 16

    def __post_init__(self):
        shapes = {p.shape for p in (self.ca, self.chd, self.cvd, self.cdd)}
        if len(shapes) != 1:
            raise ValueError(f"subband planes have mismatched shapes: {sorted(shapes)}")
        shape = next(iter(shapes))
        expected = (-(-self.source_rows // 2), -(-self.source_cols // 2))
        if shape != expected:
            raise ValueError(
                f"subband shape {shape} inconsistent with source "
                f"{self.source_rows}x{self.source_cols} (expected {expected})"
            )

    @property
    def details(self):
        return {"chd": self.chd, "cvd": self.cvd, "cdd": self.cdd}


def _analyze(data: np.ndarray, filt: np.ndarray, axis: int) -> np.ndarray:
    """Circular-convolve along ``axis`` with ``filt`` and keep even indices."""
    acc = filt[0] * data
    for k in range(1, filt.size):
        acc = acc + filt[k] * np.roll(data, k, axis=axis)
    sl = [slice(None)] * data.ndim
    sl[axis] = slice(0, data.shape[axis], 2)
    return acc[tuple(sl)]


def _synthesize(lo: np.ndarray, hi: np.ndarray, h: np.ndarray, g: np.ndarray, axis: int) -> np.ndarray:
    """Adjoint of :func:`_analyze` applied to a lowpass/highpass pair."""
    n = 2 * lo.shape[axis]
    shape = list(lo.shape)
    shape[axis] = n
    sl = [slice(None)] * lo.ndim
    sl[axis] = slice(0, n, 2)
    up_lo = np.zeros(shape)
    up_lo[tuple(sl)] = lo
    up_hi = np.zeros(shape)
    up_hi[tuple(sl)] = hi
    acc = h[0] * up_lo + g[0] * up_hi
    for k in range(1, h.size):
        acc = acc + h[k] * np.roll(up_lo, -k, axis=axis) + g[k] * np.roll(up_hi, -k, axis=axis)
    return acc


def dwt2(img, basis: WaveletBasis = DB4) -> SubbandSet:
    """One-level separable 2D analysis of an :class:`Image` (or 2D array)."""
    basis = get_basis(basis)
    if isinstance(img, Image):
        arr, depth = img.data, img.depth_bits
    else:
        arr, depth = np.asarray(img, dtype=np.float64), 16
    rows, cols = arr.shape
    flen = basis.h.size
    if rows < flen or cols < flen:
        raise ValueError(
            f"image {rows}x{cols} is smaller than the {basis.name} filter support ({flen})"
        )
    if rows % 2:
        arr = np.concatenate([arr, arr[-1:, :]], axis=0)
    if cols % 2:
        arr = np.concatenate([arr, arr[:, -1:]], axis=1)
    h, g = basis.h, basis.g
    lo = _analyze(arr, h, axis=1)
    hi = _analyze(arr, g, axis=1)
    return SubbandSet(
        ca=_analyze(lo, h, axis=0),
        chd=_analyze(lo, g, axis=0),
        cvd=_analyze(hi, h, axis=0),
        cdd=_analyze(hi, g, axis=0),
        source_rows=rows,
        source_cols=cols,
        depth_bits=depth,
    )


def idwt2(sb: SubbandSet, basis: WaveletBasis = DB4) -> Image:
    """Exact inverse of :func:`dwt2`; crops any odd-dimension padding."""
    basis = get_basis(basis)
    h, g = basis.h, basis.g
    lo = _synthesize(sb.ca, sb.chd, h, g, axis=0)
    hi = _synthesize(sb.cvd, sb.cdd, h, g, axis=0)
    arr = _synthesize(lo, hi, h, g, axis=1)
    return Image(arr[: sb.source_rows, : sb.source_cols], sb.depth_bits)


def dump_subbands(sb: SubbandSet, directory, prefix: str = "subbands") -> list:
    """Debug dump: write the four planes as 16-bit PGMs, each affinely mapped
    to [0, 65535], plus a sidecar text file recording min/max per plane so
    the mapping can be undone."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    lines = []
    for name in ("ca", "chd", "cvd", "cdd"):
        plane = getattr(sb, name)
        lo, hi = float(plane.min()), float(plane.max())
        scale = 65535.0 / (hi - lo) if hi > lo else 0.0
        mapped = (plane - lo) * scale
        out = directory / f"{prefix}_{name}.pgm"
        save_image(Image(mapped, 16), out)
        paths.append(out)
        lines.append(f"{name} min={lo!r} max={hi!r} scale={scale!r}\n")
    sidecar = directory / f"{prefix}_mapping.txt"
    sidecar.write_text("".join(lines), encoding="ascii")
    paths.append(sidecar)
    return paths
