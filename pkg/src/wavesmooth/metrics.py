"""Image quality assessment: average absolute difference, signal-to-noise
and peak signal-to-noise ratios (as pure ratios, not decibels), image
fidelity, correlation quality, structural content, and an edge-preservation
figure of merit.

``I`` is the clean reference, ``Id`` the image under assessment.  Ratios
whose denominator vanishes return ``math.inf`` as an explicit sentinel; it
serializes as the token "inf".  A decibel rendering (10 log10) of SNR/PSNR
is offered for presentation only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .image import Image

FOM_ALPHA = 1.0 / 9.0
EDGE_THRESHOLD = 0.25  # fraction of the peak gradient magnitude
CSV_HEADER = ("filter", "AAD", "SNR", "PSNR", "IF", "CQ", "SC", "FOM")


class DegenerateInputError(ValueError):
    """A metric's denominator is identically zero for this input."""


def _plane(img) -> np.ndarray:
    if isinstance(img, Image):
        return img.data
    return np.asarray(img, dtype=np.float64)


def _pair(i, i_d):
    a, b = _plane(i), _plane(i_d)
    if a.shape != b.shape:
        raise ValueError(f"image dimensions differ: {a.shape} vs {b.shape}")
    return a, b


def aad(i, i_d) -> float:
    """Average absolute difference, sum|I - Id| / (R C)."""
    a, b = _pair(i, i_d)
    return float(np.abs(a - b).mean())


def snr(i, i_d) -> float:
    """Signal-to-noise ratio sum I^2 / sum (I - Id)^2, inf when equal."""
    a, b = _pair(i, i_d)
    den = float(((a - b) ** 2).sum())
    if den == 0.0:
        return math.inf
    return float((a * a).sum()) / den


def psnr(i, i_d) -> float:
    """Peak signal-to-noise ratio R C max(I^2) / sum (I - Id)^2."""
    a, b = _pair(i, i_d)
    den = float(((a - b) ** 2).sum())
    if den == 0.0:
        return math.inf
    return a.size * float((a * a).max()) / den


def ify(i, i_d) -> float:
    """Image fidelity 1 - 1/SNR (1 when SNR is infinite)."""
    s = snr(i, i_d)
    return 1.0 if math.isinf(s) else 1.0 - 1.0 / s


def cqy(i, i_d) -> float:
    """Correlation quality sum(I * Id) / sum I."""
    a, b = _pair(i, i_d)
    si = float(a.sum())
    if si == 0.0:
        raise DegenerateInputError("correlation quality undefined: sum of reference is zero")
    return float((a * b).sum()) / si


def sct(i, i_d) -> float:
    """Structural content sum I^2 / sum Id^2."""
    a, b = _pair(i, i_d)
    den = float((b * b).sum())
    if den == 0.0:
        raise DegenerateInputError("structural content undefined: test image is all zero")
    return float((a * a).sum()) / den


def to_db(ratio: float) -> float:
    """Decibel rendering of a power ratio, for presentation."""
    if math.isinf(ratio):
        return math.inf
    if ratio <= 0:
        return -math.inf
    return 10.0 * math.log10(ratio)


@dataclass(frozen=True)
class EdgeMap:
    """Boolean edge mask aligned with its source image."""

    mask: np.ndarray

    def __post_init__(self):
        if self.mask.ndim != 2 or self.mask.dtype != bool:
            raise ValueError("edge mask must be a 2D boolean array")

    @property
    def rows(self) -> int:
        return self.mask.shape[0]

    @property
    def cols(self) -> int:
        return self.mask.shape[1]

    @property
    def count(self) -> int:
        return int(self.mask.sum())


def edge_map(img) -> EdgeMap:
    """Sobel edge detector with a relative threshold.

    A pixel is an edge iff its 3x3 Sobel gradient magnitude exceeds 0.25 of
    the image's peak magnitude; the one-pixel border is never an edge.  The
    relative threshold makes the mask invariant under positive affine
    intensity rescaling.
    """
    p = _plane(img)
    if p.ndim != 2 or p.shape[0] < 3 or p.shape[1] < 3:
        raise ValueError("edge detection needs an image of at least 3x3")
    gx = (p[:-2, 2:] + 2.0 * p[1:-1, 2:] + p[2:, 2:]) - (
        p[:-2, :-2] + 2.0 * p[1:-1, :-2] + p[2:, :-2]
    )
    gy = (p[2:, :-2] + 2.0 * p[2:, 1:-1] + p[2:, 2:]) - (
        p[:-2, :-2] + 2.0 * p[:-2, 1:-1] + p[:-2, 2:]
    )
    mag = np.hypot(gx, gy)
    mask = np.zeros(p.shape, dtype=bool)
    mask[1:-1, 1:-1] = mag > EDGE_THRESHOLD * mag.max()
    return EdgeMap(mask)


def nearest_squared_distances(detected: EdgeMap, ideal: EdgeMap) -> np.ndarray:
    """For each detected edge pixel, the squared Euclidean distance to the
    nearest ideal edge pixel (exact integer arithmetic, exhaustive scan)."""
    det = np.argwhere(detected.mask)
    ide = np.argwhere(ideal.mask)
    if det.size == 0:
        return np.zeros(0, dtype=np.int64)
    if ide.size == 0:
        raise ValueError("no ideal edge pixels to measure against")
    out = np.empty(det.shape[0], dtype=np.int64)
    step = max(1, 2_000_000 // max(1, ide.shape[0]))
    for s in range(0, det.shape[0], step):
        blk = det[s : s + step]
        d2 = (blk[:, None, 0] - ide[None, :, 0]) ** 2 + (blk[:, None, 1] - ide[None, :, 1]) ** 2
        out[s : s + step] = d2.min(axis=1)
    return out


def fom(detected: EdgeMap, ideal: EdgeMap, alpha: float = FOM_ALPHA) -> float:
    """Edge-preservation figure of merit in [0, 1].

    (1 / max(N_det, N_ideal)) * sum over detected pixels of
    1 / (1 + alpha d^2), d the distance to the nearest ideal edge pixel.
    Two empty maps agree perfectly (1); exactly one empty scores 0.
    """
    if detected.mask.shape != ideal.mask.shape:
        raise ValueError(
            f"edge map dimensions differ: {detected.mask.shape} vs {ideal.mask.shape}"
        )
    n_det, n_ideal = detected.count, ideal.count
    if n_det == 0 and n_ideal == 0:
        return 1.0
    if n_det == 0 or n_ideal == 0:
        return 0.0
    d2 = nearest_squared_distances(detected, ideal)
    return float((1.0 / (1.0 + d2 * alpha)).sum()) / max(n_det, n_ideal)


@dataclass(frozen=True)
class MetricsReport:
    """The seven assessment numbers for one (clean, test) image pair."""

    aad: float
    snr: float
    psnr: float
    ify: float
    cqy: float
    sct: float
    fom: float

    def values(self) -> tuple:
        return (self.aad, self.snr, self.psnr, self.ify, self.cqy, self.sct, self.fom)

    def csv_row(self, name: str) -> str:
        return ",".join([name] + [format_value(v) for v in self.values()])


def format_value(x: float) -> str:
    """Locale-independent 6-significant-digit rendering; inf -> "inf"."""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.6g}"


def csv_header() -> str:
    return ",".join(CSV_HEADER)


def full_report(i, i_d) -> MetricsReport:
    """All seven metrics for a (clean, test) pair.  The ideal edge map for
    the figure of merit comes from the clean image.  Images too small for
    the edge detector (< 3x3) have no edges on either side, which scores 1
    by the vacuous-agreement rule."""
    a, b = _pair(i, i_d)
    s = snr(a, b)
    if a.shape[0] < 3 or a.shape[1] < 3:
        f = 1.0
    else:
        f = fom(edge_map(b), edge_map(a))
    return MetricsReport(
        aad=aad(a, b),
        snr=s,
        psnr=psnr(a, b),
        ify=1.0 if math.isinf(s) else 1.0 - 1.0 / s,
        cqy=cqy(a, b),
        sct=sct(a, b),
        fom=f,
    )
