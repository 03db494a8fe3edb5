"""Sliding-window filters on a single real-valued plane.

All filters share the same border rule: only positions with a full window
are recomputed, and the surrounding ring of width (size-1)/2 is copied from
the input unchanged.  Outputs are always computed from the input plane alone
(two-buffer semantics), never from partially filtered values.

Window statistics use the population variance (divide by n).  The local
coefficient of variation is C_I = sqrt(var)/|mean|, taken as +inf where the
window mean is zero (such centers pass through unfiltered, which keeps the
filters well-defined on signed wavelet coefficients).  The noise coefficient
of variation C_u may be supplied or is auto-estimated as the median of C_I
over all windows.

Filter formulas (x = center value, mu = window mean):

* median          y = median(window)
* lee             y = mu + k (x - mu),   k = max(0, 1 - C_u^2 / C_I^2)
* kuan            y = mu + k (x - mu),   k = max(0, (1 - C_u^2/C_I^2) / (1 + C_u^2))
* frost           y = sum(w * window) / sum(w),
                  w(p, q) = exp(-damping * C_I^2 * d(p, q)),
                  d = Chebyshev distance to the window center
* enhanced lee /  three zones with C_max = sqrt(3) * C_u:
  enhanced frost    C_I <= C_u -> mu;  C_u < C_I < C_max -> the base lee /
                    frost formula;  C_I >= C_max -> x (edge pass-through)
* gamma map       same three zones; in the middle zone the positive root of
                  the MAP quadratic with L = 1/C_u^2 equivalent looks:
                  alpha = (1 + C_u^2) / (C_I^2 - C_u^2),
                  y = (B + sqrt(max(B^2 + 4 alpha L x mu, 0))) / (2 alpha),
                  B = mu (alpha - L - 1)
* wiener          y = mu + max(var - nu2, 0) / max(var, 1e-12) * (x - mu),
                  nu2 = mean of the window variances over the whole plane

Windows that are exactly constant pass their center through unchanged for
every filter; this is what each formula gives in exact arithmetic and keeps
constant planes fixed bit-for-bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

_KINDS = (
    "median",
    "lee",
    "enhanced_lee",
    "kuan",
    "frost",
    "enhanced_frost",
    "gamma_map",
    "wiener",
)
_CMAX_FACTOR = math.sqrt(3.0)
_WIENER_EPS = 1e-12
# cap on elements touched per chunk when reducing over window axes
_CHUNK_ELEMS = 4_000_000


@dataclass(frozen=True)
class WindowSpec:
    """Square filter window; side must be odd and within [3, 33]."""

    size: int = 3

    def __post_init__(self):
        if self.size % 2 == 0 or not 3 <= self.size <= 33:
            raise ValueError(f"window size must be odd and in [3, 33], got {self.size}")

    @property
    def half(self) -> int:
        return self.size // 2


@dataclass(frozen=True)
class FilterKind:
    """A statistical filter selection plus its damping factor (frost family)."""

    kind: str
    damping: float = 1.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown filter kind {self.kind!r} (choose from {_KINDS})")
        if self.damping <= 0:
            raise ValueError("damping must be positive")


def directional_smooth(plane: np.ndarray) -> np.ndarray:
    """Edge-preserving 3x3 directional smoothing.

    For each interior pixel, four 3-sample averages are taken along the
    lines through the center (horizontal, vertical, main diagonal,
    anti-diagonal, center included), and the average closest in amplitude to
    the center value is output; ties go to the lowest direction index.  The
    one-pixel border is copied unchanged.
    """
    plane = np.asarray(plane, dtype=np.float64)
    if plane.ndim != 2 or plane.shape[0] < 3 or plane.shape[1] < 3:
        raise ValueError("directional smoothing needs a plane of at least 3x3")
    c = plane[1:-1, 1:-1]
    avgs = np.stack(
        [
            (plane[1:-1, :-2] + c + plane[1:-1, 2:]) / 3.0,   # horizontal
            (plane[:-2, 1:-1] + c + plane[2:, 1:-1]) / 3.0,   # vertical
            (plane[:-2, :-2] + c + plane[2:, 2:]) / 3.0,      # main diagonal
            (plane[:-2, 2:] + c + plane[2:, :-2]) / 3.0,      # anti-diagonal
        ]
    )
    pick = np.argmin(np.abs(c[None, :, :] - avgs), axis=0)  # first minimum wins
    smoothed = np.take_along_axis(avgs, pick[None, :, :], axis=0)[0]
    wmin, wmax = _window_minmax(plane, 3)
    smoothed = np.where(wmin == wmax, c, smoothed)
    out = plane.copy()
    out[1:-1, 1:-1] = smoothed
    return out


def local_statistical_filter(plane, kind, window=3, noise_cv=None) -> np.ndarray:
    """Apply one of the classic window-statistics filters to a plane.

    ``kind`` may be a :class:`FilterKind` or its name; ``window`` a
    :class:`WindowSpec` or an odd int; ``noise_cv`` the noise coefficient of
    variation C_u, or None to auto-estimate it from the plane.
    """
    plane = np.asarray(plane, dtype=np.float64)
    kind = FilterKind(kind) if isinstance(kind, str) else kind
    window = WindowSpec(window) if isinstance(window, int) else window
    if noise_cv is not None and noise_cv < 0:
        raise ValueError("noise_cv must be nonnegative")
    size = window.size
    if plane.ndim != 2 or plane.shape[0] < size or plane.shape[1] < size:
        raise ValueError(f"plane must be at least {size}x{size}")
    if kind.kind == "wiener":
        return wiener_local(plane, window)

    half = window.half
    interior = (slice(half, plane.shape[0] - half), slice(half, plane.shape[1] - half))
    x = plane[interior]

    if kind.kind == "median":
        res = _window_median(plane, size)
    else:
        mu, var = _window_stats(plane, size)
        ci = _coefficient_of_variation(mu, var)
        cu = float(noise_cv) if noise_cv is not None else float(np.median(ci))
        if kind.kind == "lee":
            res = _gain_blend(mu, x, _lee_gain(ci, cu))
        elif kind.kind == "kuan":
            res = _gain_blend(mu, x, _kuan_gain(ci, cu))
        elif kind.kind == "frost":
            res = _frost(plane, size, ci, kind.damping)
        elif kind.kind == "enhanced_lee":
            mid = _gain_blend(mu, x, _lee_gain(ci, cu))
            res = _three_zone(mu, x, ci, cu, mid)
        elif kind.kind == "enhanced_frost":
            mid = _frost(plane, size, ci, kind.damping)
            res = _three_zone(mu, x, ci, cu, mid)
        else:  # gamma_map
            res = _gamma_map(mu, x, ci, cu)
        res = np.where(mu == 0.0, x, res)  # C_I = +inf centers pass through

    wmin, wmax = _window_minmax(plane, size)
    res = np.where(wmin == wmax, x, res)
    out = plane.copy()
    out[interior] = res
    return out


def wiener_local(plane, window=3) -> np.ndarray:
    """Adaptive local Wiener filter.

    The noise power nu2 is the mean of the window variances over the whole
    plane; the per-pixel gain is max(var - nu2, 0)/max(var, 1e-12).
    """
    plane = np.asarray(plane, dtype=np.float64)
    window = WindowSpec(window) if isinstance(window, int) else window
    size = window.size
    if plane.ndim != 2 or plane.shape[0] < size or plane.shape[1] < size:
        raise ValueError(f"plane must be at least {size}x{size}")
    half = window.half
    interior = (slice(half, plane.shape[0] - half), slice(half, plane.shape[1] - half))
    x = plane[interior]
    mu, var = _window_stats(plane, size)
    nu2 = float(var.mean())
    gain = np.maximum(var - nu2, 0.0) / np.maximum(var, _WIENER_EPS)
    res = mu + gain * (x - mu)
    wmin, wmax = _window_minmax(plane, size)
    res = np.where(wmin == wmax, x, res)
    out = plane.copy()
    out[interior] = res
    return out


def estimate_noise_cv(plane, window=3) -> float:
    """Median of the per-window coefficient of variation over the plane."""
    plane = np.asarray(plane, dtype=np.float64)
    window = WindowSpec(window) if isinstance(window, int) else window
    mu, var = _window_stats(plane, window.size)
    return float(np.median(_coefficient_of_variation(mu, var)))


def _chunks(total_rows: int, cols: int, per_elem: int):
    step = max(1, _CHUNK_ELEMS // max(1, cols * per_elem))
    for r0 in range(0, total_rows, step):
        yield r0, min(r0 + step, total_rows)


def _window_stats(plane: np.ndarray, size: int):
    view = sliding_window_view(plane, (size, size))
    out_r, out_c = view.shape[:2]
    mu = np.empty((out_r, out_c))
    var = np.empty((out_r, out_c))
    for r0, r1 in _chunks(out_r, out_c, size * size):
        blk = view[r0:r1]
        mu[r0:r1] = blk.mean(axis=(-2, -1))
        var[r0:r1] = blk.var(axis=(-2, -1))
    return mu, var


def _window_median(plane: np.ndarray, size: int) -> np.ndarray:
    view = sliding_window_view(plane, (size, size))
    out_r, out_c = view.shape[:2]
    med = np.empty((out_r, out_c))
    for r0, r1 in _chunks(out_r, out_c, size * size):
        med[r0:r1] = np.median(view[r0:r1], axis=(-2, -1))
    return med


def _window_minmax(plane: np.ndarray, size: int):
    view = sliding_window_view(plane, (size, size))
    out_r, out_c = view.shape[:2]
    wmin = np.empty((out_r, out_c))
    wmax = np.empty((out_r, out_c))
    for r0, r1 in _chunks(out_r, out_c, size * size):
        blk = view[r0:r1]
        wmin[r0:r1] = blk.min(axis=(-2, -1))
        wmax[r0:r1] = blk.max(axis=(-2, -1))
    return wmin, wmax


def _coefficient_of_variation(mu: np.ndarray, var: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        ci = np.where(mu == 0.0, np.inf, np.sqrt(var) / np.abs(mu))
    return ci


def _cov_ratio_sq(ci: np.ndarray, cu: float) -> np.ndarray:
    """(C_u / C_I)^2 with 0/0 -> 0 and positive/0 -> +inf."""
    out = np.zeros_like(ci)
    nz = ci > 0
    out[nz] = (cu / ci[nz]) ** 2
    if cu > 0:
        out[~nz] = np.inf
    return out


def _gain_blend(mu, x, k):
    """mu + k (x - mu), passing x through bit-exactly where k == 1."""
    return np.where(k == 1.0, x, mu + k * (x - mu))


def _lee_gain(ci: np.ndarray, cu: float) -> np.ndarray:
    return np.clip(1.0 - _cov_ratio_sq(ci, cu), 0.0, None)


def _kuan_gain(ci: np.ndarray, cu: float) -> np.ndarray:
    return np.clip((1.0 - _cov_ratio_sq(ci, cu)) / (1.0 + cu * cu), 0.0, None)


def _three_zone(mu, x, ci, cu, middle):
    res = middle.copy()
    z3 = ci >= cu * _CMAX_FACTOR
    res[z3] = x[z3]
    z1 = ci <= cu  # checked last: at cu == 0 a constant window is mean, not edge
    res[z1] = mu[z1]
    return res


def _gamma_map(mu, x, ci, cu):
    res = np.empty_like(mu)
    z1 = ci <= cu
    z3 = ci >= cu * _CMAX_FACTOR
    mid = ~z1 & ~z3
    res[z3] = x[z3]
    res[z1] = mu[z1]
    if np.any(mid):
        looks = 1.0 / (cu * cu)  # mid is nonempty only when cu > 0
        alpha = (1.0 + cu * cu) / (ci[mid] ** 2 - cu * cu)
        b = mu[mid] * (alpha - looks - 1.0)
        disc = b * b + 4.0 * alpha * looks * x[mid] * mu[mid]
        res[mid] = (b + np.sqrt(np.maximum(disc, 0.0))) / (2.0 * alpha)
    return res


def _frost(plane: np.ndarray, size: int, ci: np.ndarray, damping: float) -> np.ndarray:
    half = size // 2
    offs = np.arange(-half, half + 1)
    cheb = np.maximum(np.abs(offs)[:, None], np.abs(offs)[None, :])
    ci2 = np.where(np.isfinite(ci), ci, 0.0) ** 2  # inf centers are overridden later
    view = sliding_window_view(plane, (size, size))
    num = np.zeros(ci.shape)
    den = np.zeros(ci.shape)
    for d in range(half + 1):
        ring = (cheb == d).astype(np.float64)
        ring_sum = np.einsum("rcij,ij->rc", view, ring)
        w = np.exp(-damping * ci2 * d)
        num += w * ring_sum
        den += w * float(ring.sum())
    return num / den
