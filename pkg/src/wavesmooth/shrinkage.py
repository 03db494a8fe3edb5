"""Wavelet-coefficient thresholding: application rules and threshold
estimators (universal, SURE, Bayes, normal-shrink, and a clean-reference
oracle).

Thresholds are computed per detail subband of a one-level transform with a
shared noise sigma, conventionally estimated from the diagonal detail plane
by the median-absolute-deviation rule sigma = median(|cdd|)/0.6745.
Variances are population variances (divide by n) throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_RULES = ("soft", "hard", "semisoft")
_MAD_SCALE = 0.6745


@dataclass(frozen=True)
class ThresholdRule:
    """Thresholding rule; ``t2`` is the semisoft upper knee (default 2T)."""

    rule: str = "soft"
    t2: float | None = None

    def __post_init__(self):
        if self.rule not in _RULES:
            raise ValueError(f"unknown threshold rule {self.rule!r} (choose from {_RULES})")
        if self.t2 is not None and self.rule != "semisoft":
            raise ValueError("t2 is only meaningful for the semisoft rule")


def estimate_sigma(cdd) -> float:
    """Robust noise sigma from a detail plane: median(|cdd|) / 0.6745."""
    cdd = np.asarray(cdd, dtype=np.float64)
    if cdd.size == 0:
        raise ValueError("cannot estimate sigma from an empty plane")
    return float(np.median(np.abs(cdd))) / _MAD_SCALE


def apply_threshold(plane, t: float, rule: ThresholdRule = ThresholdRule("soft")) -> np.ndarray:
    """Apply a soft, hard, or semisoft threshold elementwise.

    soft:      y = sign(x) * max(|x| - T, 0)
    hard:      y = x * [|x| > T]
    semisoft:  y = 0 for |x| <= T, x for |x| > t2, and
               sign(x) * t2 * (|x| - T) / (t2 - T) in between
    """
    plane = np.asarray(plane, dtype=np.float64)
    if not t >= 0:
        raise ValueError("threshold must be nonnegative")
    if rule.rule == "semisoft" and rule.t2 is not None and not rule.t2 > t:
        raise ValueError(f"semisoft upper threshold t2={rule.t2} must exceed T={t}")
    if t == 0:
        return plane.copy()
    absx = np.abs(plane)
    if rule.rule == "hard":
        return np.where(absx > t, plane, 0.0)
    if rule.rule == "soft":
        return np.sign(plane) * np.maximum(absx - t, 0.0)
    t2 = rule.t2 if rule.t2 is not None else 2.0 * t
    ramp = np.sign(plane) * t2 * (absx - t) / (t2 - t)
    return np.where(absx <= t, 0.0, np.where(absx > t2, plane, ramp))


def visu_threshold(n: int, sigma: float) -> float:
    """Universal threshold sigma * sqrt(2 ln n) for an n-pixel image."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    return sigma * math.sqrt(2.0 * math.log(n))


def sure_threshold(plane, sigma: float) -> float:
    """Threshold minimizing Stein's unbiased risk estimate over the
    candidate set {0} union {|x_i|}.

    SURE(t) = n sigma^2 - 2 sigma^2 #{|x_i| <= t} + sum_i min(x_i^2, t^2);
    ties break toward the smaller t and the result is capped at the
    universal threshold for the same plane.
    """
    plane = np.asarray(plane, dtype=np.float64)
    if plane.size == 0:
        raise ValueError("cannot compute a SURE threshold on an empty plane")
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    n = plane.size
    a = np.sort(np.abs(plane.ravel()))
    cands = np.concatenate([[0.0], a])
    counts = np.searchsorted(a, cands, side="right")
    prefix = np.concatenate([[0.0], np.cumsum(a * a)])
    s2 = sigma * sigma
    risk = n * s2 - 2.0 * s2 * counts + (prefix[counts] + (n - counts) * cands * cands)
    t = float(cands[int(np.argmin(risk))])  # candidates ascend, so first min is smallest t
    return min(t, visu_threshold(n, sigma))


def bayes_threshold(plane, sigma: float) -> float:
    """Bayes-shrink rule T = sigma^2 / sigma_x with
    sigma_x = sqrt(max(var(plane) - sigma^2, 0)); if the signal estimate
    vanishes, T = max|plane| so everything is thresholded."""
    plane = np.asarray(plane, dtype=np.float64)
    if plane.size == 0:
        raise ValueError("cannot compute a threshold on an empty plane")
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    sigma_x = math.sqrt(max(float(plane.var()) - sigma * sigma, 0.0))
    if sigma_x == 0.0:
        return float(np.abs(plane).max())
    return sigma * sigma / sigma_x


def normal_threshold(plane, sigma: float, levels: int = 1) -> float:
    """Normal-shrink rule T = beta * sigma^2 / sigma_y with
    beta = sqrt(ln(L / J)), L the subband pixel count, J the level count,
    sigma_y the subband standard deviation (sentinel as in bayes when 0)."""
    plane = np.asarray(plane, dtype=np.float64)
    if plane.size == 0:
        raise ValueError("cannot compute a threshold on an empty plane")
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    if levels < 1 or plane.size <= levels:
        raise ValueError("subband size must exceed the level count")
    beta = math.sqrt(math.log(plane.size / levels))
    sigma_y = float(plane.std())
    if sigma_y == 0.0:
        return float(np.abs(plane).max())
    return beta * sigma * sigma / sigma_y


def oracle_threshold(noisy, clean, rule: ThresholdRule = ThresholdRule("hard")) -> float:
    """Clean-reference oracle: the threshold from {0} union {|noisy_i|}
    minimizing the squared error of the thresholded plane against ``clean``;
    ties break toward the smaller threshold."""
    noisy = np.asarray(noisy, dtype=np.float64)
    clean = np.asarray(clean, dtype=np.float64)
    if noisy.shape != clean.shape:
        raise ValueError(f"shape mismatch: {noisy.shape} vs {clean.shape}")
    cands = np.unique(np.concatenate([[0.0], np.abs(noisy.ravel())]))
    best_t = 0.0
    best_err = math.inf
    for t in cands:
        err = float(((apply_threshold(noisy, float(t), rule) - clean) ** 2).sum())
        if err < best_err:
            best_err = err
            best_t = float(t)
    return best_t
