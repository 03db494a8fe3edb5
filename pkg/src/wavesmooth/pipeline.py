"""Denoising pipeline: the subband-smoothing method and a uniform
dispatcher over every baseline.

The subband-smoothing method ("sc") decomposes the image one wavelet level,
runs a spatial smoother independently over the three detail planes (the
approximation plane passes through untouched), and reconstructs.  Spatial
baselines apply a window filter to the whole image; shrinkage baselines
threshold the three detail planes with an estimator-chosen threshold and a
shared noise sigma taken from the diagonal detail plane unless supplied.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .filters import (
    FilterKind,
    WindowSpec,
    directional_smooth,
    local_statistical_filter,
)
from .image import Image
from .shrinkage import (
    ThresholdRule,
    apply_threshold,
    bayes_threshold,
    estimate_sigma,
    normal_threshold,
    oracle_threshold,
    sure_threshold,
    visu_threshold,
)
from .wavelet import SubbandSet, dwt2, get_basis, idwt2

_METHODS = ("identity", "sc", "spatial", "shrinkage")
_ESTIMATORS = ("visu", "sure", "oracle", "bayes", "normal")

# CLI/config spellings of the spatial filters ("ds" is the directional smoother)
_SPATIAL_TOKENS = {
    "ds": "ds",
    "median": "median",
    "lee": "lee",
    "enhanced-lee": "enhanced_lee",
    "en-lee": "enhanced_lee",
    "kuan": "kuan",
    "frost": "frost",
    "enhanced-frost": "enhanced_frost",
    "en-frost": "enhanced_frost",
    "gamma-map": "gamma_map",
    "gamma": "gamma_map",
    "wiener": "wiener",
}


@dataclass(frozen=True)
class DenoiseConfig:
    """Selects a denoising method and carries exactly its parameters.

    method    one of "identity", "sc", "spatial", "shrinkage"
    smoother  (sc) "ds" or a FilterKind for the detail planes
    baseline  (spatial) "ds" or a FilterKind for the whole image
    estimator (shrinkage) "visu", "sure", "oracle", "bayes", or "normal"
    rule      (shrinkage) threshold rule, default soft
    basis     wavelet basis name for sc/shrinkage
    window    window size for the statistical filters
    sigma     optional noise-sigma override for shrinkage
    levels    decomposition levels; only 1 is supported
    """

    method: str
    smoother: object = None
    baseline: object = None
    estimator: str | None = None
    rule: ThresholdRule = ThresholdRule("soft")
    basis: str = "db4"
    window: int = 3
    sigma: float | None = None
    levels: int = 1

    def __post_init__(self):
        if self.method not in _METHODS:
            raise ValueError(f"unknown method {self.method!r} (choose from {_METHODS})")
        if self.levels != 1:
            raise ValueError("only one decomposition level is supported")
        WindowSpec(self.window)
        get_basis(self.basis)
        if self.method == "sc":
            if self.smoother is None:
                raise ValueError("method 'sc' requires a smoother")
            if self.baseline is not None or self.estimator is not None:
                raise ValueError("method 'sc' takes only a smoother")
        elif self.method == "spatial":
            if self.baseline is None:
                raise ValueError("method 'spatial' requires a baseline filter")
            if self.smoother is not None or self.estimator is not None:
                raise ValueError("method 'spatial' takes only a baseline filter")
        elif self.method == "shrinkage":
            if self.estimator not in _ESTIMATORS:
                raise ValueError(
                    f"method 'shrinkage' requires an estimator from {_ESTIMATORS}"
                )
            if self.smoother is not None or self.baseline is not None:
                raise ValueError("method 'shrinkage' takes only an estimator and rule")
        else:  # identity
            if self.smoother is not None or self.baseline is not None or self.estimator is not None:
                raise ValueError("method 'identity' takes no filter parameters")
        if self.sigma is not None and self.method != "shrinkage":
            raise ValueError("sigma only applies to shrinkage methods")


def _smoother_fn(smoother, window: int):
    """Resolve a smoother spec ("ds", FilterKind, kind name, or a callable
    plane -> plane) to a function."""
    if callable(smoother):
        return smoother
    if isinstance(smoother, str):
        if smoother == "ds":
            return directional_smooth
        smoother = FilterKind(smoother)
    if isinstance(smoother, FilterKind):
        kind = smoother
        return lambda plane: local_statistical_filter(plane, kind, window)
    raise ValueError(f"cannot interpret smoother {smoother!r}")


def sc_denoise(img: Image, smoother, basis="db4", window: int = 3) -> Image:
    """Smooth the three detail subbands of a one-level transform and
    reconstruct; the approximation plane is passed through bit-identically."""
    if img.rows < 4 or img.cols < 4:
        raise ValueError("subband smoothing needs an image of at least 4x4")
    basis = get_basis(basis)
    fn = _smoother_fn(smoother, window)
    sb = dwt2(img, basis)
    smoothed = SubbandSet(
        ca=sb.ca,
        chd=fn(sb.chd),
        cvd=fn(sb.cvd),
        cdd=fn(sb.cdd),
        source_rows=sb.source_rows,
        source_cols=sb.source_cols,
        depth_bits=sb.depth_bits,
    )
    return idwt2(smoothed, basis)


def _shrinkage_denoise(img: Image, cfg: DenoiseConfig, clean_ref: Image | None) -> Image:
    basis = get_basis(cfg.basis)
    sb = dwt2(img, basis)
    sigma = cfg.sigma if cfg.sigma is not None else estimate_sigma(sb.cdd)
    clean_sb = dwt2(clean_ref, basis) if cfg.estimator == "oracle" else None

    def threshold_for(name: str, plane: np.ndarray) -> float:
        if cfg.estimator == "visu":
            return visu_threshold(img.rows * img.cols, sigma)
        if cfg.estimator == "sure":
            # sure requires sigma > 0; a noiseless plane needs no threshold
            return sure_threshold(plane, sigma) if sigma > 0 else 0.0
        if cfg.estimator == "bayes":
            return bayes_threshold(plane, sigma)
        if cfg.estimator == "normal":
            return normal_threshold(plane, sigma, levels=cfg.levels)
        return oracle_threshold(plane, clean_sb.details[name], cfg.rule)

    new_details = {
        name: apply_threshold(plane, threshold_for(name, plane), cfg.rule)
        for name, plane in sb.details.items()
    }
    out = SubbandSet(
        ca=sb.ca,
        chd=new_details["chd"],
        cvd=new_details["cvd"],
        cdd=new_details["cdd"],
        source_rows=sb.source_rows,
        source_cols=sb.source_cols,
        depth_bits=sb.depth_bits,
    )
    return idwt2(out, basis)


def denoise(img: Image, cfg: DenoiseConfig, clean_ref: Image | None = None) -> Image:
    """Route an image through the configured denoiser.

    ``clean_ref`` must be given exactly when the oracle estimator is
    selected; no other method may see the clean image.
    """
    if cfg.method == "shrinkage" and cfg.estimator == "oracle":
        if clean_ref is None:
            raise ValueError("the oracle estimator requires a clean reference image")
        if clean_ref.data.shape != img.data.shape:
            raise ValueError("clean reference dimensions must match the input")
    elif clean_ref is not None:
        raise ValueError("clean_ref is only accepted by the oracle estimator")

    if cfg.method == "identity":
        return img.copy()
    if cfg.method == "sc":
        return sc_denoise(img, cfg.smoother, cfg.basis, cfg.window)
    if cfg.method == "spatial":
        if cfg.baseline == "ds":
            return Image(directional_smooth(img.data), img.depth_bits)
        kind = FilterKind(cfg.baseline) if isinstance(cfg.baseline, str) else cfg.baseline
        return Image(local_statistical_filter(img.data, kind, cfg.window), img.depth_bits)
    return _shrinkage_denoise(img, cfg, clean_ref)


def config_from_method(
    token: str,
    *,
    basis: str = "db4",
    window: int = 3,
    rule: str = "soft",
    sigma: float | None = None,
    damping: float = 1.0,
    t2: float | None = None,
) -> DenoiseConfig:
    """Build a DenoiseConfig from a CLI/config method token.

    Grammar:
      identity
      <spatial>                    whole-image filter: ds, median, lee,
                                   enhanced-lee, kuan, frost, enhanced-frost,
                                   gamma-map, wiener
      sc-<spatial>                 subband smoothing with that filter
      <estimator>[-<rule>]         shrinkage: visu, sure, oracle, bayes,
                                   normal; rule defaults to --rule
    """
    tok = token.strip().lower().replace("_", "-")

    def spatial_spec(name: str):
        kind = _SPATIAL_TOKENS[name]
        return "ds" if kind == "ds" else FilterKind(kind, damping=damping)

    if tok == "identity":
        return DenoiseConfig(method="identity")
    if tok in _SPATIAL_TOKENS:
        return DenoiseConfig(method="spatial", baseline=spatial_spec(tok), window=window)
    if tok.startswith("sc-") and tok[3:] in _SPATIAL_TOKENS:
        return DenoiseConfig(
            method="sc", smoother=spatial_spec(tok[3:]), basis=basis, window=window
        )
    head, _, tail = tok.partition("-")
    if head in _ESTIMATORS and (tail == "" or tail in ("soft", "hard", "semisoft")):
        return DenoiseConfig(
            method="shrinkage",
            estimator=head,
            rule=ThresholdRule(tail or rule, t2=t2),
            basis=basis,
            sigma=sigma,
        )
    raise ValueError(f"unknown --method {token!r}")
