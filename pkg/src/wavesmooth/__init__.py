"""Wavelet-domain image denoising by smoothing detail subbands, classic
shrinkage and speckle-filter baselines, and a seven-metric benchmark."""

from .image import Image, ImageFormatError, NoiseSpec, add_noise, load_image, make_phantom, save_image
from .wavelet import DB4, HAAR, SubbandSet, WaveletBasis, dump_subbands, dwt2, get_basis, idwt2
from .filters import (
    FilterKind,
    WindowSpec,
    directional_smooth,
    estimate_noise_cv,
    local_statistical_filter,
    wiener_local,
)
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
from .pipeline import DenoiseConfig, config_from_method, denoise, sc_denoise
from .metrics import (
    DegenerateInputError,
    EdgeMap,
    MetricsReport,
    aad,
    cqy,
    edge_map,
    fom,
    full_report,
    ify,
    psnr,
    snr,
    sct,
    to_db,
)
from .bench import BenchError, BenchRun, parse_bench_config, run_bench

__version__ = "0.1.0"
