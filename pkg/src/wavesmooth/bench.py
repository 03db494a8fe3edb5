"""Benchmark harness: denoise one noisy image with a roster of filters and
report the seven assessment metrics per filter as CSV and Markdown.

The run is declared in an INI-style plain-text config:

    [input]                      # either this section ...
    clean = path/to/clean.pgm

    [phantom]                    # ... or this one
    rows = 128
    cols = 128
    grid = 6
    amplitude = 30000
    sigma = 4.0
    background = 20000

    [noise]
    percent = 10.0
    seed = 42

    [output]
    dir = results

    [filters]                    # display name = method token [key=value ...]
    Noisy = identity
    SC = sc-ds
    Median = median
    VisuShrink (ST) = visu-soft basis=db4

Per-filter options: basis=haar|db4, window=N, rule=soft|hard|semisoft,
sigma=R, damping=R, t2=R.  A relative ``clean`` path is resolved against the
config file's directory; a relative output dir against the working
directory.  Filters run in config order; a failure aborts the run, names the
offending filter, and removes any partial outputs.  Given the same config
the run is fully deterministic, including CSV bytes.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass
from pathlib import Path

from . import metrics
from .image import Image, NoiseSpec, add_noise, load_image, make_phantom, save_image
from .pipeline import DenoiseConfig, config_from_method, denoise


class BenchError(ValueError):
    """Configuration or execution failure of a benchmark run."""


@dataclass
class BenchFilter:
    name: str
    cfg: DenoiseConfig


@dataclass
class BenchRun:
    filters: list
    noise: NoiseSpec
    output_dir: Path
    clean_path: Path | None = None
    phantom: dict | None = None

    def load_clean(self) -> Image:
        if self.clean_path is not None:
            return load_image(self.clean_path)
        p = self.phantom
        return make_phantom(
            p["rows"], p["cols"], p["grid"], p["amplitude"], p["sigma"], p["background"]
        )


_FILTER_OPTS = ("basis", "window", "rule", "sigma", "damping", "t2")


def _parse_filter_value(name: str, value: str) -> DenoiseConfig:
    parts = value.split()
    if not parts:
        raise BenchError(f"filter '{name}': empty method")
    kwargs = {}
    for opt in parts[1:]:
        key, eq, val = opt.partition("=")
        if not eq or key not in _FILTER_OPTS:
            raise BenchError(f"filter '{name}': bad option {opt!r}")
        kwargs[key] = val
    try:
        return config_from_method(
            parts[0],
            basis=kwargs.get("basis", "db4"),
            window=int(kwargs.get("window", 3)),
            rule=kwargs.get("rule", "soft"),
            sigma=float(kwargs["sigma"]) if "sigma" in kwargs else None,
            damping=float(kwargs.get("damping", 1.0)),
            t2=float(kwargs["t2"]) if "t2" in kwargs else None,
        )
    except ValueError as exc:
        raise BenchError(f"filter '{name}': {exc}") from exc


def parse_bench_config(path) -> BenchRun:
    """Parse and validate a benchmark config file."""
    path = Path(path)
    if not path.is_file():
        raise BenchError(f"no such config file: {path}")
    cp = configparser.ConfigParser(delimiters=("=",), interpolation=None)
    cp.optionxform = str  # preserve display-name case
    try:
        cp.read_string(path.read_text(encoding="utf-8"), source=str(path))
    except configparser.Error as exc:
        raise BenchError(f"{path}: {exc}") from exc

    has_input = cp.has_section("input") and cp.has_option("input", "clean")
    has_phantom = cp.has_section("phantom")
    if has_input == has_phantom:
        raise BenchError(f"{path}: declare exactly one of [input] clean or [phantom]")
    clean_path = None
    phantom = None
    if has_input:
        clean_path = (path.parent / cp.get("input", "clean")).resolve()
    else:
        sec = cp["phantom"]
        try:
            phantom = {
                "rows": sec.getint("rows", 128),
                "cols": sec.getint("cols", 128),
                "grid": sec.getint("grid", 6),
                "amplitude": sec.getfloat("amplitude", 30000.0),
                "sigma": sec.getfloat("sigma", 4.0),
                "background": sec.getfloat("background", 20000.0),
            }
        except ValueError as exc:
            raise BenchError(f"{path}: bad [phantom] value: {exc}") from exc

    if not cp.has_section("noise"):
        raise BenchError(f"{path}: missing [noise] section")
    try:
        noise = NoiseSpec(
            sigma_percent=cp.getfloat("noise", "percent"),
            seed=cp.getint("noise", "seed", fallback=0),
        )
    except (ValueError, configparser.Error) as exc:
        raise BenchError(f"{path}: bad [noise] section: {exc}") from exc

    if not cp.has_section("output") or not cp.has_option("output", "dir"):
        raise BenchError(f"{path}: missing [output] dir")
    # input paths are config-relative; the output dir follows the invocation
    output_dir = Path(cp.get("output", "dir")).resolve()

    if not cp.has_section("filters") or not cp.options("filters"):
        raise BenchError(f"{path}: missing or empty [filters] section")
    filters = []
    seen = set()
    for name in cp.options("filters"):
        if name in seen:
            raise BenchError(f"{path}: duplicate filter display name '{name}'")
        seen.add(name)
        filters.append(BenchFilter(name, _parse_filter_value(name, cp.get("filters", name))))

    return BenchRun(
        filters=filters,
        noise=noise,
        output_dir=output_dir,
        clean_path=clean_path,
        phantom=phantom,
    )


def _slug(name: str) -> str:
    s = re.sub(r"[^A-Za-z0-9]+", "-", name).strip("-").lower()
    return s or "filter"


def _markdown_table(rows: list) -> str:
    header = list(metrics.CSV_HEADER) + ["SNR_dB", "PSNR_dB"]
    lines = [
        "| " + " | ".join(header) + " |",
        "|" + "|".join(["---"] * len(header)) + "|",
    ]
    for name, rep in rows:
        cells = [name] + [metrics.format_value(v) for v in rep.values()]
        cells += [
            metrics.format_value(metrics.to_db(rep.snr)),
            metrics.format_value(metrics.to_db(rep.psnr)),
        ]
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def run_bench(run: BenchRun) -> Path:
    """Execute a benchmark run; returns the CSV report path.

    Denoisers operate on the in-memory (unclamped) noisy image; clamping is
    applied only when images are written.  Only oracle filters receive the
    clean reference.
    """
    clean = run.load_clean()
    noisy = add_noise(clean, run.noise)

    run.output_dir.mkdir(parents=True, exist_ok=True)
    written = []

    def emit(img: Image, name: str) -> Path:
        p = run.output_dir / name
        save_image(img, p)
        written.append(p)
        return p

    try:
        if run.clean_path is None:
            emit(clean, "clean.pgm")
        emit(noisy, "noisy.pgm")
        rows = []
        for f in run.filters:
            try:
                needs_clean = f.cfg.method == "shrinkage" and f.cfg.estimator == "oracle"
                denoised = denoise(noisy, f.cfg, clean_ref=clean if needs_clean else None)
                rows.append((f.name, metrics.full_report(clean, denoised)))
                emit(denoised, f"denoised_{_slug(f.name)}.pgm")
            except Exception as exc:
                raise BenchError(f"filter '{f.name}' failed: {exc}") from exc

        csv_path = run.output_dir / "report.csv"
        with open(csv_path, "w", encoding="ascii", newline="") as fh:
            fh.write(metrics.csv_header() + "\n")
            for name, rep in rows:
                fh.write(rep.csv_row(name) + "\n")
        written.append(csv_path)

        md_path = run.output_dir / "report.md"
        source = str(run.clean_path) if run.clean_path is not None else "phantom " + repr(run.phantom)
        md = (
            "# Denoising benchmark\n\n"
            f"- clean source: {source}\n"
            f"- noise: {metrics.format_value(run.noise.sigma_percent)} % of full range, "
            f"seed {run.noise.seed}\n\n" + _markdown_table(rows)
        )
        with open(md_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(md)
        written.append(md_path)
    except BaseException:
        for p in written:
            try:
                p.unlink()
            except OSError:
                pass
        raise
    return csv_path
