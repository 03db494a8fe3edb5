"""Command-line front end: denoise, addnoise, metrics, bench, phantom."""

from __future__ import annotations

import argparse
import sys

from . import metrics as _metrics
from .bench import parse_bench_config, run_bench
from .image import Image, NoiseSpec, add_noise, load_image, make_phantom, save_image
from .pipeline import config_from_method, denoise


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wavesmooth",
        description="Wavelet-domain image denoising, baselines, and metrics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("denoise", help="denoise one image")
    p.add_argument("--in", dest="in_path", required=True, metavar="PATH")
    p.add_argument("--out", dest="out_path", required=True, metavar="PATH")
    p.add_argument("--method", required=True,
                   help="identity, a spatial filter (ds, median, lee, ...), "
                        "sc-<filter>, or <estimator>[-<rule>]")
    p.add_argument("--basis", choices=("haar", "db4"), default="db4")
    p.add_argument("--window", type=int, default=3, metavar="N")
    p.add_argument("--rule", choices=("soft", "hard", "semisoft"), default="soft")
    p.add_argument("--sigma", type=float, default=None, metavar="REAL")
    p.add_argument("--clean", dest="clean_path", default=None, metavar="PATH",
                   help="clean reference, required by the oracle estimator")

    p = sub.add_parser("addnoise", help="add seeded Gaussian noise")
    p.add_argument("--in", dest="in_path", required=True, metavar="PATH")
    p.add_argument("--out", dest="out_path", required=True, metavar="PATH")
    p.add_argument("--percent", type=float, required=True,
                   help="noise sigma as percent of the full dynamic range")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("metrics", help="compare a test image against a reference")
    p.add_argument("--ref", required=True, metavar="PATH")
    p.add_argument("--test", required=True, metavar="PATH")
    p.add_argument("--csv", action="store_true", help="emit one CSV header + data row")

    p = sub.add_parser("bench", help="run a configured benchmark")
    p.add_argument("config", metavar="CONFIG")

    p = sub.add_parser("phantom", help="write a synthetic spot-lattice image")
    p.add_argument("--out", dest="out_path", required=True, metavar="PATH")
    p.add_argument("--rows", type=int, default=128)
    p.add_argument("--cols", type=int, default=128)
    p.add_argument("--grid", type=int, default=6)
    p.add_argument("--amplitude", type=float, default=30000.0)
    p.add_argument("--sigma", type=float, default=4.0, help="spot sigma in pixels")
    p.add_argument("--background", type=float, default=20000.0)

    return parser


def _cmd_denoise(args) -> int:
    cfg = config_from_method(
        args.method,
        basis=args.basis,
        window=args.window,
        rule=args.rule,
        sigma=args.sigma,
    )
    needs_clean = cfg.method == "shrinkage" and cfg.estimator == "oracle"
    if needs_clean and args.clean_path is None:
        raise ValueError(f"--method {args.method} requires --clean <path>")
    if not needs_clean and args.clean_path is not None:
        raise ValueError("--clean is only accepted by oracle methods")
    img = load_image(args.in_path)
    clean = load_image(args.clean_path) if needs_clean else None
    out = denoise(img, cfg, clean_ref=clean)
    save_image(out, args.out_path)
    print(f"wrote {args.out_path} ({out.rows}x{out.cols}, method {args.method})")
    return 0


def _cmd_addnoise(args) -> int:
    img = load_image(args.in_path)
    noisy = add_noise(img, NoiseSpec(sigma_percent=args.percent, seed=args.seed))
    save_image(noisy, args.out_path)
    print(f"wrote {args.out_path} ({args.percent:g} % noise, seed {args.seed})")
    return 0


def _cmd_metrics(args) -> int:
    ref = load_image(args.ref)
    test = load_image(args.test)
    rep = _metrics.full_report(ref, test)
    if args.csv:
        print(_metrics.csv_header())
        print(rep.csv_row(args.test))
        return 0
    labels = _metrics.CSV_HEADER[1:]
    for label, value in zip(labels, rep.values()):
        print(f"{label:8s} {_metrics.format_value(value)}")
    print(f"{'SNR_dB':8s} {_metrics.format_value(_metrics.to_db(rep.snr))}")
    print(f"{'PSNR_dB':8s} {_metrics.format_value(_metrics.to_db(rep.psnr))}")
    return 0


def _cmd_bench(args) -> int:
    csv_path = run_bench(parse_bench_config(args.config))
    print(f"wrote {csv_path}")
    return 0


def _cmd_phantom(args) -> int:
    img = make_phantom(
        args.rows, args.cols, args.grid, args.amplitude, args.sigma, args.background
    )
    save_image(img, args.out_path)
    print(f"wrote {args.out_path} ({img.rows}x{img.cols}, {args.grid}x{args.grid} spots)")
    return 0


_COMMANDS = {
    "denoise": _cmd_denoise,
    "addnoise": _cmd_addnoise,
    "metrics": _cmd_metrics,
    "bench": _cmd_bench,
    "phantom": _cmd_phantom,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
