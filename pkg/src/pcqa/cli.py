"""Command line interface: compare, ablate, anomaly and bench subcommands.

JSON is the primary output; CSV and figure files are renderings of the
same data. Exit codes: 0 ok, 1 other failure, 2 usage, 3 I/O error,
4 parse error, 5 invalid configuration, 6 undefined metric.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .anomaly import change_mask, detect_changes
from .baselines import chamfer_distance, emd_exact, hausdorff_distance
from .cloud_io import read_cloud, write_cloud
from .degrade import PRNG_ALGORITHM, add_gaussian_noise, crop_axis, downsample_uniform, shift
from .errors import (
    ConfigError,
    EmptyCloudError,
    InvalidInputError,
    ParseError,
    PcqaError,
    UndefinedMetricError,
)
from .model import Aabb, MetricConfig
from .parallel import benchmark
from .quality import evaluate, with_baselines

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_PARSE = 4
EXIT_CONFIG = 5
EXIT_UNDEFINED = 6

DEFAULT_EPSILON = 0.1
DEFAULT_SEED = 0
DISPLAY_PRECISION = 6
WORKER_CAP_ENV = "PCQA_MAX_WORKERS"


def _default_workers() -> int:
    return max(1, os.cpu_count() or 1)


def _cap_workers(workers: int) -> int:
    cap = os.environ.get(WORKER_CAP_ENV)
    if cap:
        try:
            workers = min(workers, max(1, int(cap)))
        except ValueError:
            raise ConfigError(f"{WORKER_CAP_ENV} must be an integer, got {cap!r}")
    return workers


def _load_config_file(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid config JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: config file must hold a JSON object")
    return data


def _resolve_metric_config(args) -> tuple[MetricConfig, int]:
    """Flags beat the config file, which beats built-in defaults."""
    filecfg = _load_config_file(getattr(args, "config", None))
    epsilon = args.epsilon if args.epsilon is not None else filecfg.get("epsilon", DEFAULT_EPSILON)
    region = args.region_size if args.region_size is not None else filecfg.get("region_size")
    if region is None:
        region = 10.0 * epsilon
    workers = args.workers if args.workers is not None else filecfg.get("workers")
    if workers is None:
        workers = _default_workers()
    if epsilon <= 0:
        raise ConfigError(f"--epsilon must be > 0, got {epsilon}")
    if region <= 0:
        raise ConfigError(f"--region-size must be > 0, got {region}")
    if workers < 1:
        raise ConfigError(f"--workers must be >= 1, got {workers}")
    config = MetricConfig(epsilon=float(epsilon), region_size=float(region))
    return config, _cap_workers(int(workers))


def _emit(text: str, output) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# compare
# ---------------------------------------------------------------------------

def _report_csv(report_dict: dict) -> str:
    fields = [
        "ref", "cand", "qr", "qa", "qc", "qt",
        "epsilon", "region_size", "n_ref", "n_cand",
        "chamfer", "hausdorff", "emd",
    ]
    base = report_dict.get("baselines") or {}
    row = {
        "ref": report_dict["ref_label"],
        "cand": report_dict["cand_label"],
        "qr": report_dict["qr"],
        "qa": report_dict["qa"],
        "qc": report_dict["qc"],
        "qt": report_dict["qt"],
        "epsilon": report_dict["config"]["epsilon"],
        "region_size": report_dict["config"]["region_size"],
        "n_ref": report_dict["ref_stats"]["count"],
        "n_cand": report_dict["cand_stats"]["count"],
        "chamfer": base.get("chamfer", ""),
        "hausdorff": base.get("hausdorff", ""),
        "emd": base.get("emd", ""),
    }
    lines = [",".join(fields), ",".join(str(row[f]) for f in fields)]
    return "\n".join(lines) + "\n"


def _write_region_csv(report, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["i", "j", "k", "qr", "qr_raw", "qa", "ref_count", "cand_count"])
        for m in report.per_region:
            writer.writerow(
                [
                    m.key[0], m.key[1], m.key[2],
                    "" if m.qr is None else round(m.qr, DISPLAY_PRECISION),
                    "" if m.qr_raw is None else round(m.qr_raw, DISPLAY_PRECISION),
                    "" if m.qa is None else round(m.qa, DISPLAY_PRECISION),
                    m.ref_count, m.cand_count,
                ]
            )


def cmd_compare(args) -> int:
    config, workers = _resolve_metric_config(args)
    ref = read_cloud(args.ref)
    cand = read_cloud(args.cand)

    report = evaluate(ref, cand, config, workers=workers)

    if args.baselines:
        base = {
            "chamfer": chamfer_distance(ref, cand),
            "hausdorff": hausdorff_distance(ref, cand),
        }
        if len(ref) == len(cand) and len(ref) <= args.emd_cap:
            base["emd"] = emd_exact(ref, cand, max_points=args.emd_cap)
        else:
            base["emd"] = None
            print(
                f"note: EMD skipped (sizes {len(ref)}/{len(cand)}, cap {args.emd_cap})",
                file=sys.stderr,
            )
        report = with_baselines(report, base)

    d = report.to_dict(precision=DISPLAY_PRECISION)
    d["ref_label"] = ref.label
    d["cand_label"] = cand.label
    d["workers"] = workers
    if not args.per_region:
        d.pop("per_region")

    if args.format == "csv":
        _emit(_report_csv(d), args.output)
    else:
        _emit(json.dumps(d, indent=2) + "\n", args.output)

    if args.per_region:
        _write_region_csv(report, args.per_region)
    if args.figures:
        from .figures import render_region_heatmaps

        fig_dir = Path(args.figures)
        fig_dir.mkdir(parents=True, exist_ok=True)
        render_region_heatmaps(report, fig_dir / "regions.png")
    return EXIT_OK


# ---------------------------------------------------------------------------
# ablate
# ---------------------------------------------------------------------------

def cmd_ablate(args) -> int:
    cloud = read_cloud(args.input)
    params: dict = {"op": args.op, "seed": None, "prng": None}
    if args.op == "downsample":
        out = downsample_uniform(cloud, args.keep, seed=args.seed)
        params.update(keep_fraction=args.keep, seed=args.seed, prng=PRNG_ALGORITHM)
    elif args.op == "noise":
        out = add_gaussian_noise(cloud, args.sigma, seed=args.seed)
        params.update(sigma=args.sigma, seed=args.seed, prng=PRNG_ALGORITHM)
    elif args.op == "crop":
        out = crop_axis(cloud, args.axis, args.keep)
        params.update(axis=args.axis, keep_fraction=args.keep)
    elif args.op == "shift":
        out = shift(cloud, args.offset)
        params.update(offset=list(args.offset))
    else:
        raise ConfigError(f"unknown ablation op {args.op!r}")

    write_cloud(out, args.output)
    manifest = {
        "input": str(args.input),
        "output": str(args.output),
        "n_input": len(cloud),
        "n_output": len(out),
        **params,
    }
    manifest_path = Path(str(args.output) + ".manifest.json")
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")
    print(f"wrote {args.output} ({len(out)} points) + {manifest_path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# anomaly
# ---------------------------------------------------------------------------

def cmd_anomaly(args) -> int:
    epsilon = args.epsilon if args.epsilon is not None else DEFAULT_EPSILON
    if epsilon <= 0:
        raise ConfigError(f"--epsilon must be > 0, got {epsilon}")
    roi = None
    if args.roi is not None:
        lo, hi = args.roi[:3], args.roi[3:]
        roi = Aabb(np.array(lo), np.array(hi))

    reference = read_cloud(args.ref)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    for frame_path in args.frames:
        frame = read_cloud(frame_path)
        report = detect_changes(reference, frame, epsilon, roi=roi)
        stem = Path(frame_path).stem
        report_path = out_dir / f"{stem}.anomaly.json"
        report_path.write_text(json.dumps(report.to_dict(), indent=2) + "\n")
        line = (
            f"{frame_path}: change_fraction={report.change_fraction:.6f} "
            f"missing={len(report.missing_cells)} artifacts={len(report.artifact_cells)}"
        )
        print(line)
        if args.mask:
            mask = change_mask(report, frame)
            mask_path = out_dir / f"{stem}.mask.txt"
            mask_path.write_text("".join("1\n" if m else "0\n" for m in mask))
    return EXIT_OK


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------

def cmd_bench(args) -> int:
    config, workers = _resolve_metric_config(args)
    ref = read_cloud(args.ref)
    cand = read_cloud(args.cand)
    records = benchmark(
        ref,
        cand,
        resolutions=args.resolutions,
        region_sizes=args.region_sizes,
        config=config,
        workers=workers,
        seed=args.seed,
        repeats=args.repeats,
    )
    lines = "".join(json.dumps(r.to_dict()) + "\n" for r in records)
    _emit(lines, args.output)
    for r in records:
        if r.error:
            print(f"warning: {r.metric} @ keep={r.keep_fraction} r={r.region_size}: {r.error}",
                  file=sys.stderr)

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["metric", "keep_fraction", "region_size", "n_ref", "n_cand", "workers", "seconds"]
            )
            for r in records:
                writer.writerow(
                    [r.metric, r.keep_fraction, r.region_size, r.n_ref, r.n_cand, r.workers,
                     "" if r.seconds is None else f"{r.seconds:.6f}"]
                )
    if args.plot:
        from .figures import render_bench_plot

        render_bench_plot(records, args.plot)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser / entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pcqa",
        description="Point cloud quality assessment: four-score comparison, "
        "baseline distances, ablations, change detection and benchmarks.",
    )
    parser.add_argument("--version", action="version", version=f"pcqa {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compare", help="score a candidate cloud against a reference")
    p.add_argument("ref", help="reference cloud file (xyz/ply/pcd)")
    p.add_argument("cand", help="candidate cloud file")
    p.add_argument("-e", "--epsilon", type=float, default=None, help="cell size / precision [m]")
    p.add_argument("-r", "--region-size", type=float, default=None,
                   help="cubic region edge length [m] (default 10*epsilon)")
    p.add_argument("--workers", type=int, default=None, help="parallel region workers")
    p.add_argument("--baselines", action="store_true",
                   help="also compute chamfer/hausdorff (and EMD when sizes allow)")
    p.add_argument("--emd-cap", type=int, default=4096, help="max points for exact EMD")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("-o", "--output", default=None, help="write report here instead of stdout")
    p.add_argument("--per-region", metavar="CSV", default=None,
                   help="write per-region breakdown CSV and include it in the JSON report")
    p.add_argument("--figures", metavar="DIR", default=None,
                   help="render per-region heatmap PNGs into DIR")
    p.add_argument("--config", default=None, help="JSON config file (flags take precedence)")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("ablate", help="apply a deterministic degradation to a cloud")
    p.add_argument("input", help="input cloud file")
    p.add_argument("--op", required=True, choices=("downsample", "noise", "crop", "shift"))
    p.add_argument("--keep", type=float, default=0.5, help="keep fraction for downsample/crop")
    p.add_argument("--sigma", type=float, default=0.01, help="noise standard deviation [m]")
    p.add_argument("--axis", default="X", choices=("X", "Y", "Z", "x", "y", "z"))
    p.add_argument("--offset", type=float, nargs=3, default=(0.0, 0.0, 0.0),
                   metavar=("DX", "DY", "DZ"))
    p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                   help=f"PRNG seed (default {DEFAULT_SEED})")
    p.add_argument("-o", "--output", required=True, help="output cloud file")
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("anomaly", help="voxel change detection of frames against a reference")
    p.add_argument("ref", help="reference map file")
    p.add_argument("frames", nargs="+", help="one or more frame files")
    p.add_argument("-e", "--epsilon", type=float, default=None, help="cell size [m]")
    p.add_argument("--roi", type=float, nargs=6, default=None,
                   metavar=("X0", "Y0", "Z0", "X1", "Y1", "Z1"),
                   help="restrict both clouds to this box before voxelizing")
    p.add_argument("--out-dir", default=".", help="directory for per-frame reports")
    p.add_argument("--mask", action="store_true",
                   help="also write a 0/1 per-point mask file per frame")
    p.set_defaults(func=cmd_anomaly)

    p = sub.add_parser("bench", help="time quality scoring vs chamfer/hausdorff")
    p.add_argument("ref", help="reference cloud file")
    p.add_argument("cand", help="candidate cloud file")
    p.add_argument("--resolutions", type=float, nargs="+", required=True,
                   help="keep fractions to downsample to, e.g. 1.0 0.5 0.25")
    p.add_argument("--region-sizes", type=float, nargs="+", required=True)
    p.add_argument("-e", "--epsilon", type=float, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--repeats", type=int, default=3, help="timed repetitions per cell")
    p.add_argument("-o", "--output", default=None, help="JSON-lines output path")
    p.add_argument("--csv", default=None, help="also write a CSV pivot table here")
    p.add_argument("--plot", default=None, help="also render a runtime plot PNG here")
    p.add_argument("--config", default=None, help="JSON config file (flags take precedence)")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    # bench has no region flag of its own; the harness sweeps --region-sizes
    if not hasattr(args, "region_size"):
        args.region_size = None
    try:
        return args.func(args)
    except UndefinedMetricError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNDEFINED
    except (ConfigError, InvalidInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ParseError, EmptyCloudError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except PcqaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
