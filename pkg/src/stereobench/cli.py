"""Command-line entry point.

Exit codes: 0 success, 2 dataset validation failure, 3 tracker protocol
failure, 4 I/O failure. Failures print one machine-readable JSON object to
stderr.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import sys
from pathlib import Path

from . import dataset as ds
from .errors import DatasetError, ProtocolViolation, StereobenchError
from .geometry import disparity, reproject, sphere_to_bbox
from .harness import TrackerHandle, evaluate, score_runs
from .model import EvalConfig
from .report import emit_report
from .stats import dataset_stats
from .synth import generate_dataset

CONFIG_FLAGS = [
    ("--iou-fail-threshold", "iou_fail_threshold", float),
    ("--fail-streak", "fail_streak", int),
    ("--err3d-fail-mm", "err3d_fail_mm", float),
    ("--anchor-spacing", "anchor_spacing", int),
    ("--stereo-iou-combine", "stereo_iou_combine", str),
    ("--sphere-radius-mm", "sphere_radius_mm", float),
    ("--epipolar-tol-px", "epipolar_tol_px", float),
    ("--search-radius-px", "search_radius_px", int),
    ("--ncc-occlusion-threshold", "ncc_occlusion_threshold", float),
    ("--frame-timeout-s", "frame_timeout_s", float),
]


def _add_config_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, default=None,
                        help="JSON file with flat EvalConfig keys")
    for flag, dest, kind in CONFIG_FLAGS:
        parser.add_argument(flag, dest=dest, type=kind, default=None)
    parser.add_argument("--eao-literal-denominator", action="store_true",
                        default=None, dest="eao_literal_denominator")


def build_config(args: argparse.Namespace) -> EvalConfig:
    """Config file first, then command-line flags override its values."""
    values = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            values.update(json.load(fh))
    for _, dest, _ in CONFIG_FLAGS:
        override = getattr(args, dest, None)
        if override is not None:
            values[dest] = override
    if getattr(args, "eao_literal_denominator", None):
        values["eao_literal_denominator"] = True
    return EvalConfig.from_dict(values)


def cmd_synth(args: argparse.Namespace) -> int:
    generate_dataset(args.out, n_videos=args.videos, seed=args.seed,
                     frame_count=args.frames, render=not args.no_render)
    print(f"wrote {args.videos} videos under {args.out}")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    config = build_config(args)
    dataset = ds.load_dataset(args.dataset, config.epipolar_tol_px)
    handle = TrackerHandle.parse(args.tracker)
    jobs = args.jobs if args.jobs else os.cpu_count() or 1
    report, runs = evaluate(dataset, handle, config, jobs=jobs)
    out = Path(args.out)
    ds.save_run_set(runs, out / "predictions")
    emit_report([report], out, svg=args.svg)
    print(f"EAO {report.eao:.4f} over window "
          f"[{report.window.n_min}, {report.window.n_max}]; report in {out}")
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    config = build_config(args)
    dataset = ds.load_dataset(args.dataset, config.epipolar_tol_px)
    reports = []
    for directory in args.predictions:
        directory = Path(directory)
        runs = ds.load_run_set(directory)
        name = args.tracker or directory.name
        reports.append(score_runs(dataset, runs, config, name))
    emit_report(reports, args.out, svg=args.svg)
    print(f"report for {len(reports)} tracker(s) in {args.out}")
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    dataset = ds.load_dataset(args.dataset)
    rows = []
    for case in dataset.cases:
        for video in case.videos:
            st = dataset_stats(video, with_ncc=not args.no_ncc)
            rows.append((case.id, st))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "video_stats.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["case", "video", "avg_2d_velocity_px",
                         "avg_3d_velocity_mm", "pct_ignore", "avg_ncc"])
        for case_id, st in rows:
            writer.writerow([case_id, st.video_id,
                             "" if st.avg_2d_velocity_px is None else f"{st.avg_2d_velocity_px:.6g}",
                             "" if st.avg_3d_velocity_mm is None else f"{st.avg_3d_velocity_mm:.6g}",
                             f"{st.pct_ignore:.6g}",
                             "" if st.avg_ncc is None else f"{st.avg_ncc:.6g}"])
    with open(out / "video_stats.json", "w") as fh:
        json.dump([{"case": case_id, **dataclasses.asdict(st)}
                   for case_id, st in rows], fh, indent=1)
    print(f"stats for {len(rows)} videos in {out}")
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    config = build_config(args)
    dataset = ds.load_dataset(args.dataset, config.epipolar_tol_px)
    n_checked = 0
    worst = 0.0
    if args.rederive_bboxes:
        for video in dataset.videos:
            for label in video.labels:
                if label.keypoint_left is None or label.bbox is None:
                    continue
                d = disparity(label.keypoint_left, label.keypoint_right)
                point = reproject(label.keypoint_left, d, video.calibration)
                derived = sphere_to_bbox(point, config.sphere_radius_mm,
                                         video.calibration)
                for stored, fresh in ((label.bbox.left, derived.left),
                                      (label.bbox.right, derived.right)):
                    for a, b in ((stored.u_min, fresh.u_min), (stored.v_min, fresh.v_min),
                                 (stored.u_max, fresh.u_max), (stored.v_max, fresh.v_max)):
                        worst = max(worst, abs(a - b))
                n_checked += 1
        if worst > args.tol:
            raise DatasetError(
                f"rederived bboxes deviate up to {worst:.3g} px (> {args.tol} px) "
                f"over {n_checked} frames")
    summary = {
        "dataset": dataset.id,
        "cases": len(dataset.cases),
        "videos": len(dataset.videos),
        "frames": sum(v.frame_count for v in dataset.videos),
        "rederived_frames": n_checked,
        "max_bbox_deviation_px": worst,
    }
    print(json.dumps(summary))
    return 0


def cmd_annotate_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(args.dataset, build_config(args), args.frontend)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stereobench",
        description="Stereo bounding-box tracker benchmarking toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--videos", type=int, default=4)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--frames", type=int, default=200)
    p.add_argument("--no-render", action="store_true",
                   help="write labels and calibrations only")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("evaluate", help="run a tracker over a dataset")
    p.add_argument("--dataset", type=Path, required=True)
    p.add_argument("--tracker", required=True,
                   help="builtin:<ncc|perfect|null|static> or exec:\"<command>\"")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--jobs", type=int, default=0,
                   help="video-level parallelism (default: logical cores)")
    p.add_argument("--svg", action="store_true")
    _add_config_args(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", help="re-score persisted predictions")
    p.add_argument("--dataset", type=Path, required=True)
    p.add_argument("--predictions", type=Path, action="append", required=True)
    p.add_argument("--tracker", default=None,
                   help="tracker name (default: predictions directory name)")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--svg", action="store_true")
    _add_config_args(p)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("stats", help="dataset descriptive statistics")
    p.add_argument("--dataset", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--no-ncc", action="store_true",
                   help="skip the image-based NCC statistic")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("validate-dataset", help="run all dataset invariants")
    p.add_argument("--dataset", type=Path, required=True)
    p.add_argument("--rederive-bboxes", action="store_true",
                   help="recompute boxes from keypoints and compare")
    p.add_argument("--tol", type=float, default=1e-6,
                   help="allowed bbox deviation in pixels")
    _add_config_args(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("annotate-serve", help="serve the labelling API/UI")
    p.add_argument("--dataset", type=Path, required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8008)
    p.add_argument("--frontend", type=Path, default=None,
                   help="directory with built frontend assets")
    _add_config_args(p)
    p.set_defaults(func=cmd_annotate_serve)

    return parser


def _fail(exc: Exception, code: int) -> int:
    print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
          file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ProtocolViolation as exc:
        return _fail(exc, 3)
    except (DatasetError, StereobenchError, ValueError) as exc:
        return _fail(exc, 2)
    except OSError as exc:
        return _fail(exc, 4)


if __name__ == "__main__":
    sys.exit(main())
