"""Report emission: summary JSON, per-case tables, EAO curve, ranking and
accuracy-robustness plot data, with optional SVG renderings."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Optional, Sequence

from .results import MetricsReport, ScoreSet


def _fmt(value: Optional[float], digits: int = 6) -> str:
    return "" if value is None else f"{value:.{digits}g}"


def _pm(mean: Optional[float], std: Optional[float]) -> str:
    if mean is None:
        return ""
    if std is None:
        return f"{mean:.1f}"
    return f"{mean:.1f} ± {std:.1f}"


def _scores_dict(scores: ScoreSet) -> dict:
    return {
        name: {"value": getattr(scores, name).value,
               "n": getattr(scores, name).weight}
        for name in ("acc_2d", "err_2d", "rob_2d", "err_3d", "rob_3d")
    }


def ranking_order(reports: Sequence[MetricsReport]) -> list[MetricsReport]:
    """EAO descending; ties broken by tracker name for a stable order."""
    return sorted(reports, key=lambda r: (-r.eao, r.tracker))


def summary_payload(report: MetricsReport) -> dict:
    return {
        "tracker": report.tracker,
        "subset": report.subset_id,
        "config": report.config.to_dict(),
        "eao": report.eao,
        "eao_window": {"n_min": report.window.n_min, "n_max": report.window.n_max},
        "scores": _scores_dict(report.scores),
        "err_2d_std": report.err_std("err_2d"),
        "err_3d_std": report.err_std("err_3d"),
        "cases": [
            {
                "case": case.case_id,
                "eao": case.eao,
                "scores": _scores_dict(case.scores),
                "err_2d_std": report.err_std("err_2d", case.case_id),
                "err_3d_std": report.err_std("err_3d", case.case_id),
            }
            for case in report.cases
        ],
        "videos": [
            {"video": v.video_id, "case": v.case_id, "eao": v.eao,
             "scores": _scores_dict(v.scores), "sequence_length": len(v.sequence)}
            for v in report.videos
        ],
        "anchors": [
            {"video": a.video_id, "anchor_frame": a.anchor_frame, "eao": a.eao,
             "scores": _scores_dict(a.scores),
             "failure_frame_2d": a.result_2d.failure_frame,
             "failure_frame_3d": a.result_3d.failure_frame}
            for a in report.anchors
        ],
    }


def write_cases_csv(reports: Sequence[MetricsReport], path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tracker", "case", "rob_2d", "acc_2d", "err_2d_px",
                         "err_2d_std", "err_2d", "rob_3d", "err_3d_mm",
                         "err_3d_std", "err_3d", "eao"])
        for report in reports:
            rows = [("(all)", report.scores, report.eao,
                     report.err_std("err_2d"), report.err_std("err_3d"))]
            rows += [(c.case_id, c.scores, c.eao,
                      report.err_std("err_2d", c.case_id),
                      report.err_std("err_3d", c.case_id)) for c in report.cases]
            for case_id, scores, eao_value, std2, std3 in rows:
                writer.writerow([
                    report.tracker, case_id,
                    _fmt(scores.rob_2d.value), _fmt(scores.acc_2d.value),
                    _fmt(scores.err_2d.value), _fmt(std2),
                    _pm(scores.err_2d.value, std2),
                    _fmt(scores.rob_3d.value), _fmt(scores.err_3d.value),
                    _fmt(std3), _pm(scores.err_3d.value, std3),
                    _fmt(eao_value),
                ])


def write_eao_curve_csv(reports: Sequence[MetricsReport], path: Path) -> None:
    window = reports[0].window
    length = max(len(r.subset_sequence) for r in reports)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["frame", "in_window"] + [r.tracker for r in reports])
        for pos in range(1, length + 1):
            row = [pos, int(window.n_min <= pos <= window.n_max)]
            for report in reports:
                seq = report.subset_sequence
                entry = seq[pos - 1] if pos <= len(seq) else 0.0
                row.append("" if entry is None else f"{entry:.6g}")
            writer.writerow(row)


def write_ranking_csv(reports: Sequence[MetricsReport], path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["rank", "tracker", "eao"])
        for rank, report in enumerate(ranking_order(reports), start=1):
            writer.writerow([rank, report.tracker, _fmt(report.eao)])


def write_ar_plot_csv(reports: Sequence[MetricsReport], path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tracker", "rob_2d", "acc_2d"])
        for report in reports:
            writer.writerow([report.tracker, _fmt(report.scores.rob_2d.value),
                             _fmt(report.scores.acc_2d.value)])


def _render_svgs(reports: Sequence[MetricsReport], out_dir: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    window = reports[0].window

    fig, ax = plt.subplots(figsize=(8, 4.5))
    for report in reports:
        xs = range(1, len(report.subset_sequence) + 1)
        ys = [0.0 if v is None else v for v in report.subset_sequence]
        ax.plot(list(xs), ys, label=report.tracker, linewidth=1.0)
    ax.axvspan(window.n_min, window.n_max, color="tab:blue", alpha=0.15)
    ax.set_xlabel("frames since anchor")
    ax.set_ylabel("IoU")
    ax.set_ylim(0, 1.02)
    ax.legend(loc="upper right", fontsize="small")
    fig.tight_layout()
    fig.savefig(out_dir / "eao_curve.svg")
    plt.close(fig)

    ranked = ranking_order(reports)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(range(1, len(ranked) + 1), [r.eao for r in ranked], "o-")
    for rank, report in enumerate(ranked, start=1):
        ax.annotate(report.tracker, (rank, report.eao), fontsize="small",
                    textcoords="offset points", xytext=(4, 4))
    ax.set_xlabel("rank")
    ax.set_ylabel("EAO")
    fig.tight_layout()
    fig.savefig(out_dir / "ranking.svg")
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(5, 5))
    for report in reports:
        rob, acc = report.scores.rob_2d.value, report.scores.acc_2d.value
        if rob is None or acc is None:
            continue
        ax.plot([rob], [acc], "o")
        ax.annotate(report.tracker, (rob, acc), fontsize="small",
                    textcoords="offset points", xytext=(4, 4))
    ax.set_xlabel("2D robustness")
    ax.set_ylabel("2D accuracy")
    ax.set_xlim(0, 1.02)
    ax.set_ylim(0, 1.02)
    fig.tight_layout()
    fig.savefig(out_dir / "ar_plot.svg")
    plt.close(fig)


def emit_report(reports: Sequence[MetricsReport], out_dir: Path,
                svg: bool = False) -> None:
    """Write the full report directory for one or more trackers."""
    if not reports:
        raise ValueError("need at least one report")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = {"trackers": [summary_payload(r) for r in reports]}
    with open(out_dir / "summary.json", "w") as fh:
        json.dump(payload, fh, indent=1)
    write_cases_csv(reports, out_dir / "cases.csv")
    write_eao_curve_csv(reports, out_dir / "eao_curve.csv")
    write_ranking_csv(reports, out_dir / "ranking.csv")
    write_ar_plot_csv(reports, out_dir / "ar_plot.csv")
    if svg:
        _render_svgs(reports, out_dir)
