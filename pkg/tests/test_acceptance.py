"""Acceptance suite: one test per criterion, each printing a pass line and
enforcing its stated tolerance and runtime budget.

Run with ``pytest tests/test_acceptance.py -v -s``.
"""

import hashlib
import json
import math
import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

from conftest import make_labels, make_run, shifted_box_for_iou
from oracles import mc_sphere_extents
from reference import ref_evaluate
from runsim import random_dataset_with_runs
from stereobench.cli import main as cli_main
from stereobench.dataset import load_dataset, load_run_set
from stereobench.eao import EaoWindow, eao, merge_sequences
from stereobench.geometry import LEFT, RIGHT, project, reproject, sphere_to_bbox
from stereobench.harness import evaluate, score_runs
from stereobench.metrics2d import evaluate_anchor_2d
from stereobench.metrics3d import detect_failure_3d
from stereobench.model import (
    CaseRecord,
    EvalConfig,
    Keypoint2D,
    Point3D,
    StereoBBox,
    StereoCalibration,
    SubsetRecord,
)
from stereobench.service import create_app
from stereobench.synth import SceneSpec, generate
from test_metrics3d import valid_outcome as valid_outcome_3d

CALIB = StereoCalibration(focal_px=500.0, cx_px=320.0, cy_px=240.0,
                          baseline_mm=5.0, image_width=640, image_height=480)


def announce(name: str) -> None:
    print(f"[acceptance] {name}: PASS")


# --- golden merge -----------------------------------------------------------

def test_golden_merge_sequences():
    start = time.perf_counter()
    s1 = [1.0, 0.8, 0.6, 0.5, None] + [0.0] * 95
    s2 = [1.0, 1.0, 1.0, None, None] + [0.0] * 45
    video1 = merge_sequences([s1, s2])
    assert video1 == [1.0, 0.9, 0.8, 0.5, None] + [0.0] * 95
    assert len(video1) == 100

    video2 = [1.0, 1.0, 1.0, 0.0, 0.0] + [0.0] * 195
    subset = merge_sequences([video1, video2])
    assert subset == [1.0, 0.95, 0.9, 0.25, 0.0] + [0.0] * 195
    assert len(subset) == 200
    assert eao(subset[:5], EaoWindow(1, 5)) == pytest.approx(0.62)
    assert time.perf_counter() - start < 1.0
    announce("golden merge")


# --- failure-rule suite ------------------------------------------------------

def test_failure_rules_990_of_1000_window():
    labels = make_labels(1001)
    gt = labels[1].bbox
    bad = StereoBBox(shifted_box_for_iou(gt.left, 0.05), gt.right)
    override = {t: bad for t in range(991, 1001)}
    result = evaluate_anchor_2d(make_run(labels, override=override), labels)
    assert result.failure_frame == 1000
    assert result.n == 990
    assert result.accuracy == 1.0
    announce("failure rules: 990/1000 accuracy window")


def test_failure_rules_streak_boundary():
    labels = make_labels(200)
    gt = labels[1].bbox
    bad = StereoBBox(shifted_box_for_iou(gt.left, 0.05), gt.right)
    nine = evaluate_anchor_2d(
        make_run(labels, override={t: bad for t in range(40, 49)}), labels)
    assert nine.failure_frame is None
    ten = evaluate_anchor_2d(
        make_run(labels, override={t: bad for t in range(40, 50)}), labels)
    assert ten.failure_frame == 49
    announce("failure rules: 9-vs-10 streak boundary")


def test_failure_rules_either_view_triggers():
    labels = make_labels(80)
    gt = labels[1].bbox
    left_bad = StereoBBox(shifted_box_for_iou(gt.left, 0.05), gt.right)
    right_bad = StereoBBox(gt.left, shifted_box_for_iou(gt.right, 0.05))
    for bad in (left_bad, right_bad):
        result = evaluate_anchor_2d(
            make_run(labels, override={t: bad for t in range(30, 40)}), labels)
        assert result.failure_frame == 39
    announce("failure rules: either-view 2D trigger")


def test_failure_rules_mixed_3d_trigger():
    outcomes = [valid_outcome_3d(t, 10.0, 120.0) for t in range(5)]
    outcomes += [valid_outcome_3d(t, -2.0, None) for t in range(5, 10)]
    failure = detect_failure_3d(outcomes)
    assert failure is not None and failure.index == 9
    announce("failure rules: mixed 5+5 3D trigger")


# --- oracle equivalence ------------------------------------------------------

def test_oracle_equivalence_200_runs():
    start = time.perf_counter()
    keys = {"accuracy": "acc_2d", "error_px": "err_2d", "rob_2d": "rob_2d",
            "error_mm": "err_3d", "rob_3d": "rob_3d"}
    total = 0
    seed = 1000
    while total < 200:
        dataset, runs = random_dataset_with_runs(seed)
        report = score_runs(dataset, runs, EvalConfig(), "sim")
        ref = ref_evaluate(dataset, runs)
        for anchor in report.anchors:
            expected = ref["anchors"][(anchor.video_id, anchor.anchor_frame)]
            for ref_key, eng_key in keys.items():
                assert getattr(anchor.scores, eng_key).value == expected[ref_key][0]
        for ref_key, eng_key in keys.items():
            assert getattr(report.scores, eng_key).value == ref["subset"][ref_key][0]
        assert report.eao == ref["eao"]
        assert (report.window.n_min, report.window.n_max) == ref["window"]
        assert report.subset_sequence == ref["subset_sequence"]
        total += len(report.anchors)
        seed += 1
    elapsed = time.perf_counter() - start
    assert total >= 200
    assert elapsed < 30.0
    announce(f"oracle equivalence ({total} runs, exact, {elapsed:.1f}s)")


# --- perfect/null extremes ---------------------------------------------------

@pytest.fixture(scope="module")
def five_video_subset():
    specs = [
        SceneSpec("v1", 1, 180, velocity_mm=(0.2, 0.05, 0.0)),
        SceneSpec("v2", 2, 220, sin_amplitude_mm=(5.0, 2.0, 0.0),
                  occlusion_windows=((60, 80),)),
        SceneSpec("v3", 3, 150, velocity_mm=(0.0, 0.1, 0.1),
                  difficult_frames=tuple(range(30, 40))),
        SceneSpec("v4", 4, 200, velocity_mm=(-0.15, 0.0, 0.0)),
        SceneSpec("v5", 5, 170, sin_amplitude_mm=(2.0, 2.0, 1.0),
                  occlusion_windows=((100, 115),)),
    ]
    videos = tuple(generate(s, render=False) for s in specs)
    return SubsetRecord("accept", (
        CaseRecord("case_01", videos[:3]),
        CaseRecord("case_02", videos[3:]),
    ))


def test_perfect_and_null_tracker_extremes(five_video_subset):
    start = time.perf_counter()
    perfect, _ = evaluate(five_video_subset, "builtin:perfect")
    assert perfect.scores.acc_2d.value == 1.0
    assert perfect.scores.rob_2d.value == 1.0
    assert perfect.scores.rob_3d.value == 1.0
    assert perfect.eao == 1.0

    null, _ = evaluate(five_video_subset, "builtin:null")
    assert null.scores.acc_2d.value is None
    assert null.scores.rob_2d.value == 0.0
    assert null.scores.rob_3d.value == 0.0
    assert null.eao == 0.0
    assert time.perf_counter() - start < 60.0
    announce("perfect/null tracker extremes (exact)")


# --- sphere-projection geometry ----------------------------------------------

def test_sphere_projection_against_monte_carlo_1000():
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(1000):
        z = float(rng.uniform(20, 500))
        centre = Point3D(float(rng.uniform(-0.4, 0.4) * z),
                         float(rng.uniform(-0.4, 0.4) * z), z)
        bbox = sphere_to_bbox(centre, 2.5, CALIB)
        for box, extents in zip((bbox.left, bbox.right),
                                mc_sphere_extents(centre, 2.5, CALIB)):
            u0, u1, v0, v1 = extents
            worst = max(worst, abs(box.u_min - u0), abs(box.u_max - u1),
                        abs(box.v_min - v0), abs(box.v_max - v1))
    assert worst < 0.5

    z, r = 250.0, 2.5
    bbox = sphere_to_bbox(Point3D(0, 0, z), r, CALIB)
    radius_px = CALIB.focal_px * r / math.sqrt(z * z - r * r)
    assert abs((bbox.left.u_max - bbox.left.u_min) / 2 - radius_px) < 1e-3
    assert abs((bbox.left.v_max - bbox.left.v_min) / 2 - radius_px) < 1e-3
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0
    announce(f"sphere projection vs Monte-Carlo (worst {worst:.2e} px, {elapsed:.1f}s)")


# --- triangulation round-trip --------------------------------------------------

def test_triangulation_roundtrip_100k_points():
    rng = np.random.default_rng(77)
    worst = 0.0
    for _ in range(100_000):
        u = float(rng.uniform(0, CALIB.image_width))
        v = float(rng.uniform(0, CALIB.image_height))
        d = float(rng.uniform(0.2, 100.0))
        point = reproject(Keypoint2D(u, v), d, CALIB)
        left = project(point, CALIB, LEFT)
        right = project(point, CALIB, RIGHT)
        back = reproject(left, left.u - right.u, CALIB)
        worst = max(worst, abs(back.x_mm - point.x_mm),
                    abs(back.y_mm - point.y_mm), abs(back.z_mm - point.z_mm))
    assert worst < 1e-6
    announce(f"triangulation round-trip (worst {worst:.2e} mm)")


# --- end-to-end pipeline -------------------------------------------------------

@pytest.fixture(scope="module")
def e2e(tmp_path_factory):
    root = tmp_path_factory.mktemp("e2e")
    data = root / "data"
    out = root / "out"
    start = time.perf_counter()
    assert cli_main(["synth", "--out", str(data), "--videos", "4",
                     "--seed", "7", "--frames", "200"]) == 0
    assert cli_main(["evaluate", "--dataset", str(data),
                     "--tracker", "builtin:ncc", "--out", str(out),
                     "--jobs", "2"]) == 0
    out2 = root / "rescored"
    assert cli_main(["report", "--dataset", str(data),
                     "--predictions", str(out / "predictions"),
                     "--tracker", "ncc", "--out", str(out2)]) == 0
    elapsed = time.perf_counter() - start
    return {"data": data, "out": out, "rescored": out2, "elapsed": elapsed}


def test_end_to_end_pipeline_runtime(e2e):
    assert e2e["elapsed"] < 120.0
    summary = json.loads((e2e["out"] / "summary.json").read_text())
    assert summary["trackers"][0]["eao"] > 0.3
    announce(f"end-to-end synth/evaluate/report ({e2e['elapsed']:.0f}s)")


def test_end_to_end_ncc_precision_on_pure_translation(e2e):
    # video_01 of the default scene mix translates laterally at constant depth
    dataset = load_dataset(e2e["data"])
    video = next(v for v in dataset.videos if v.id == "video_01")
    runs = [r for r in load_run_set(e2e["out"] / "predictions")
            if r.video_id == "video_01"]
    assert runs
    total = 0
    within = 0
    for run in runs:
        for pred in run.predictions:
            label = video.label(pred.frame_index)
            if not label.is_valid:
                continue
            total += 1
            if pred.bbox is None:
                continue
            err_l = math.hypot(pred.bbox.left.centre.u - label.bbox.left.centre.u,
                               pred.bbox.left.centre.v - label.bbox.left.centre.v)
            err_r = math.hypot(pred.bbox.right.centre.u - label.bbox.right.centre.u,
                               pred.bbox.right.centre.v - label.bbox.right.centre.v)
            if max(err_l, err_r) <= 1.0:
                within += 1
    fraction = within / total
    assert fraction >= 0.95
    announce(f"NCC centre error <= 1 px on {100 * fraction:.1f}% of frames")


def test_end_to_end_tables_recomputable_byte_identically(e2e):
    for name in ("summary.json", "cases.csv", "eao_curve.csv", "ranking.csv",
                 "ar_plot.csv"):
        a = hashlib.sha256((e2e["out"] / name).read_bytes()).hexdigest()
        b = hashlib.sha256((e2e["rescored"] / name).read_bytes()).hexdigest()
        assert a == b, name
    announce("report tables byte-identical after persist/reload/re-score")


def test_config_defaults_in_report_provenance(e2e):
    config = json.loads((e2e["out"] / "summary.json").read_text())[
        "trackers"][0]["config"]
    assert config["iou_fail_threshold"] == 0.1
    assert config["fail_streak"] == 10
    assert config["err3d_fail_mm"] == 100.0
    assert config["anchor_spacing"] == 50
    assert config["sphere_radius_mm"] == 2.5
    announce("config defaults verbatim in report provenance")


# --- [SECONDARY] scripted annotation session ----------------------------------

def test_scripted_annotation_session(tmp_path):
    spec = SceneSpec("video_01", seed=99, frame_count=50,
                     velocity_mm=(0.2, 0.05, 0.0))
    video_dir = tmp_path / "case_01" / "video_01"
    generate(spec, video_dir, render=True)
    # start from an unlabelled video: only frames and calibration on disk
    (video_dir / "labels.json").unlink()
    (video_dir / "anchors.json").unlink()

    client = TestClient(create_app(tmp_path))
    listing = client.get("/api/videos").json()
    assert listing[0]["frame_count"] == 50
    revision = 0
    for frame in range(50):
        point = spec.point_at(frame)
        kl = project(point, spec.calib, LEFT)
        kr = project(point, spec.calib, RIGHT)
        reply = client.put(f"/api/videos/video_01/frames/{frame}/keypoints", json={
            "kl": [kl.u, kl.v], "kr": [kr.u, kr.v + 0.25], "revision": revision})
        assert reply.status_code == 200, reply.text
        revision = reply.json()["revision"]
    # flag two frames the way an annotator would
    reply = client.put("/api/videos/video_01/frames/20/flags", json={
        "is_difficult": True, "is_visible_in_both_stereo": True,
        "revision": revision})
    revision = reply.json()["revision"]
    reply = client.put("/api/videos/video_01/frames/21/flags", json={
        "is_difficult": False, "is_visible_in_both_stereo": False,
        "revision": revision})
    assert reply.status_code == 200

    code = cli_main(["validate-dataset", "--dataset", str(tmp_path),
                     "--rederive-bboxes", "--tol", "1e-6"])
    assert code == 0
    dataset = load_dataset(tmp_path)
    assert dataset.videos[0].frame_count == 50
    assert sum(1 for lb in dataset.videos[0].labels if lb.is_valid) == 48
    announce("scripted annotation session -> valid dataset, bboxes rederive to 1e-6")
