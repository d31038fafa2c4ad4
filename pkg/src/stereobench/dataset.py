"""Dataset directory loading, validation and prediction (de)serialization.

Layout::

    root/<case_id>/<video_id>/
        calibration.json   {f, cx, cy, baseline_mm, width, height[, fps]}
        labels.json        one entry per frame, 0..N-1
        anchors.json       strictly increasing frame indices
        frames_left/%06d.png, frames_right/%06d.png   (optional)
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional

from .errors import (
    EpipolarViolation,
    MalformedLabel,
    MissingCalibration,
    NonIncreasingAnchors,
    SchemaMismatch,
)
from .model import (
    AnchorRun,
    BBox,
    CaseRecord,
    FrameLabel,
    FramePrediction,
    Keypoint2D,
    StereoBBox,
    StereoCalibration,
    SubsetRecord,
    VideoRecord,
)

CALIBRATION_FILE = "calibration.json"
LABELS_FILE = "labels.json"
ANCHORS_FILE = "anchors.json"


def _load_json(path: Path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaMismatch(f"{path}: invalid JSON ({exc})") from exc


def load_calibration(path: Path) -> StereoCalibration:
    if not path.is_file():
        raise MissingCalibration(f"missing {path}")
    data = _load_json(path)
    try:
        calib = StereoCalibration(
            focal_px=float(data["f"]),
            cx_px=float(data["cx"]),
            cy_px=float(data["cy"]),
            baseline_mm=float(data["baseline_mm"]),
            image_width=int(data["width"]),
            image_height=int(data["height"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise MissingCalibration(f"{path}: {exc}") from exc
    return calib


def _parse_keypoint(raw, where: str) -> Optional[Keypoint2D]:
    if raw is None:
        return None
    try:
        u, v = raw
        return Keypoint2D(float(u), float(v))
    except (TypeError, ValueError) as exc:
        raise MalformedLabel(f"{where}: bad keypoint {raw!r}") from exc


def _parse_bbox(raw, where: str) -> Optional[BBox]:
    if raw is None:
        return None
    try:
        u0, v0, u1, v1 = raw
        return BBox(float(u0), float(v0), float(u1), float(v1))
    except (TypeError, ValueError) as exc:
        raise MalformedLabel(f"{where}: bad bbox {raw!r}") from exc


def label_to_json(label: FrameLabel) -> dict:
    return {
        "frame": label.frame_index,
        "kpt_left": [label.keypoint_left.u, label.keypoint_left.v]
        if label.keypoint_left else None,
        "kpt_right": [label.keypoint_right.u, label.keypoint_right.v]
        if label.keypoint_right else None,
        "bbox_left": [label.bbox.left.u_min, label.bbox.left.v_min,
                      label.bbox.left.u_max, label.bbox.left.v_max]
        if label.bbox else None,
        "bbox_right": [label.bbox.right.u_min, label.bbox.right.v_min,
                       label.bbox.right.u_max, label.bbox.right.v_max]
        if label.bbox else None,
        "is_difficult": label.is_difficult,
        "is_visible_in_both_stereo": label.is_visible_in_both_stereo,
    }


def label_from_json(entry: dict, where: str) -> FrameLabel:
    try:
        frame = int(entry["frame"])
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedLabel(f"{where}: missing frame index") from exc
    where = f"{where} frame {frame}"
    bbox_left = _parse_bbox(entry.get("bbox_left"), where)
    bbox_right = _parse_bbox(entry.get("bbox_right"), where)
    if (bbox_left is None) != (bbox_right is None):
        raise MalformedLabel(f"{where}: bbox present in only one view")
    return FrameLabel(
        frame_index=frame,
        keypoint_left=_parse_keypoint(entry.get("kpt_left"), where),
        keypoint_right=_parse_keypoint(entry.get("kpt_right"), where),
        bbox=StereoBBox(bbox_left, bbox_right) if bbox_left else None,
        is_difficult=bool(entry.get("is_difficult", False)),
        is_visible_in_both_stereo=bool(entry.get("is_visible_in_both_stereo", True)),
    )


def validate_label(label: FrameLabel, where: str, epipolar_tol: float) -> None:
    """Check the per-frame invariants a ground-truth label must satisfy."""
    if label.is_valid:
        if label.keypoint_left is None or label.keypoint_right is None:
            raise MalformedLabel(f"{where}: valid frame without both keypoints")
        if label.bbox is None:
            raise MalformedLabel(f"{where}: valid frame without a bbox")
    if label.keypoint_left is not None and label.keypoint_right is not None:
        dv = abs(label.keypoint_left.v - label.keypoint_right.v)
        if dv > epipolar_tol:
            raise EpipolarViolation(
                f"{where}: keypoint v-offset {dv:.3f} px exceeds {epipolar_tol} px")
        if label.keypoint_left.u - label.keypoint_right.u <= 0:
            raise EpipolarViolation(f"{where}: keypoint disparity is not positive")
    if label.bbox is not None:
        cl, cr = label.bbox.left.centre, label.bbox.right.centre
        if abs(cl.v - cr.v) > epipolar_tol:
            raise EpipolarViolation(
                f"{where}: bbox centre v-offset exceeds {epipolar_tol} px")
        if label.bbox.centre_disparity <= 0:
            raise EpipolarViolation(f"{where}: bbox disparity is not positive")


def load_labels(path: Path, epipolar_tol: float) -> tuple[FrameLabel, ...]:
    data = _load_json(path)
    if not isinstance(data, list) or not data:
        raise MalformedLabel(f"{path}: labels must be a non-empty array")
    labels = [label_from_json(entry, str(path)) for entry in data]
    labels.sort(key=lambda lb: lb.frame_index)
    for expected, label in enumerate(labels):
        if label.frame_index != expected:
            raise MalformedLabel(
                f"{path}: labels must cover frames 0..N-1 contiguously "
                f"(expected {expected}, got {label.frame_index})")
        validate_label(label, f"{path} frame {label.frame_index}", epipolar_tol)
    return tuple(labels)


def load_anchors(path: Path, labels: tuple[FrameLabel, ...]) -> tuple[int, ...]:
    data = _load_json(path)
    if not isinstance(data, list):
        raise MalformedLabel(f"{path}: anchors must be an array of frame indices")
    anchors = [int(a) for a in data]
    for prev, cur in zip(anchors, anchors[1:]):
        if cur <= prev:
            raise NonIncreasingAnchors(f"{path}: {prev} -> {cur}")
    for a in anchors:
        if not 0 <= a < len(labels):
            raise MalformedLabel(f"{path}: anchor {a} out of range")
        if not labels[a].is_valid:
            raise MalformedLabel(f"{path}: anchor {a} refers to an invalid frame")
    return tuple(anchors)


def load_video(video_dir: Path, epipolar_tol: float = 1.0) -> VideoRecord:
    calib_path = video_dir / CALIBRATION_FILE
    calib = load_calibration(calib_path)
    labels = load_labels(video_dir / LABELS_FILE, epipolar_tol)
    anchors_path = video_dir / ANCHORS_FILE
    anchors = load_anchors(anchors_path, labels) if anchors_path.is_file() else ()
    frame_rate = float(_load_json(calib_path).get("fps", 25.0))
    has_frames = (video_dir / "frames_left").is_dir() and (video_dir / "frames_right").is_dir()
    return VideoRecord(
        id=video_dir.name,
        frame_count=len(labels),
        calibration=calib,
        labels=labels,
        anchors=anchors,
        frame_rate_hz=frame_rate,
        frame_source=video_dir if has_frames else None,
    )


def load_dataset(root: Path, epipolar_tol: float = 1.0) -> SubsetRecord:
    """Load and fully validate a dataset directory into a SubsetRecord."""
    root = Path(root)
    if not root.is_dir():
        raise MalformedLabel(f"dataset root {root} is not a directory")
    cases = []
    for case_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        videos = []
        for video_dir in sorted(p for p in case_dir.iterdir() if p.is_dir()):
            if not (video_dir / LABELS_FILE).is_file():
                continue
            videos.append(load_video(video_dir, epipolar_tol))
        if videos:
            cases.append(CaseRecord(id=case_dir.name, videos=tuple(videos)))
    if not cases:
        raise MalformedLabel(f"no cases found under {root}")
    return SubsetRecord(id=root.name, cases=tuple(cases))


def _bbox_list(b: BBox) -> list[float]:
    return [b.u_min, b.v_min, b.u_max, b.v_max]


def run_to_json(run: AnchorRun) -> dict:
    frames = []
    for pred in run.predictions:
        if pred.bbox is None:
            frames.append({"frame": pred.frame_index, "outcome": "none"})
        else:
            frames.append({
                "frame": pred.frame_index,
                "outcome": "bbox",
                "left": _bbox_list(pred.bbox.left),
                "right": _bbox_list(pred.bbox.right),
            })
    return {"video": run.video_id, "anchor_frame": run.anchor_frame, "frames": frames}


def run_from_json(data: dict, where: str = "<predictions>") -> AnchorRun:
    try:
        video = data["video"]
        anchor = int(data["anchor_frame"])
        raw_frames = data["frames"]
    except (KeyError, TypeError) as exc:
        raise SchemaMismatch(f"{where}: missing fields ({exc})") from exc
    predictions = []
    for entry in raw_frames:
        outcome = entry.get("outcome")
        if outcome == "none":
            predictions.append(FramePrediction(int(entry["frame"])))
        elif outcome == "bbox":
            left = _parse_bbox(entry.get("left"), where)
            right = _parse_bbox(entry.get("right"), where)
            if left is None or right is None:
                raise SchemaMismatch(f"{where}: bbox outcome without both boxes")
            predictions.append(
                FramePrediction(int(entry["frame"]), StereoBBox(left, right)))
        else:
            raise SchemaMismatch(f"{where}: unknown outcome tag {outcome!r}")
    try:
        return AnchorRun(video_id=video, anchor_frame=anchor,
                         predictions=tuple(predictions))
    except ValueError as exc:
        raise SchemaMismatch(f"{where}: {exc}") from exc


def save_predictions(run: AnchorRun, path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(run_to_json(run), fh)


def load_predictions(path: Path) -> AnchorRun:
    return run_from_json(_load_json(Path(path)), where=str(path))


def run_filename(run: AnchorRun) -> str:
    return f"{run.video_id}__a{run.anchor_frame:06d}.json"


def save_run_set(runs: list[AnchorRun], directory: Path) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for run in runs:
        save_predictions(run, directory / run_filename(run))


def load_run_set(directory: Path) -> list[AnchorRun]:
    directory = Path(directory)
    runs = [load_predictions(p) for p in sorted(directory.glob("*.json"))]
    if not runs:
        raise SchemaMismatch(f"no prediction files under {directory}")
    return runs
