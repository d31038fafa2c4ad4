"""Randomized labelled videos and tracker runs for oracle-equivalence tests.

Boxes are built directly (epipolar-consistent by construction) rather than
rendered, so hundreds of runs score in well under a second.
"""

from __future__ import annotations

import numpy as np

from stereobench.model import (
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

CALIB = StereoCalibration(focal_px=500.0, cx_px=320.0, cy_px=240.0,
                          baseline_mm=5.0, image_width=640, image_height=480)


def stereo_box(u: float, v: float, w: float, h: float, d: float) -> StereoBBox:
    left = BBox(u - w / 2, v - h / 2, u + w / 2, v + h / 2)
    right = BBox(u - d - w / 2, v - h / 2, u - d + w / 2, v + h / 2)
    return StereoBBox(left, right)


def random_video(rng: np.random.Generator, video_id: str) -> VideoRecord:
    frame_count = int(rng.integers(40, 140))
    u = float(rng.uniform(200, 440))
    v = float(rng.uniform(150, 330))
    w = float(rng.uniform(18, 40))
    h = float(rng.uniform(18, 40))
    d = float(rng.uniform(8, 40))

    occluded = np.zeros(frame_count, dtype=bool)
    for _ in range(int(rng.integers(0, 3))):
        start = int(rng.integers(0, frame_count))
        occluded[start:start + int(rng.integers(3, 15))] = True
    difficult = rng.random(frame_count) < 0.05

    labels = []
    for t in range(frame_count):
        u += float(rng.normal(0, 1.5))
        v += float(rng.normal(0, 1.0))
        d = float(np.clip(d + rng.normal(0, 0.3), 4.0, 60.0))
        bbox = stereo_box(u, v, w, h, d)
        kpt_l = bbox.left.centre
        labels.append(FrameLabel(
            frame_index=t,
            keypoint_left=kpt_l,
            keypoint_right=Keypoint2D(kpt_l.u - d, kpt_l.v),
            bbox=bbox,
            is_difficult=bool(difficult[t]),
            is_visible_in_both_stereo=not bool(occluded[t]),
        ))

    valid = [lb.frame_index for lb in labels if lb.is_valid
             and lb.frame_index <= frame_count - 12]
    if not valid:
        labels[0] = FrameLabel(0, labels[0].keypoint_left, labels[0].keypoint_right,
                               labels[0].bbox, False, True)
        valid = [0]
    anchors = [valid[0]]
    for frame in valid:
        if frame >= anchors[-1] + 25:
            anchors.append(frame)

    return VideoRecord(id=video_id, frame_count=frame_count, calibration=CALIB,
                       labels=tuple(labels), anchors=tuple(anchors[:4]))


def random_run(rng: np.random.Generator, video: VideoRecord,
               anchor: int) -> AnchorRun:
    """Predictions mixing good tracking, drift, dropouts and bad disparity."""
    mode = rng.choice(["good", "drifting", "flaky"])
    drift = np.zeros(2)
    predictions = []
    for frame in range(anchor + 1, video.frame_count):
        label = video.label(frame)
        roll = rng.random()
        if roll < (0.08 if mode != "flaky" else 0.35):
            predictions.append(FramePrediction(frame))
            continue
        if label.bbox is None:
            predictions.append(FramePrediction(frame))
            continue
        if mode == "drifting":
            drift += rng.normal(0, 1.2, size=2)
        noise = rng.normal(0, 2.0, size=2)
        centre = label.bbox.left.centre
        cu = float(centre.u + drift[0] + noise[0])
        cv = float(centre.v + drift[1] + noise[1])
        w = label.bbox.left.width * float(rng.uniform(0.85, 1.15))
        h = label.bbox.left.height * float(rng.uniform(0.85, 1.15))
        # occasionally produce a broken (non-positive) predicted disparity
        if rng.random() < 0.04:
            d_pred = float(rng.uniform(-5, 0))
        else:
            d_pred = label.bbox.centre_disparity + float(rng.normal(0, 1.0))
        predictions.append(FramePrediction(
            frame, stereo_box(cu, cv, w, h, d_pred)))
    return AnchorRun(video.id, anchor, tuple(predictions))


def random_dataset_with_runs(seed: int, n_videos: int = 4
                             ) -> tuple[SubsetRecord, list[AnchorRun]]:
    rng = np.random.default_rng(seed)
    videos = [random_video(rng, f"video_{i}") for i in range(n_videos)]
    half = max(1, n_videos // 2)
    cases = (CaseRecord("case_a", tuple(videos[:half])),
             CaseRecord("case_b", tuple(videos[half:])))
    cases = tuple(c for c in cases if c.videos)
    dataset = SubsetRecord(id=f"sim_{seed}", cases=cases)
    runs = [random_run(rng, video, anchor)
            for video in videos for anchor in video.anchors]
    return dataset, runs
