import numpy as np
import pytest

from stereobench.model import (
    AnchorRun,
    BBox,
    FrameLabel,
    FramePrediction,
    Keypoint2D,
    StereoBBox,
    StereoCalibration,
)

CALIB = StereoCalibration(focal_px=500.0, cx_px=320.0, cy_px=240.0,
                          baseline_mm=5.0, image_width=640, image_height=480)


def box_at(u: float, v: float, w: float = 20.0, h: float = 20.0) -> BBox:
    return BBox(u - w / 2, v - h / 2, u + w / 2, v + h / 2)


def stereo_box_at(u: float, v: float, d: float = 10.0,
                  w: float = 20.0, h: float = 20.0) -> StereoBBox:
    return StereoBBox(box_at(u, v, w, h), box_at(u - d, v, w, h))


def make_labels(frame_count: int, u: float = 320.0, v: float = 240.0,
                d: float = 10.0, invisible=(), difficult=()) -> tuple[FrameLabel, ...]:
    """Static ground-truth track with chosen flagged frames."""
    labels = []
    for t in range(frame_count):
        bbox = stereo_box_at(u, v, d)
        labels.append(FrameLabel(
            frame_index=t,
            keypoint_left=Keypoint2D(u, v),
            keypoint_right=Keypoint2D(u - d, v),
            bbox=bbox,
            is_difficult=t in difficult,
            is_visible_in_both_stereo=t not in invisible,
        ))
    return tuple(labels)


def make_run(labels, anchor: int = 0, video_id: str = "video",
             override=None) -> AnchorRun:
    """Run echoing the ground truth except where ``override`` maps a frame to
    a replacement bbox (or None for a no-target output)."""
    override = override or {}
    predictions = []
    for label in labels[anchor + 1:]:
        t = label.frame_index
        if t in override:
            predictions.append(FramePrediction(t, override[t]))
        else:
            predictions.append(FramePrediction(t, label.bbox))
    return AnchorRun(video_id, anchor, tuple(predictions))


def shifted_box_for_iou(base: BBox, target_iou: float) -> BBox:
    """Horizontally shift ``base`` so its IoU with the original equals
    ``target_iou`` (solve s from iou = (w - s) / (w + s))."""
    shift = base.width * (1 - target_iou) / (1 + target_iou)
    return BBox(base.u_min + shift, base.v_min, base.u_max + shift, base.v_max)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
