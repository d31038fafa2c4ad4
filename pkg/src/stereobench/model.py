"""Domain types: calibration, keypoints, boxes, labels, videos and predictions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional


@dataclass(frozen=True)
class StereoCalibration:
    """Rectified pinhole parameters shared by both views.

    One focal length for both axes (square pixels); the right camera sits
    ``baseline_mm`` to the right of the left camera.
    """

    focal_px: float
    cx_px: float
    cy_px: float
    baseline_mm: float
    image_width: int
    image_height: int

    def __post_init__(self) -> None:
        if not (self.focal_px > 0 and self.baseline_mm > 0):
            raise ValueError("focal_px and baseline_mm must be positive")
        if not (self.image_width > 0 and self.image_height > 0):
            raise ValueError("image dimensions must be positive")
        if not (0 <= self.cx_px < self.image_width):
            raise ValueError("cx_px must lie within [0, image_width)")
        if not (0 <= self.cy_px < self.image_height):
            raise ValueError("cy_px must lie within [0, image_height)")


@dataclass(frozen=True)
class Keypoint2D:
    u: float
    v: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.u) and math.isfinite(self.v)):
            raise ValueError("keypoint coordinates must be finite")


@dataclass(frozen=True)
class Point3D:
    """Camera-centred coordinates of the left rectified camera, in mm."""

    x_mm: float
    y_mm: float
    z_mm: float


@dataclass(frozen=True)
class BBox:
    u_min: float
    v_min: float
    u_max: float
    v_max: float

    def __post_init__(self) -> None:
        if not (self.u_min < self.u_max and self.v_min < self.v_max):
            raise ValueError("bbox must have positive extent")

    @property
    def centre(self) -> Keypoint2D:
        return Keypoint2D((self.u_min + self.u_max) / 2, (self.v_min + self.v_max) / 2)

    @property
    def width(self) -> float:
        return self.u_max - self.u_min

    @property
    def height(self) -> float:
        return self.v_max - self.v_min

    @property
    def area(self) -> float:
        return self.width * self.height


@dataclass(frozen=True)
class StereoBBox:
    left: BBox
    right: BBox

    @property
    def centre_disparity(self) -> float:
        return self.left.centre.u - self.right.centre.u


@dataclass(frozen=True)
class FrameLabel:
    """Ground truth for one frame.

    A frame is *valid* iff the target is visible in both views and the frame
    is not flagged difficult; only valid frames enter score numerators.
    """

    frame_index: int
    keypoint_left: Optional[Keypoint2D] = None
    keypoint_right: Optional[Keypoint2D] = None
    bbox: Optional[StereoBBox] = None
    is_difficult: bool = False
    is_visible_in_both_stereo: bool = True

    @property
    def is_valid(self) -> bool:
        return self.is_visible_in_both_stereo and not self.is_difficult


@dataclass(frozen=True)
class FramePrediction:
    """Tracker output for one frame; ``bbox is None`` encodes a "no target" call."""

    frame_index: int
    bbox: Optional[StereoBBox] = None

    @property
    def is_no_target(self) -> bool:
        return self.bbox is None


@dataclass(frozen=True)
class AnchorRun:
    """One tracker execution from an anchor frame to the end of the video."""

    video_id: str
    anchor_frame: int
    predictions: tuple[FramePrediction, ...]

    def __post_init__(self) -> None:
        expected = self.anchor_frame + 1
        for pred in self.predictions:
            if pred.frame_index != expected:
                raise ValueError(
                    f"predictions must cover contiguous frames after the anchor; "
                    f"expected frame {expected}, got {pred.frame_index}"
                )
            expected += 1


@dataclass(frozen=True)
class VideoRecord:
    id: str
    frame_count: int
    calibration: StereoCalibration
    labels: tuple[FrameLabel, ...]
    anchors: tuple[int, ...]
    frame_rate_hz: float = 25.0
    frame_source: Optional[Path] = None

    def label(self, frame_index: int) -> FrameLabel:
        return self.labels[frame_index]

    def frame_paths(self, frame_index: int) -> tuple[Path, Path]:
        """Paths of the left/right image files for a frame."""
        if self.frame_source is None:
            raise FileNotFoundError(f"video {self.id} has no rendered frames")
        name = f"{frame_index:06d}.png"
        return (self.frame_source / "frames_left" / name,
                self.frame_source / "frames_right" / name)


@dataclass(frozen=True)
class CaseRecord:
    id: str
    videos: tuple[VideoRecord, ...]

    def __post_init__(self) -> None:
        if not self.videos:
            raise ValueError(f"case {self.id} has no videos")


@dataclass(frozen=True)
class SubsetRecord:
    id: str
    cases: tuple[CaseRecord, ...]

    def __post_init__(self) -> None:
        if not self.cases:
            raise ValueError(f"subset {self.id} has no cases")

    @property
    def videos(self) -> tuple[VideoRecord, ...]:
        return tuple(v for case in self.cases for v in case.videos)


@dataclass(frozen=True)
class EvalConfig:
    """Evaluation thresholds and knobs; defaults follow the benchmark protocol."""

    iou_fail_threshold: float = 0.1
    fail_streak: int = 10
    err3d_fail_mm: float = 100.0
    anchor_spacing: int = 50
    stereo_iou_combine: str = "mean"  # or "min"
    sphere_radius_mm: float = 2.5
    eao_literal_denominator: bool = False
    epipolar_tol_px: float = 1.0
    search_radius_px: int = 32
    ncc_occlusion_threshold: float = 0.4
    frame_timeout_s: float = 30.0

    def __post_init__(self) -> None:
        if self.iou_fail_threshold <= 0 or self.err3d_fail_mm <= 0:
            raise ValueError("failure thresholds must be positive")
        if self.fail_streak < 1:
            raise ValueError("fail_streak must be >= 1")
        if self.anchor_spacing < 1:
            raise ValueError("anchor_spacing must be >= 1")
        if self.stereo_iou_combine not in ("mean", "min"):
            raise ValueError("stereo_iou_combine must be 'mean' or 'min'")
        if self.sphere_radius_mm <= 0:
            raise ValueError("sphere_radius_mm must be positive")

    def combine_iou(self, iou_left: float, iou_right: float) -> float:
        if self.stereo_iou_combine == "min":
            return min(iou_left, iou_right)
        return (iou_left + iou_right) / 2

    def to_dict(self) -> dict:
        return {
            "iou_fail_threshold": self.iou_fail_threshold,
            "fail_streak": self.fail_streak,
            "err3d_fail_mm": self.err3d_fail_mm,
            "anchor_spacing": self.anchor_spacing,
            "stereo_iou_combine": self.stereo_iou_combine,
            "sphere_radius_mm": self.sphere_radius_mm,
            "eao_literal_denominator": self.eao_literal_denominator,
            "epipolar_tol_px": self.epipolar_tol_px,
            "search_radius_px": self.search_radius_px,
            "ncc_occlusion_threshold": self.ncc_occlusion_threshold,
            "frame_timeout_s": self.frame_timeout_s,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EvalConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)
