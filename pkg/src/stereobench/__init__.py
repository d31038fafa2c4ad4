"""Benchmarking toolkit for stereo bounding-box trackers.

Provides anchor-based tracker evaluation with 2D/3D failure detection,
accuracy/robustness/error metrics, expected-average-overlap ranking, the
keypoint-to-sphere-to-box annotation geometry, a synthetic data generator
and a labelling HTTP service.
"""

from .eao import EaoWindow, anchor_sequence, eao, eao_window, merge_sequences, weighted_average
from .geometry import disparity, epipolar_consistent, project, reproject, sphere_to_bbox
from .harness import TrackerHandle, evaluate, generate_anchors, run_dataset, score_runs
from .metrics2d import evaluate_anchor_2d, frame_iou, iou
from .metrics3d import evaluate_anchor_3d
from .model import (
    AnchorRun,
    BBox,
    CaseRecord,
    EvalConfig,
    FrameLabel,
    FramePrediction,
    Keypoint2D,
    Point3D,
    StereoBBox,
    StereoCalibration,
    SubsetRecord,
    VideoRecord,
)
from .results import MetricsReport

__version__ = "0.1.0"

__all__ = [
    "AnchorRun",
    "BBox",
    "CaseRecord",
    "EaoWindow",
    "EvalConfig",
    "FrameLabel",
    "FramePrediction",
    "Keypoint2D",
    "MetricsReport",
    "Point3D",
    "StereoBBox",
    "StereoCalibration",
    "SubsetRecord",
    "TrackerHandle",
    "VideoRecord",
    "anchor_sequence",
    "disparity",
    "eao",
    "eao_window",
    "epipolar_consistent",
    "evaluate",
    "evaluate_anchor_2d",
    "evaluate_anchor_3d",
    "frame_iou",
    "generate_anchors",
    "iou",
    "merge_sequences",
    "project",
    "reproject",
    "run_dataset",
    "score_runs",
    "sphere_to_bbox",
    "weighted_average",
    "__version__",
]
