"""3D error, 3D failure detection and 3D robustness, computed independently
from the 2D metrics on the same anchor runs."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .geometry import reproject
from .metrics2d import Failure, FrameStatus, find_failure_streak
from .model import AnchorRun, FrameLabel, StereoCalibration


@dataclass(frozen=True)
class FrameOutcome3D:
    frame_index: int
    status: FrameStatus
    disparity_px: Optional[float] = None  # predicted-centre disparity
    error_mm: Optional[float] = None      # present iff disparity > 0


@dataclass(frozen=True)
class AnchorResult3D:
    error_mm: Optional[float]
    robustness: Optional[float]
    n: int
    n_success: int
    denominator: int
    failure_frame: Optional[int]
    streak_start: Optional[int]


def classify_frames_3d(run: AnchorRun, labels: Sequence[FrameLabel],
                       calib: StereoCalibration) -> list[FrameOutcome3D]:
    """Triangulate predicted and ground-truth box centres frame by frame.

    Frames whose predicted disparity is not positive cannot triangulate and
    carry no error value.
    """
    outcomes = []
    for pred in run.predictions:
        label = labels[pred.frame_index]
        if not label.is_valid:
            if pred.bbox is not None and not label.is_visible_in_both_stereo:
                status = FrameStatus.EXCESS_PREDICTION
            else:
                status = FrameStatus.IGNORE
            outcomes.append(FrameOutcome3D(pred.frame_index, status))
        elif pred.bbox is None:
            outcomes.append(FrameOutcome3D(pred.frame_index, FrameStatus.NO_PREDICTION))
        else:
            assert label.bbox is not None
            d_pred = pred.bbox.centre_disparity
            error = None
            if d_pred > 0:
                p3 = reproject(pred.bbox.left.centre, d_pred, calib)
                g3 = reproject(label.bbox.left.centre, label.bbox.centre_disparity, calib)
                error = math.sqrt((p3.x_mm - g3.x_mm) ** 2
                                  + (p3.y_mm - g3.y_mm) ** 2
                                  + (p3.z_mm - g3.z_mm) ** 2)
            outcomes.append(FrameOutcome3D(pred.frame_index, FrameStatus.VALID,
                                           d_pred, error))
    return outcomes


def _bad_flags_3d(outcomes: Sequence[FrameOutcome3D],
                  err_fail_mm: float) -> list[Optional[bool]]:
    flags: list[Optional[bool]] = []
    for out in outcomes:
        if out.status is FrameStatus.VALID:
            flags.append(out.disparity_px <= 0 or out.error_mm > err_fail_mm)
        elif out.status is FrameStatus.NO_PREDICTION:
            flags.append(True)
        else:
            flags.append(None)
    return flags


def detect_failure_3d(outcomes: Sequence[FrameOutcome3D], err_fail_mm: float = 100.0,
                      streak: int = 10) -> Optional[Failure]:
    """3D tracking failure: error above threshold or non-positive disparity
    (the two conditions mix within one streak) for ``streak`` consecutive
    assessable frames."""
    return find_failure_streak(_bad_flags_3d(outcomes, err_fail_mm), streak)


def evaluate_anchor_3d(run: AnchorRun, labels: Sequence[FrameLabel],
                       calib: StereoCalibration, err_fail_mm: float = 100.0,
                       streak: int = 10) -> AnchorResult3D:
    """3D error and 3D robustness for one anchor sub-sequence."""
    outcomes = classify_frames_3d(run, labels, calib)
    failure = detect_failure_3d(outcomes, err_fail_mm, streak)
    window_end = failure.streak_start if failure else len(outcomes)

    err_sum = 0.0
    n = 0
    for out in outcomes[:window_end]:
        if out.status is FrameStatus.VALID and out.error_mm is not None:
            err_sum += out.error_mm
            n += 1

    success_end = failure.index + 1 if failure else len(outcomes)
    n_success = 0
    for out in outcomes[:success_end]:
        if (out.status is FrameStatus.VALID and out.disparity_px > 0
                and out.error_mm <= err_fail_mm):
            n_success += 1

    n_valid_gt = sum(1 for out in outcomes if labels[out.frame_index].is_valid)
    n_excess = sum(1 for out in outcomes if out.status is FrameStatus.EXCESS_PREDICTION)
    denominator = n_valid_gt + n_excess

    return AnchorResult3D(
        error_mm=err_sum / n if n else None,
        robustness=n_success / denominator if denominator else None,
        n=n,
        n_success=n_success,
        denominator=denominator,
        failure_frame=outcomes[failure.index].frame_index if failure else None,
        streak_start=failure.streak_start if failure else None,
    )


def error_3d(run: AnchorRun, labels: Sequence[FrameLabel],
             calib: StereoCalibration, **kwargs) -> Optional[float]:
    return evaluate_anchor_3d(run, labels, calib, **kwargs).error_mm


def robustness_3d(run: AnchorRun, labels: Sequence[FrameLabel],
                  calib: StereoCalibration, **kwargs) -> Optional[float]:
    return evaluate_anchor_3d(run, labels, calib, **kwargs).robustness
