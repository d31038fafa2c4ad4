"""Per-frame IoU, 2D failure detection and per-anchor 2D scores.

All score arithmetic here is plain Python float accumulation in frame order;
results are reproducible bit-for-bit by a direct transcription of the score
definitions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional, Sequence

from .model import AnchorRun, BBox, FrameLabel, StereoBBox


class FrameStatus(Enum):
    VALID = "valid"
    IGNORE = "ignore"
    NO_PREDICTION = "no_prediction"
    EXCESS_PREDICTION = "excess_prediction"


@dataclass(frozen=True)
class FrameOutcome2D:
    frame_index: int
    status: FrameStatus
    iou_left: Optional[float] = None
    iou_right: Optional[float] = None
    combined_iou: Optional[float] = None
    centre_dist_px: Optional[float] = None


class Failure(NamedTuple):
    """A completed failure streak, as outcome-list indices."""

    index: int        # index of the streak's final bad frame
    streak_start: int  # index of the streak's first bad frame


@dataclass(frozen=True)
class AnchorResult2D:
    accuracy: Optional[float]
    error_px: Optional[float]
    robustness: Optional[float]
    n: int
    n_success: int
    denominator: int
    failure_frame: Optional[int]   # absolute frame index of the final bad frame
    streak_start: Optional[int]    # outcome index where the fatal streak began


def iou(a: BBox, b: BBox) -> float:
    """Intersection area over union area of two axis-aligned boxes."""
    iw = min(a.u_max, b.u_max) - max(a.u_min, b.u_min)
    ih = min(a.v_max, b.v_max) - max(a.v_min, b.v_min)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    return inter / (a.area + b.area - inter)


def combine_iou(iou_left: float, iou_right: float, combine: str = "mean") -> float:
    if combine == "min":
        return min(iou_left, iou_right)
    if combine == "mean":
        return (iou_left + iou_right) / 2
    raise ValueError(f"unknown stereo IoU combination {combine!r}")


def frame_iou(pred: StereoBBox, gt: StereoBBox,
              combine: str = "mean") -> tuple[float, float, float]:
    """Per-view IoU plus the combined stereo score for one frame."""
    left = iou(pred.left, gt.left)
    right = iou(pred.right, gt.right)
    return left, right, combine_iou(left, right, combine)


def _centre_dist(a: BBox, b: BBox) -> float:
    ca, cb = a.centre, b.centre
    return math.hypot(ca.u - cb.u, ca.v - cb.v)


def classify_frames_2d(run: AnchorRun, labels: Sequence[FrameLabel],
                       combine: str = "mean") -> list[FrameOutcome2D]:
    """Classify every frame after the anchor against its ground truth.

    Frames with invalid ground truth become IGNORE, or EXCESS_PREDICTION when
    the tracker predicted while the target was not visible in both views.
    """
    outcomes = []
    for pred in run.predictions:
        label = labels[pred.frame_index]
        if not label.is_valid:
            if pred.bbox is not None and not label.is_visible_in_both_stereo:
                status = FrameStatus.EXCESS_PREDICTION
            else:
                status = FrameStatus.IGNORE
            outcomes.append(FrameOutcome2D(pred.frame_index, status))
        elif pred.bbox is None:
            outcomes.append(FrameOutcome2D(pred.frame_index, FrameStatus.NO_PREDICTION))
        else:
            assert label.bbox is not None
            left, right, combined = frame_iou(pred.bbox, label.bbox, combine)
            dist = (_centre_dist(pred.bbox.left, label.bbox.left)
                    + _centre_dist(pred.bbox.right, label.bbox.right)) / 2
            outcomes.append(FrameOutcome2D(pred.frame_index, FrameStatus.VALID,
                                           left, right, combined, dist))
    return outcomes


def find_failure_streak(flags: Sequence[Optional[bool]], streak: int) -> Optional[Failure]:
    """Locate the first run of ``streak`` consecutive bad frames.

    ``flags`` holds True (bad), False (good) or None (transparent: neither
    counts towards nor resets the streak).
    """
    count = 0
    start = 0
    for i, flag in enumerate(flags):
        if flag is None:
            continue
        if flag:
            if count == 0:
                start = i
            count += 1
            if count == streak:
                return Failure(index=i, streak_start=start)
        else:
            count = 0
    return None


def _bad_flags_2d(outcomes: Sequence[FrameOutcome2D],
                  threshold: float) -> list[Optional[bool]]:
    flags: list[Optional[bool]] = []
    for out in outcomes:
        if out.status is FrameStatus.VALID:
            flags.append(min(out.iou_left, out.iou_right) < threshold)
        elif out.status is FrameStatus.NO_PREDICTION:
            flags.append(True)
        else:
            flags.append(None)
    return flags


def detect_failure_2d(outcomes: Sequence[FrameOutcome2D], threshold: float = 0.1,
                      streak: int = 10) -> Optional[Failure]:
    """2D tracking failure: IoU below threshold in either view (or a missing
    prediction on a valid frame) for ``streak`` consecutive assessable frames."""
    return find_failure_streak(_bad_flags_2d(outcomes, threshold), streak)


def evaluate_anchor_2d(run: AnchorRun, labels: Sequence[FrameLabel],
                       threshold: float = 0.1, streak: int = 10,
                       combine: str = "mean") -> AnchorResult2D:
    """Accuracy, 2D error and 2D robustness for one anchor sub-sequence."""
    outcomes = classify_frames_2d(run, labels, combine)
    failure = detect_failure_2d(outcomes, threshold, streak)
    window_end = failure.streak_start if failure else len(outcomes)

    acc_sum = 0.0
    err_sum = 0.0
    n = 0
    for out in outcomes[:window_end]:
        if out.status is FrameStatus.VALID:
            acc_sum += out.combined_iou
            err_sum += out.centre_dist_px
            n += 1

    success_end = failure.index + 1 if failure else len(outcomes)
    n_success = 0
    for out in outcomes[:success_end]:
        if out.status is FrameStatus.VALID and min(out.iou_left, out.iou_right) > threshold:
            n_success += 1

    # denominator = valid-gt frames after the anchor + excess-prediction frames
    n_valid_gt = sum(1 for out in outcomes if labels[out.frame_index].is_valid)
    n_excess = sum(1 for out in outcomes if out.status is FrameStatus.EXCESS_PREDICTION)
    denominator = n_valid_gt + n_excess

    return AnchorResult2D(
        accuracy=acc_sum / n if n else None,
        error_px=err_sum / n if n else None,
        robustness=n_success / denominator if denominator else None,
        n=n,
        n_success=n_success,
        denominator=denominator,
        failure_frame=outcomes[failure.index].frame_index if failure else None,
        streak_start=failure.streak_start if failure else None,
    )


def accuracy(run: AnchorRun, labels: Sequence[FrameLabel], **kwargs) -> Optional[float]:
    return evaluate_anchor_2d(run, labels, **kwargs).accuracy


def error_2d(run: AnchorRun, labels: Sequence[FrameLabel], **kwargs) -> Optional[float]:
    return evaluate_anchor_2d(run, labels, **kwargs).error_px


def robustness_2d(run: AnchorRun, labels: Sequence[FrameLabel], **kwargs) -> Optional[float]:
    return evaluate_anchor_2d(run, labels, **kwargs).robustness
