"""Anchor IoU sequences, anchor/video/subset merging, the expected average
overlap score and the frame-weighted aggregation used by every scalar metric.

A score sequence is a list of per-frame entries where ``None`` marks an
ignored frame (invalid ground truth) and floats in [0, 1] are IoU scores.
Sequences are anchor-relative: position 0 is the first frame after the
anchor the sequence belongs to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import AllZeroWeights, EmptyInput, EmptyWindow, TooFewVideos
from .metrics2d import FrameOutcome2D, FrameStatus

ScoreSequence = list[Optional[float]]


@dataclass(frozen=True)
class EaoWindow:
    n_min: int  # 1-based frame offset, inclusive
    n_max: int

    def __post_init__(self) -> None:
        if not (1 <= self.n_min < self.n_max):
            raise ValueError(f"window must satisfy 1 <= n_min < n_max, got {self}")


def anchor_sequence(outcomes: Sequence[FrameOutcome2D],
                    streak_start: Optional[int]) -> ScoreSequence:
    """Per-frame IoU sequence for one anchor sub-sequence.

    Invalid-ground-truth frames are ignored entries; every entry from the
    start of the fatal failure streak onward is forced to 0, including frames
    that would otherwise be ignored.
    """
    seq: ScoreSequence = []
    for i, out in enumerate(outcomes):
        if streak_start is not None and i >= streak_start:
            seq.append(0.0)
        elif out.status is FrameStatus.VALID:
            seq.append(out.combined_iou)
        elif out.status is FrameStatus.NO_PREDICTION:
            seq.append(0.0)
        else:
            seq.append(None)
    return seq


def merge_sequences(seqs: Sequence[ScoreSequence]) -> ScoreSequence:
    """Frame-wise mean over the non-ignored entries of the input sequences.

    Output length is the longest input; shorter sequences simply do not
    contribute beyond their end. A position is ignored in the output only
    when every contributing sequence ignores it. Used unchanged for both the
    anchor->video and video->subset merges.
    """
    if not seqs:
        raise EmptyInput("cannot merge zero sequences")
    length = max(len(s) for s in seqs)
    merged: ScoreSequence = []
    for i in range(length):
        total = 0.0
        count = 0
        for seq in seqs:
            if i < len(seq) and seq[i] is not None:
                total += seq[i]
                count += 1
        merged.append(total / count if count else None)
    return merged


def eao_window(video_lengths: Sequence[int]) -> EaoWindow:
    """Scoring window from the mean video-sequence length +- one population
    standard deviation, rounded to the nearest frame."""
    if len(video_lengths) < 2:
        raise TooFewVideos("the window needs at least two video lengths")
    mean = sum(video_lengths) / len(video_lengths)
    var = sum((x - mean) ** 2 for x in video_lengths) / len(video_lengths)
    std = math.sqrt(var)
    n_min = max(1, round(mean - std))
    n_max = round(mean + std)
    if n_max <= n_min:
        # zero-spread lengths give a degenerate window; widen to two frames
        n_max = max(2, n_max)
        n_min = max(1, n_max - 1)
    return EaoWindow(n_min, n_max)


def eao(subset_seq: ScoreSequence, window: EaoWindow,
        literal_denominator: bool = False) -> float:
    """Mean of the non-ignored window entries of the merged subset sequence.

    Positions past the end of the sequence contribute 0. With
    ``literal_denominator`` the sum is divided by (n_max - n_min) regardless
    of how many entries were ignored.
    """
    total = 0.0
    count = 0
    for pos in range(window.n_min, window.n_max + 1):
        entry = subset_seq[pos - 1] if pos <= len(subset_seq) else 0.0
        if entry is None:
            continue
        total += entry
        count += 1
    if literal_denominator:
        return total / (window.n_max - window.n_min)
    if count == 0:
        raise EmptyWindow("every window entry is ignored")
    return total / count


def weighted_average(values: Sequence[Optional[float]],
                     weights: Sequence[float]) -> float:
    """Frame-count weighted mean; undefined (None) values carry weight 0."""
    if len(values) != len(weights):
        raise ValueError("values and weights must have equal length")
    total = 0.0
    weight_sum = 0.0
    for value, weight in zip(values, weights):
        if weight < 0:
            raise ValueError("weights must be non-negative")
        if value is None or weight == 0:
            continue
        total += value * weight
        weight_sum += weight
    if weight_sum == 0:
        raise AllZeroWeights("no defined value with positive weight")
    return total / weight_sum
