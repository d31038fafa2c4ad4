"""Score containers and the anchor -> video -> case -> subset aggregation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .eao import EaoWindow, ScoreSequence, weighted_average
from .errors import AllZeroWeights
from .metrics2d import AnchorResult2D
from .metrics3d import AnchorResult3D
from .model import EvalConfig

METRIC_NAMES = ("acc_2d", "err_2d", "rob_2d", "err_3d", "rob_3d")


@dataclass(frozen=True)
class Weighted:
    """A metric value plus the frame count that weights it upward."""

    value: Optional[float]
    weight: float


@dataclass(frozen=True)
class ScoreSet:
    acc_2d: Weighted
    err_2d: Weighted
    rob_2d: Weighted
    err_3d: Weighted
    rob_3d: Weighted

    @classmethod
    def from_anchor(cls, r2d: AnchorResult2D, r3d: AnchorResult3D) -> "ScoreSet":
        return cls(
            acc_2d=Weighted(r2d.accuracy, r2d.n),
            err_2d=Weighted(r2d.error_px, r2d.n),
            rob_2d=Weighted(r2d.robustness, r2d.denominator),
            err_3d=Weighted(r3d.error_mm, r3d.n),
            rob_3d=Weighted(r3d.robustness, r3d.denominator),
        )

    @classmethod
    def aggregate(cls, children: Sequence["ScoreSet"]) -> "ScoreSet":
        fields = {}
        for name in METRIC_NAMES:
            entries = [getattr(child, name) for child in children]
            values = [e.value for e in entries]
            weights = [e.weight for e in entries]
            try:
                value = weighted_average(values, weights)
            except AllZeroWeights:
                value = None
            fields[name] = Weighted(value, sum(w for v, w in zip(values, weights)
                                               if v is not None))
        return cls(**fields)


def weighted_std(values: Sequence[Optional[float]],
                 weights: Sequence[float]) -> Optional[float]:
    """Population std of the defined values under frame-count weights."""
    pairs = [(v, w) for v, w in zip(values, weights) if v is not None and w > 0]
    if not pairs:
        return None
    total_w = sum(w for _, w in pairs)
    mean = sum(v * w for v, w in pairs) / total_w
    var = sum(w * (v - mean) ** 2 for v, w in pairs) / total_w
    return math.sqrt(var)


@dataclass(frozen=True)
class AnchorScores:
    video_id: str
    case_id: str
    anchor_frame: int
    scores: ScoreSet
    result_2d: AnchorResult2D
    result_3d: AnchorResult3D
    sequence: ScoreSequence
    eao: Optional[float]


@dataclass(frozen=True)
class VideoScores:
    video_id: str
    case_id: str
    scores: ScoreSet
    sequence: ScoreSequence
    eao: Optional[float]


@dataclass(frozen=True)
class CaseScores:
    case_id: str
    scores: ScoreSet
    sequence: ScoreSequence
    eao: Optional[float]


@dataclass(frozen=True)
class MetricsReport:
    """Full evaluation result for one tracker on one subset."""

    tracker: str
    subset_id: str
    config: EvalConfig
    window: EaoWindow
    scores: ScoreSet
    eao: float
    subset_sequence: ScoreSequence
    cases: tuple[CaseScores, ...]
    videos: tuple[VideoScores, ...]
    anchors: tuple[AnchorScores, ...]

    def err_std(self, metric: str, case_id: Optional[str] = None) -> Optional[float]:
        """Std across per-anchor mean errors, frame-weighted (presentation only)."""
        anchors = [a for a in self.anchors if case_id is None or a.case_id == case_id]
        entries = [getattr(a.scores, metric) for a in anchors]
        return weighted_std([e.value for e in entries], [e.weight for e in entries])
