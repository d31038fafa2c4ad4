"""Run trackers over every anchor of every video and score the results.

External trackers are separate processes speaking line-delimited JSON over
stdin/stdout; frames are passed by file path. A crash or per-frame timeout
is not fatal: the remainder of the affected run is recorded as "no target"
and the process is relaunched for the next anchor.
"""

from __future__ import annotations

import json
import selectors
import shlex
import subprocess
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .eao import EaoWindow, anchor_sequence, eao, eao_window, merge_sequences
from .errors import EmptyWindow, NoValidFrames, ProtocolViolation
from .metrics2d import classify_frames_2d, evaluate_anchor_2d
from .metrics3d import evaluate_anchor_3d
from .model import (
    AnchorRun,
    BBox,
    EvalConfig,
    FrameLabel,
    FramePrediction,
    StereoBBox,
    SubsetRecord,
    VideoRecord,
)
from .results import (
    AnchorScores,
    CaseScores,
    MetricsReport,
    ScoreSet,
    VideoScores,
)
from .trackers import Tracker, create_builtin


@dataclass(frozen=True)
class TrackerHandle:
    """Parsed tracker specification: ``builtin:<name>`` or ``exec:<command>``."""

    kind: str  # "builtin" | "external"
    spec: str

    @classmethod
    def parse(cls, text: str) -> "TrackerHandle":
        if text.startswith("builtin:"):
            return cls("builtin", text.split(":", 1)[1])
        if text.startswith("exec:"):
            return cls("external", text.split(":", 1)[1])
        raise ValueError(f"tracker must be 'builtin:<name>' or 'exec:<command>', got {text!r}")

    @property
    def name(self) -> str:
        return self.spec if self.kind == "builtin" else Path(shlex.split(self.spec)[0]).name


def generate_anchors(labels: Sequence[FrameLabel], spacing: int = 50,
                     min_frames_after: int = 10) -> tuple[int, ...]:
    """Anchor frames: the first valid frame, then the first valid frame at
    least ``spacing`` frames later, skipping anchors too close to the end."""
    if spacing < 1:
        raise ValueError("spacing must be >= 1")
    valid = [label.frame_index for label in labels if label.is_valid]
    if not valid:
        raise NoValidFrames("video has no valid frames")
    limit = len(labels) - 1 - min_frames_after
    anchors = []
    target = valid[0]
    for frame in valid:
        if frame >= target and frame <= limit:
            anchors.append(frame)
            target = frame + spacing
    if not anchors:
        raise NoValidFrames("no valid frame is far enough from the video end")
    return tuple(anchors)


class ExternalTracker(Tracker):
    """Adapter driving an external tracker process over the wire protocol."""

    def __init__(self, command: str, timeout_s: float = 30.0):
        self.command = command
        self.timeout_s = timeout_s
        self.name = TrackerHandle("external", command).name
        self._proc: Optional[subprocess.Popen] = None
        self._crashed = False

    def _ensure_proc(self) -> None:
        if self._proc is not None and self._proc.poll() is None:
            return
        self._proc = subprocess.Popen(
            shlex.split(self.command),
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            bufsize=1,
        )
        self._crashed = False

    def _send(self, message: dict) -> None:
        assert self._proc is not None and self._proc.stdin is not None
        self._proc.stdin.write(json.dumps(message) + "\n")
        self._proc.stdin.flush()

    def _recv(self) -> Optional[dict]:
        """Read one response line; None signals crash/timeout/EOF."""
        assert self._proc is not None and self._proc.stdout is not None
        sel = selectors.DefaultSelector()
        sel.register(self._proc.stdout, selectors.EVENT_READ)
        ready = sel.select(self.timeout_s)
        sel.close()
        if not ready:
            return None
        line = self._proc.stdout.readline()
        if not line:
            return None
        try:
            message = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ProtocolViolation(f"tracker sent invalid JSON: {line!r}") from exc
        if not isinstance(message, dict) or "type" not in message:
            raise ProtocolViolation(f"tracker sent malformed message: {message!r}")
        return message

    def _mark_crashed(self) -> None:
        self._crashed = True
        if self._proc is not None and self._proc.poll() is None:
            self._proc.kill()
            self._proc.wait()

    def init(self, anchor_frame: int) -> None:
        label = self.video.label(anchor_frame)
        assert label.bbox is not None
        left_path, right_path = self.video.frame_paths(anchor_frame)
        self._ensure_proc()
        try:
            self._send({
                "type": "init",
                "left_frame": str(left_path),
                "right_frame": str(right_path),
                "bbox_left": [label.bbox.left.u_min, label.bbox.left.v_min,
                              label.bbox.left.u_max, label.bbox.left.v_max],
                "bbox_right": [label.bbox.right.u_min, label.bbox.right.v_min,
                               label.bbox.right.u_max, label.bbox.right.v_max],
            })
            reply = self._recv()
        except BrokenPipeError:
            reply = None
        if reply is None:
            self._mark_crashed()
            return
        if reply.get("type") != "ready":
            raise ProtocolViolation(f"expected 'ready' after init, got {reply!r}")

    def step(self, frame_index: int) -> Optional[StereoBBox]:
        if self._crashed:
            return None
        left_path, right_path = self.video.frame_paths(frame_index)
        try:
            self._send({"type": "frame", "left_frame": str(left_path),
                        "right_frame": str(right_path)})
            reply = self._recv()
        except BrokenPipeError:
            reply = None
        if reply is None:
            self._mark_crashed()
            return None
        if reply.get("type") == "none":
            return None
        if reply.get("type") == "bbox":
            try:
                left = BBox(*map(float, reply["left"]))
                right = BBox(*map(float, reply["right"]))
            except (KeyError, TypeError, ValueError) as exc:
                raise ProtocolViolation(f"bad bbox message: {reply!r}") from exc
            return StereoBBox(left, right)
        raise ProtocolViolation(f"unexpected tracker message: {reply!r}")

    def close(self) -> None:
        if self._proc is not None and self._proc.poll() is None:
            self._proc.stdin.close()
            try:
                self._proc.wait(timeout=2.0)
            except subprocess.TimeoutExpired:
                self._proc.kill()
                self._proc.wait()
        self._proc = None


def create_tracker(handle: TrackerHandle, config: EvalConfig) -> Tracker:
    if handle.kind == "builtin":
        return create_builtin(handle.spec, config)
    return ExternalTracker(handle.spec, config.frame_timeout_s)


def run_anchor(tracker: Tracker, video: VideoRecord, anchor_frame: int) -> AnchorRun:
    tracker.init(anchor_frame)
    predictions = []
    for frame in range(anchor_frame + 1, video.frame_count):
        predictions.append(FramePrediction(frame, tracker.step(frame)))
    return AnchorRun(video.id, anchor_frame, tuple(predictions))


def _video_anchors(video: VideoRecord, config: EvalConfig) -> tuple[int, ...]:
    if video.anchors:
        return video.anchors
    return generate_anchors(video.labels, config.anchor_spacing)


def run_video(video: VideoRecord, handle: TrackerHandle,
              config: EvalConfig) -> list[AnchorRun]:
    """One tracker process/instance per video; anchors run sequentially."""
    tracker = create_tracker(handle, config)
    tracker.start_video(video)
    try:
        return [run_anchor(tracker, video, a) for a in _video_anchors(video, config)]
    finally:
        tracker.close()


def _run_video_task(args) -> list[AnchorRun]:
    video, handle, config = args
    return run_video(video, handle, config)


def run_dataset(dataset: SubsetRecord, handle: TrackerHandle, config: EvalConfig,
                jobs: int = 1) -> list[AnchorRun]:
    videos = dataset.videos
    if jobs > 1 and len(videos) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_video = list(pool.map(_run_video_task,
                                      [(v, handle, config) for v in videos]))
    else:
        per_video = [run_video(v, handle, config) for v in videos]
    return [run for runs in per_video for run in runs]


def _window_or_fallback(video_lengths: Sequence[int]) -> EaoWindow:
    if len(video_lengths) >= 2:
        return eao_window(video_lengths)
    length = video_lengths[0]
    return EaoWindow(max(1, length - 1), max(2, length))


def _sequence_eao(seq, window: EaoWindow, literal: bool) -> Optional[float]:
    try:
        return eao(seq, window, literal)
    except EmptyWindow:
        return None


def score_runs(dataset: SubsetRecord, runs: Sequence[AnchorRun], config: EvalConfig,
               tracker_name: str = "tracker") -> MetricsReport:
    """Score persisted or freshly-collected anchor runs into a full report."""
    by_video: dict[str, list[AnchorRun]] = {}
    for run in runs:
        by_video.setdefault(run.video_id, []).append(run)

    case_of = {v.id: c.id for c in dataset.cases for v in c.videos}
    videos_by_id = {v.id: v for v in dataset.videos}
    unknown = set(by_video) - set(videos_by_id)
    if unknown:
        raise ValueError(f"runs reference unknown videos: {sorted(unknown)}")

    anchor_rows: list[AnchorScores] = []
    video_rows: list[VideoScores] = []
    for video in dataset.videos:
        video_runs = sorted(by_video.get(video.id, []), key=lambda r: r.anchor_frame)
        if not video_runs:
            continue
        rows = []
        for run in video_runs:
            r2d = evaluate_anchor_2d(run, video.labels, config.iou_fail_threshold,
                                     config.fail_streak, config.stereo_iou_combine)
            r3d = evaluate_anchor_3d(run, video.labels, video.calibration,
                                     config.err3d_fail_mm, config.fail_streak)
            outcomes = classify_frames_2d(run, video.labels, config.stereo_iou_combine)
            seq = anchor_sequence(outcomes, r2d.streak_start)
            rows.append(AnchorScores(
                video_id=video.id, case_id=case_of[video.id],
                anchor_frame=run.anchor_frame,
                scores=ScoreSet.from_anchor(r2d, r3d),
                result_2d=r2d, result_3d=r3d, sequence=seq, eao=None))
        anchor_rows.extend(rows)
        video_rows.append(VideoScores(
            video_id=video.id, case_id=case_of[video.id],
            scores=ScoreSet.aggregate([r.scores for r in rows]),
            sequence=merge_sequences([r.sequence for r in rows]),
            eao=None))

    if not video_rows:
        raise ValueError("no runs to score")

    window = _window_or_fallback([len(v.sequence) for v in video_rows])
    literal = config.eao_literal_denominator

    case_rows = []
    for case in dataset.cases:
        members = [v for v in video_rows if v.case_id == case.id]
        if not members:
            continue
        case_seq = merge_sequences([v.sequence for v in members])
        case_rows.append(CaseScores(
            case_id=case.id,
            scores=ScoreSet.aggregate([v.scores for v in members]),
            sequence=case_seq,
            eao=_sequence_eao(case_seq, window, literal)))

    subset_seq = merge_sequences([v.sequence for v in video_rows])
    subset_eao = eao(subset_seq, window, literal)

    anchor_rows = [AnchorScores(a.video_id, a.case_id, a.anchor_frame, a.scores,
                                a.result_2d, a.result_3d, a.sequence,
                                _sequence_eao(a.sequence, window, literal))
                   for a in anchor_rows]
    video_rows = [VideoScores(v.video_id, v.case_id, v.scores, v.sequence,
                              _sequence_eao(v.sequence, window, literal))
                  for v in video_rows]

    return MetricsReport(
        tracker=tracker_name,
        subset_id=dataset.id,
        config=config,
        window=window,
        scores=ScoreSet.aggregate([c.scores for c in case_rows]),
        eao=subset_eao,
        subset_sequence=subset_seq,
        cases=tuple(case_rows),
        videos=tuple(video_rows),
        anchors=tuple(anchor_rows),
    )


def evaluate(dataset: SubsetRecord, tracker: str | TrackerHandle,
             config: Optional[EvalConfig] = None, jobs: int = 1,
             ) -> tuple[MetricsReport, list[AnchorRun]]:
    """Run a tracker over every anchor of every video and score it."""
    if isinstance(tracker, str):
        tracker = TrackerHandle.parse(tracker)
    if config is None:
        config = EvalConfig()
    runs = run_dataset(dataset, tracker, config, jobs)
    report = score_runs(dataset, runs, config, tracker.name)
    return report, runs
