"""Deterministic synthetic stereo sequences with exact ground truth.

Targets follow a parametric 3D path; frames are rendered as a band-limited
procedural texture that translates (and zooms with depth) rigidly with the
target, so tracker behaviour on them is fully predictable. Occlusion windows
paint a flat occluder over the target and flag the frames as not visible.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from PIL import Image

from .dataset import ANCHORS_FILE, CALIBRATION_FILE, LABELS_FILE, label_to_json
from .errors import BehindCamera
from .geometry import LEFT, RIGHT, project, sphere_to_bbox
from .harness import generate_anchors
from .model import (
    CaseRecord,
    FrameLabel,
    Point3D,
    StereoCalibration,
    SubsetRecord,
    VideoRecord,
)

DEFAULT_CALIB = StereoCalibration(
    focal_px=450.0, cx_px=128.0, cy_px=128.0, baseline_mm=5.0,
    image_width=256, image_height=256,
)


@dataclass(frozen=True)
class SceneSpec:
    video_id: str
    seed: int
    frame_count: int
    calib: StereoCalibration = DEFAULT_CALIB
    start_mm: tuple[float, float, float] = (0.0, 0.0, 100.0)
    velocity_mm: tuple[float, float, float] = (0.0, 0.0, 0.0)
    sin_amplitude_mm: tuple[float, float, float] = (0.0, 0.0, 0.0)
    sin_period_frames: float = 120.0
    occlusion_windows: tuple[tuple[int, int], ...] = ()  # [start, end) ranges
    difficult_frames: tuple[int, ...] = ()
    sphere_radius_mm: float = 2.5
    anchor_spacing: int = 50
    texture_waves: int = 10

    def __post_init__(self) -> None:
        if self.frame_count < 1:
            raise ValueError("frame_count must be >= 1")
        for start, end in self.occlusion_windows:
            if not (0 <= start < end <= self.frame_count):
                raise ValueError(f"occlusion window [{start}, {end}) out of range")

    def point_at(self, frame: int) -> Point3D:
        phase = math.sin(2 * math.pi * frame / self.sin_period_frames)
        return Point3D(
            self.start_mm[0] + self.velocity_mm[0] * frame + self.sin_amplitude_mm[0] * phase,
            self.start_mm[1] + self.velocity_mm[1] * frame + self.sin_amplitude_mm[1] * phase,
            self.start_mm[2] + self.velocity_mm[2] * frame + self.sin_amplitude_mm[2] * phase,
        )

    def is_occluded(self, frame: int) -> bool:
        return any(start <= frame < end for start, end in self.occlusion_windows)


class _Texture:
    """Band-limited random wave field, exactly evaluable at any coordinate."""

    def __init__(self, rng: np.random.Generator, waves: int):
        self.freq = np.empty((waves, 2))
        magnitude = rng.uniform(0.02, 0.12, size=waves)
        angle = rng.uniform(0, 2 * math.pi, size=waves)
        self.freq[:, 0] = magnitude * np.cos(angle)
        self.freq[:, 1] = magnitude * np.sin(angle)
        self.phase = rng.uniform(0, 2 * math.pi, size=waves)
        self.amp = rng.uniform(0.5, 1.0, size=waves)

    def sample(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        out = np.zeros_like(x)
        for (fx, fy), phase, amp in zip(self.freq, self.phase, self.amp):
            out += amp * np.sin(2 * math.pi * (fx * x + fy * y) + phase)
        # map the wave sum into a mid-contrast 8-bit range
        span = self.amp.sum()
        return np.clip(128.0 + 96.0 * out / span, 0, 255)


def _fully_in_view(bbox, calib: StereoCalibration) -> bool:
    for box in (bbox.left, bbox.right):
        if box.u_min < 0 or box.v_min < 0:
            return False
        if box.u_max > calib.image_width or box.v_max > calib.image_height:
            return False
    return True


def make_labels(spec: SceneSpec) -> tuple[FrameLabel, ...]:
    """Ground-truth labels for every frame of the scene.

    Frames where the box leaves either view are flagged not visible, the
    same way an annotator would flag an out-of-view target.
    """
    labels = []
    difficult = set(spec.difficult_frames)
    for frame in range(spec.frame_count):
        point = spec.point_at(frame)
        if point.z_mm <= spec.sphere_radius_mm:
            raise BehindCamera(f"trajectory reaches z={point.z_mm} mm at frame {frame}")
        kl = project(point, spec.calib, LEFT)
        kr = project(point, spec.calib, RIGHT)
        bbox = sphere_to_bbox(point, spec.sphere_radius_mm, spec.calib)
        visible = not spec.is_occluded(frame) and _fully_in_view(bbox, spec.calib)
        labels.append(FrameLabel(
            frame_index=frame,
            keypoint_left=kl,
            keypoint_right=kr,
            bbox=bbox,
            is_difficult=frame in difficult,
            is_visible_in_both_stereo=visible,
        ))
    return tuple(labels)


def render_frame(spec: SceneSpec, texture: _Texture, frame: int,
                 view: str) -> np.ndarray:
    calib = spec.calib
    point = spec.point_at(frame)
    kpt = project(point, calib, view)
    zoom = point.z_mm / spec.start_mm[2]
    uu, vv = np.meshgrid(
        np.arange(calib.image_width, dtype=np.float64),
        np.arange(calib.image_height, dtype=np.float64),
    )
    image = texture.sample((uu - kpt.u) * zoom, (vv - kpt.v) * zoom)
    if spec.is_occluded(frame):
        bbox = sphere_to_bbox(point, spec.sphere_radius_mm, calib)
        box = bbox.left if view == LEFT else bbox.right
        pad_u, pad_v = box.width, box.height
        u0 = max(0, int(box.u_min - pad_u))
        u1 = min(calib.image_width, int(box.u_max + pad_u) + 1)
        v0 = max(0, int(box.v_min - pad_v))
        v1 = min(calib.image_height, int(box.v_max + pad_v) + 1)
        image[v0:v1, u0:u1] = 90.0
    return image.astype(np.uint8)


def generate(spec: SceneSpec, out_dir: Optional[Path] = None,
             render: bool = True) -> VideoRecord:
    """Produce the labelled video; optionally write the on-disk layout."""
    labels = make_labels(spec)
    anchors = generate_anchors(labels, spec.anchor_spacing)
    frame_source = None

    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        calib = spec.calib
        with open(out_dir / CALIBRATION_FILE, "w") as fh:
            json.dump({"f": calib.focal_px, "cx": calib.cx_px, "cy": calib.cy_px,
                       "baseline_mm": calib.baseline_mm, "width": calib.image_width,
                       "height": calib.image_height, "fps": 25.0}, fh, indent=1)
        with open(out_dir / LABELS_FILE, "w") as fh:
            json.dump([label_to_json(lb) for lb in labels], fh, indent=1)
        with open(out_dir / ANCHORS_FILE, "w") as fh:
            json.dump(list(anchors), fh)
        if render:
            rng = np.random.default_rng(spec.seed)
            texture = _Texture(rng, spec.texture_waves)
            for view, sub in ((LEFT, "frames_left"), (RIGHT, "frames_right")):
                (out_dir / sub).mkdir(exist_ok=True)
            for frame in range(spec.frame_count):
                for view, sub in ((LEFT, "frames_left"), (RIGHT, "frames_right")):
                    image = render_frame(spec, texture, frame, view)
                    Image.fromarray(image, mode="L").save(
                        out_dir / sub / f"{frame:06d}.png")
            frame_source = out_dir

    return VideoRecord(
        id=spec.video_id,
        frame_count=spec.frame_count,
        calibration=spec.calib,
        labels=labels,
        anchors=anchors,
        frame_rate_hz=25.0,
        frame_source=frame_source,
    )


def default_specs(n_videos: int, seed: int, frame_count_base: int,
                  calib: StereoCalibration = DEFAULT_CALIB) -> list[SceneSpec]:
    """A mixed bag of scenes: translations, depth sweeps, occlusions, flags.

    Total excursions are scaled by the frame count so targets stay inside
    the field of view regardless of video length.
    """
    rng = np.random.default_rng(seed)
    specs = []
    for i in range(n_videos):
        video_id = f"video_{i + 1:02d}"
        video_seed = int(rng.integers(0, 2**31 - 1))
        kind = i % 4
        base_z = float(rng.uniform(90.0, 120.0))
        start = (float(rng.uniform(-4, 4)), float(rng.uniform(-4, 4)), base_z)
        # lengths vary around the requested count so the scoring window
        # (mean +- std of video lengths) is non-degenerate
        frame_count = max(15, int(frame_count_base
                                  + rng.integers(-frame_count_base // 5,
                                                 frame_count_base // 5 + 1)))
        if kind == 0:  # lateral constant velocity at fixed depth
            spec = SceneSpec(video_id, video_seed, frame_count, calib, start,
                             velocity_mm=(25.0 / frame_count,
                                          10.0 / frame_count, 0.0))
        elif kind == 1:  # sinusoidal sweep with an occlusion window
            mid = frame_count // 2
            spec = SceneSpec(video_id, video_seed, frame_count, calib, start,
                             sin_amplitude_mm=(6.0, 3.0, 0.0),
                             sin_period_frames=frame_count / 1.5,
                             occlusion_windows=((mid, mid + max(5, frame_count // 10)),))
        elif kind == 2:  # depth change (scale) plus difficult flags
            spec = SceneSpec(video_id, video_seed, frame_count, calib, start,
                             velocity_mm=(8.0 / frame_count, 0.0,
                                          30.0 / frame_count),
                             difficult_frames=tuple(range(5, frame_count, 37)))
        else:  # slow drift both laterally and in depth
            spec = SceneSpec(video_id, video_seed, frame_count, calib, start,
                             velocity_mm=(-20.0 / frame_count,
                                          8.0 / frame_count,
                                          -10.0 / frame_count),
                             sin_amplitude_mm=(2.0, 1.0, 1.0),
                             sin_period_frames=frame_count / 2.0)
        specs.append(spec)
    return specs


def generate_dataset(out_root: Path, n_videos: int = 4, seed: int = 7,
                     frame_count: int = 200, render: bool = True,
                     videos_per_case: int = 3,
                     calib: StereoCalibration = DEFAULT_CALIB) -> SubsetRecord:
    """Write a complete dataset directory and return the loaded-equivalent record."""
    out_root = Path(out_root)
    specs = default_specs(n_videos, seed, frame_count, calib)
    cases: dict[str, list[VideoRecord]] = {}
    for i, spec in enumerate(specs):
        case_id = f"case_{i // videos_per_case + 1:02d}"
        video_dir = out_root / case_id / spec.video_id
        record = generate(spec, video_dir, render)
        cases.setdefault(case_id, []).append(record)
    return SubsetRecord(
        id=out_root.name,
        cases=tuple(CaseRecord(id=cid, videos=tuple(videos))
                    for cid, videos in sorted(cases.items())),
    )
