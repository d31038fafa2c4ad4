"""Descriptive per-video statistics: velocities, ignore fraction and the
anchor-template NCC score."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from PIL import Image

from .errors import NoValidFrames
from .geometry import disparity, reproject
from .matching import zncc_score
from .model import BBox, VideoRecord
from .trackers import load_grayscale


@dataclass(frozen=True)
class VideoStats:
    video_id: str
    avg_2d_velocity_px: Optional[float]
    avg_3d_velocity_mm: Optional[float]
    pct_ignore: float
    avg_ncc: Optional[float]


def _patch(image: np.ndarray, box: BBox) -> Optional[np.ndarray]:
    h, w = image.shape
    r0, r1 = int(round(box.v_min)), int(round(box.v_max))
    c0, c1 = int(round(box.u_min)), int(round(box.u_max))
    if r0 < 0 or c0 < 0 or r1 > h or c1 > w or r1 - r0 < 2 or c1 - c0 < 2:
        return None
    return image[r0:r1, c0:c1]


def _resample(patch: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    if patch.shape == shape:
        return patch
    img = Image.fromarray(patch.astype(np.float32), mode="F")
    resized = img.resize((shape[1], shape[0]), Image.BILINEAR)
    return np.asarray(resized, dtype=np.float64)


def _avg_ncc(video: VideoRecord) -> Optional[float]:
    if video.frame_source is None:
        return None
    anchor_means = []
    for anchor in video.anchors:
        label = video.label(anchor)
        if label.bbox is None:
            continue
        template = _patch(load_grayscale(video.frame_paths(anchor)[0]), label.bbox.left)
        if template is None:
            continue
        scores = []
        for frame in range(anchor + 1, video.frame_count):
            lb = video.label(frame)
            if not lb.is_valid or lb.bbox is None:
                continue
            patch = _patch(load_grayscale(video.frame_paths(frame)[0]), lb.bbox.left)
            if patch is None:
                continue
            scores.append(zncc_score(_resample(patch, template.shape), template))
        if scores:
            anchor_means.append(sum(scores) / len(scores))
    if not anchor_means:
        return None
    return sum(anchor_means) / len(anchor_means)


def dataset_stats(video: VideoRecord, with_ncc: bool = True) -> VideoStats:
    """Average 2D/3D keypoint velocity, ignore percentage and NCC score."""
    valid = [lb for lb in video.labels if lb.is_valid]
    if not valid:
        raise NoValidFrames(f"video {video.id} has no valid frames")

    steps_2d = []
    steps_3d = []
    for prev, cur in zip(video.labels, video.labels[1:]):
        if not (prev.is_valid and cur.is_valid):
            continue
        if prev.keypoint_left is None or cur.keypoint_left is None:
            continue
        steps_2d.append(math.hypot(cur.keypoint_left.u - prev.keypoint_left.u,
                                   cur.keypoint_left.v - prev.keypoint_left.v))
        p_prev = reproject(prev.keypoint_left,
                           disparity(prev.keypoint_left, prev.keypoint_right),
                           video.calibration)
        p_cur = reproject(cur.keypoint_left,
                          disparity(cur.keypoint_left, cur.keypoint_right),
                          video.calibration)
        steps_3d.append(math.sqrt((p_cur.x_mm - p_prev.x_mm) ** 2
                                  + (p_cur.y_mm - p_prev.y_mm) ** 2
                                  + (p_cur.z_mm - p_prev.z_mm) ** 2))

    n_invalid = sum(1 for lb in video.labels if not lb.is_valid)
    return VideoStats(
        video_id=video.id,
        avg_2d_velocity_px=sum(steps_2d) / len(steps_2d) if steps_2d else None,
        avg_3d_velocity_mm=sum(steps_3d) / len(steps_3d) if steps_3d else None,
        pct_ignore=100.0 * n_invalid / video.frame_count,
        avg_ncc=_avg_ncc(video) if with_ncc else None,
    )
