"""In-process trackers: scoring oracles (perfect/null/static) and the NCC
template-matching baseline with disparity-driven scale correction."""

from __future__ import annotations

from pathlib import Path
from typing import Optional

import numpy as np
from PIL import Image

from .errors import TemplateOutOfBounds
from .matching import zncc_map
from .model import BBox, EvalConfig, StereoBBox, VideoRecord


def load_grayscale(path: Path) -> np.ndarray:
    """Read an image file as float64 grayscale (integer luma, deterministic)."""
    with Image.open(path) as img:
        return np.asarray(img.convert("L"), dtype=np.float64)


class Tracker:
    """Per-video tracker driven by the harness.

    ``start_video`` is called once per video, ``init`` once per anchor and
    ``step`` once per subsequent frame, in order.
    """

    name = "tracker"

    def start_video(self, video: VideoRecord) -> None:
        self.video = video

    def init(self, anchor_frame: int) -> None:
        raise NotImplementedError

    def step(self, frame_index: int) -> Optional[StereoBBox]:
        raise NotImplementedError

    def close(self) -> None:
        pass


class PerfectTracker(Tracker):
    """Echoes the ground truth; answers "no target" on invisible frames."""

    name = "perfect"

    def init(self, anchor_frame: int) -> None:
        pass

    def step(self, frame_index: int) -> Optional[StereoBBox]:
        label = self.video.label(frame_index)
        if label.is_visible_in_both_stereo and label.bbox is not None:
            return label.bbox
        return None


class NullTracker(Tracker):
    """Never predicts."""

    name = "null"

    def init(self, anchor_frame: int) -> None:
        pass

    def step(self, frame_index: int) -> Optional[StereoBBox]:
        return None


class StaticTracker(Tracker):
    """Repeats the anchor bounding box until the end of the video."""

    name = "static"

    def init(self, anchor_frame: int) -> None:
        self._bbox = self.video.label(anchor_frame).bbox

    def step(self, frame_index: int) -> Optional[StereoBBox]:
        return self._bbox


class NccTracker(Tracker):
    """Template matching with the anchor's box as template, searched around
    the previous position; box size follows the disparity ratio to the anchor."""

    name = "ncc"

    def __init__(self, search_radius_px: int = 32, occlusion_threshold: float = 0.4):
        self.search_radius = search_radius_px
        self.occlusion_threshold = occlusion_threshold

    def _frames(self, frame_index: int) -> tuple[np.ndarray, np.ndarray]:
        left_path, right_path = self.video.frame_paths(frame_index)
        return load_grayscale(left_path), load_grayscale(right_path)

    def init(self, anchor_frame: int) -> None:
        label = self.video.label(anchor_frame)
        if label.bbox is None:
            raise TemplateOutOfBounds(f"anchor frame {anchor_frame} has no bbox")
        self._templates = []
        self._centres = []
        self._sizes = []
        for image, box in zip(self._frames(anchor_frame),
                              (label.bbox.left, label.bbox.right)):
            r0, r1 = int(round(box.v_min)), int(round(box.v_max))
            c0, c1 = int(round(box.u_min)), int(round(box.u_max))
            h, w = image.shape
            if r0 < 0 or c0 < 0 or r1 > h or c1 > w or r1 - r0 < 2 or c1 - c0 < 2:
                raise TemplateOutOfBounds(
                    f"anchor bbox {box} outside {w}x{h} image")
            self._templates.append(image[r0:r1, c0:c1].copy())
            self._centres.append(((c0 + c1) / 2, (r0 + r1) / 2))
            self._sizes.append((box.width, box.height))
        self._anchor_disparity = label.bbox.centre_disparity
        self._scale = 1.0

    def _match(self, image: np.ndarray, template: np.ndarray,
               centre: tuple[float, float]) -> Optional[tuple[tuple[float, float], float]]:
        th, tw = template.shape
        h, w = image.shape
        x0 = int(round(centre[0] - tw / 2)) - self.search_radius
        y0 = int(round(centre[1] - th / 2)) - self.search_radius
        x1 = x0 + tw + 2 * self.search_radius
        y1 = y0 + th + 2 * self.search_radius
        x0, y0 = max(0, x0), max(0, y0)
        x1, y1 = min(w, x1), min(h, y1)
        if x1 - x0 < tw or y1 - y0 < th:
            return None
        corr = zncc_map(image[y0:y1, x0:x1], template)
        flat = int(np.argmax(corr))
        py, px = divmod(flat, corr.shape[1])
        peak = float(corr[py, px])
        new_centre = (x0 + px + tw / 2, y0 + py + th / 2)
        return new_centre, peak

    def step(self, frame_index: int) -> Optional[StereoBBox]:
        images = self._frames(frame_index)
        matches = []
        for view in range(2):
            match = self._match(images[view], self._templates[view], self._centres[view])
            if match is None:
                return None
            matches.append(match)
        if min(peak for _, peak in matches) < self.occlusion_threshold:
            return None
        self._centres = [centre for centre, _ in matches]
        d_current = self._centres[0][0] - self._centres[1][0]
        if d_current > 0:
            self._scale = d_current / self._anchor_disparity
        boxes = []
        for (cu, cv), (bw, bh) in zip(self._centres, self._sizes):
            hw, hh = bw * self._scale / 2, bh * self._scale / 2
            boxes.append(BBox(cu - hw, cv - hh, cu + hw, cv + hh))
        return StereoBBox(left=boxes[0], right=boxes[1])


BUILTIN_TRACKERS = {
    "perfect": lambda config: PerfectTracker(),
    "null": lambda config: NullTracker(),
    "static": lambda config: StaticTracker(),
    "ncc": lambda config: NccTracker(config.search_radius_px,
                                     config.ncc_occlusion_threshold),
}


def create_builtin(name: str, config: EvalConfig) -> Tracker:
    try:
        factory = BUILTIN_TRACKERS[name]
    except KeyError:
        raise ValueError(f"unknown builtin tracker {name!r}; "
                         f"available: {sorted(BUILTIN_TRACKERS)}") from None
    return factory(config)
