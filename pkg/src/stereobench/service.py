"""HTTP JSON API for the stereo labelling workflow.

Clicks arrive as left/right keypoints; the right v coordinate is snapped to
the left one (epipolar enforcement), the pair is triangulated and the box
pair is derived by sphere projection before being persisted atomically.
Writes are serialized per video through a revision counter; the service
holds no truth that is not recoverable from the persisted files.

Frames not yet annotated are stored with ``is_visible_in_both_stereo`` set
to false so that partially-labelled videos remain loadable.
"""

from __future__ import annotations

import json
import os
import threading
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.responses import FileResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import dataset as ds
from .errors import DatasetError
from .geometry import reproject, sphere_to_bbox
from .model import EvalConfig, FrameLabel, Keypoint2D, StereoBBox


class KeypointsBody(BaseModel):
    kl: tuple[float, float]
    kr: tuple[float, float]
    revision: int
    annotator: Optional[str] = None


class FlagsBody(BaseModel):
    is_difficult: bool
    is_visible_in_both_stereo: bool
    revision: int
    annotator: Optional[str] = None


class ReviewBody(BaseModel):
    annotator: str
    revision: int


def _bbox_json(bbox: StereoBBox) -> dict:
    return {
        "left": [bbox.left.u_min, bbox.left.v_min, bbox.left.u_max, bbox.left.v_max],
        "right": [bbox.right.u_min, bbox.right.v_min,
                  bbox.right.u_max, bbox.right.v_max],
    }


class _VideoState:
    def __init__(self, directory: Path, epipolar_tol: float):
        self.directory = directory
        self.calibration = ds.load_calibration(directory / ds.CALIBRATION_FILE)
        self.labels = list(self._load_labels(epipolar_tol))
        self.revision = 0
        self.lock = threading.Lock()

    def _load_labels(self, epipolar_tol: float):
        path = self.directory / ds.LABELS_FILE
        if path.is_file():
            return ds.load_labels(path, epipolar_tol)
        count = len(list((self.directory / "frames_left").glob("*.png")))
        if count == 0:
            raise DatasetError(f"{self.directory}: no labels and no frames")
        return tuple(FrameLabel(frame_index=i, is_visible_in_both_stereo=False)
                     for i in range(count))

    @property
    def frame_count(self) -> int:
        return len(self.labels)

    def persist(self) -> None:
        path = self.directory / ds.LABELS_FILE
        tmp = path.with_suffix(".json.tmp")
        with open(tmp, "w") as fh:
            json.dump([ds.label_to_json(lb) for lb in self.labels], fh, indent=1)
        os.replace(tmp, path)


def create_app(dataset_root: Path, config: Optional[EvalConfig] = None,
               frontend_dir: Optional[Path] = None) -> FastAPI:
    config = config or EvalConfig()
    root = Path(dataset_root)
    app = FastAPI(title="stereo annotation service")

    videos: dict[str, _VideoState] = {}
    case_of: dict[str, str] = {}
    for case_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        for video_dir in sorted(p for p in case_dir.iterdir() if p.is_dir()):
            if not (video_dir / ds.CALIBRATION_FILE).is_file():
                continue
            videos[video_dir.name] = _VideoState(video_dir, config.epipolar_tol_px)
            case_of[video_dir.name] = case_dir.name

    def _video(video_id: str) -> _VideoState:
        state = videos.get(video_id)
        if state is None:
            raise HTTPException(404, f"unknown video {video_id}")
        return state

    def _frame(state: _VideoState, index: int) -> FrameLabel:
        if not 0 <= index < state.frame_count:
            raise HTTPException(404, f"frame {index} out of range")
        return state.labels[index]

    def _check_revision(state: _VideoState, revision: int) -> None:
        if revision != state.revision:
            raise HTTPException(
                409, f"stale revision {revision}, current is {state.revision}")

    @app.get("/api/videos")
    def list_videos():
        return [
            {"id": vid, "case": case_of[vid], "frame_count": state.frame_count,
             "revision": state.revision,
             "width": state.calibration.image_width,
             "height": state.calibration.image_height}
            for vid, state in videos.items()
        ]

    @app.get("/api/videos/{video_id}/frames/{index}")
    def get_frame(video_id: str, index: int):
        state = _video(video_id)
        label = _frame(state, index)
        return {
            "video": video_id,
            "frame": index,
            "frame_count": state.frame_count,
            "revision": state.revision,
            "label": ds.label_to_json(label),
        }

    @app.get("/api/videos/{video_id}/frames/{index}/image/{view}")
    def get_image(video_id: str, index: int, view: str):
        state = _video(video_id)
        _frame(state, index)
        if view not in ("left", "right"):
            raise HTTPException(404, "view must be 'left' or 'right'")
        path = state.directory / f"frames_{view}" / f"{index:06d}.png"
        if not path.is_file():
            raise HTTPException(404, f"no image for frame {index}")
        headers = {
            "Cache-Control": "max-age=86400",
            "ETag": f'"{video_id}-{index}-{view}"',
        }
        return FileResponse(path, media_type="image/png", headers=headers)

    @app.get("/api/videos/{video_id}/frames/{index}/neighbor")
    def neighbor(video_id: str, index: int, step: int = 1):
        state = _video(video_id)
        _frame(state, index)
        return {"frame": max(0, min(state.frame_count - 1, index + step))}

    @app.put("/api/videos/{video_id}/frames/{index}/keypoints")
    def put_keypoints(video_id: str, index: int, body: KeypointsBody):
        state = _video(video_id)
        label = _frame(state, index)
        with state.lock:
            _check_revision(state, body.revision)
            kl = Keypoint2D(*body.kl)
            # snap the right click onto the left click's epipolar line
            kr = Keypoint2D(body.kr[0], kl.v)
            d = kl.u - kr.u
            if d <= 0:
                raise HTTPException(
                    422, f"disparity must be positive, got {d:.3f} px")
            point = reproject(kl, d, state.calibration)
            bbox = sphere_to_bbox(point, config.sphere_radius_mm, state.calibration)
            state.labels[index] = FrameLabel(
                frame_index=index,
                keypoint_left=kl,
                keypoint_right=kr,
                bbox=bbox,
                is_difficult=label.is_difficult,
                is_visible_in_both_stereo=True,
            )
            state.revision += 1
            state.persist()
            return {
                "video": video_id,
                "frame": index,
                "revision": state.revision,
                "keypoint_left": [kl.u, kl.v],
                "keypoint_right": [kr.u, kr.v],
                "bbox": _bbox_json(bbox),
            }

    @app.put("/api/videos/{video_id}/frames/{index}/flags")
    def put_flags(video_id: str, index: int, body: FlagsBody):
        state = _video(video_id)
        label = _frame(state, index)
        with state.lock:
            _check_revision(state, body.revision)
            makes_valid = body.is_visible_in_both_stereo and not body.is_difficult
            if makes_valid and (label.keypoint_left is None or label.bbox is None):
                raise HTTPException(
                    422, "cannot mark an unannotated frame as valid; "
                         "place keypoints first")
            state.labels[index] = FrameLabel(
                frame_index=index,
                keypoint_left=label.keypoint_left,
                keypoint_right=label.keypoint_right,
                bbox=label.bbox,
                is_difficult=body.is_difficult,
                is_visible_in_both_stereo=body.is_visible_in_both_stereo,
            )
            state.revision += 1
            state.persist()
            return {"video": video_id, "frame": index, "revision": state.revision,
                    "label": ds.label_to_json(state.labels[index])}

    @app.get("/api/videos/{video_id}/review-diff")
    def review_diff(video_id: str, threshold: float = 5.0):
        state = _video(video_id)
        flagged = []
        prev: Optional[FrameLabel] = None
        for label in state.labels:
            if label.keypoint_left is None:
                continue
            if prev is not None:
                du = label.keypoint_left.u - prev.keypoint_left.u
                dv = label.keypoint_left.v - prev.keypoint_left.v
                displacement = (du * du + dv * dv) ** 0.5
                if displacement > threshold:
                    flagged.append({"frame": label.frame_index,
                                    "displacement_px": displacement})
            prev = label
        return {"video": video_id, "threshold": threshold, "frames": flagged}

    @app.put("/api/videos/{video_id}/review")
    def sign_off(video_id: str, body: ReviewBody):
        state = _video(video_id)
        with state.lock:
            _check_revision(state, body.revision)
            path = state.directory / "review.json"
            tmp = path.with_suffix(".json.tmp")
            with open(tmp, "w") as fh:
                json.dump({"reviewer": body.annotator,
                           "revision": state.revision}, fh)
            os.replace(tmp, path)
            return {"video": video_id, "reviewer": body.annotator,
                    "revision": state.revision}

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=frontend_dir, html=True),
                  name="frontend")

    return app
