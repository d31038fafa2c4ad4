"""Stereo geometry: disparity, triangulation, pinhole projection and the
virtual-sphere bounding-box construction used to size ground-truth boxes."""

from __future__ import annotations

import math

from .errors import BehindCamera, CameraInsideSphere, NonPositiveDisparity
from .model import BBox, Keypoint2D, Point3D, StereoBBox, StereoCalibration

LEFT = "left"
RIGHT = "right"


def disparity(left: Keypoint2D, right: Keypoint2D) -> float:
    """Horizontal offset u_left - u_right of a rectified correspondence."""
    return left.u - right.u


def reproject(kpt_left: Keypoint2D, d: float, calib: StereoCalibration) -> Point3D:
    """Triangulate a left-view pixel with disparity ``d`` into left-camera mm."""
    if d <= 0:
        raise NonPositiveDisparity(f"disparity must be positive, got {d}")
    b = calib.baseline_mm
    return Point3D(
        x_mm=(kpt_left.u - calib.cx_px) * b / d,
        y_mm=(kpt_left.v - calib.cy_px) * b / d,
        z_mm=calib.focal_px * b / d,
    )


def project(p: Point3D, calib: StereoCalibration, view: str = LEFT) -> Keypoint2D:
    """Project a 3D point into the requested rectified view."""
    if p.z_mm <= 0:
        raise BehindCamera(f"point has non-positive depth {p.z_mm}")
    x = p.x_mm - calib.baseline_mm if view == RIGHT else p.x_mm
    return Keypoint2D(
        u=calib.focal_px * x / p.z_mm + calib.cx_px,
        v=calib.focal_px * p.y_mm / p.z_mm + calib.cy_px,
    )


def epipolar_consistent(kl: Keypoint2D, kr: Keypoint2D, tol: float = 1.0) -> bool:
    """Whether a stereo correspondence lies on the same (horizontal) row."""
    return abs(kl.v - kr.v) <= tol


def _tangent_extremes(offset: float, z: float, r: float) -> tuple[float, float]:
    """Normalized-coordinate extremes of the sphere silhouette along one axis.

    A line x = e in normalized coordinates is tangent to the sphere when
    |offset - e*z| = r*sqrt(1 + e^2); solving the resulting quadratic
    e^2*(z^2 - r^2) - 2*e*offset*z + offset^2 - r^2 = 0 gives both tangents.
    """
    denom = z * z - r * r
    root = r * math.sqrt(offset * offset + denom)
    lo = (offset * z - root) / denom
    hi = (offset * z + root) / denom
    return lo, hi


def sphere_to_bbox(centre: Point3D, radius_mm: float, calib: StereoCalibration) -> StereoBBox:
    """Axis-aligned boxes enclosing the projected silhouette of a sphere.

    The silhouette of a sphere fully in front of a pinhole camera is an
    ellipse; its axis-aligned tangent lines are found in closed form, so no
    sampling is involved. Boxes are not clipped to the image bounds. The two
    views share v extents exactly (the vertical tangent planes do not depend
    on the horizontal camera offset).
    """
    norm = math.sqrt(centre.x_mm**2 + centre.y_mm**2 + centre.z_mm**2)
    norm_right = math.sqrt(
        (centre.x_mm - calib.baseline_mm) ** 2 + centre.y_mm**2 + centre.z_mm**2
    )
    if norm <= radius_mm or norm_right <= radius_mm:
        raise CameraInsideSphere(
            f"camera lies inside the sphere (|centre|={min(norm, norm_right):.3f} mm, "
            f"radius={radius_mm} mm)"
        )
    if centre.z_mm <= radius_mm:
        raise CameraInsideSphere(
            f"sphere must lie fully in front of the camera (z={centre.z_mm} mm, "
            f"radius={radius_mm} mm)"
        )

    f, cx, cy = calib.focal_px, calib.cx_px, calib.cy_px
    y_lo, y_hi = _tangent_extremes(centre.y_mm, centre.z_mm, radius_mm)
    v_min, v_max = f * y_lo + cy, f * y_hi + cy

    boxes = []
    for x_offset in (centre.x_mm, centre.x_mm - calib.baseline_mm):
        x_lo, x_hi = _tangent_extremes(x_offset, centre.z_mm, radius_mm)
        boxes.append(BBox(f * x_lo + cx, v_min, f * x_hi + cx, v_max))
    return StereoBBox(left=boxes[0], right=boxes[1])
