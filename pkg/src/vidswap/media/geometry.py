"""Similarity-transform fitting and frame warping."""

from __future__ import annotations

import math
from dataclasses import dataclass

import cv2
import numpy as np

from ..errors import GeometryError, LengthError, ShapeError
from .video_io import FrameSequence


@dataclass
class AffineParams:
    """Rotation (radians) + uniform scale + translation (pixels)."""

    rotation: float
    scale: float
    translation: tuple[float, float]

    def matrix(self) -> np.ndarray:
        """2x3 matrix mapping source points to target points (row-vector [x, y, 1])."""
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        m = self.scale
        dx, dy = self.translation
        return np.array([[m * c, -m * s, dx], [m * s, m * c, dy]], dtype=np.float64)

    def apply(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=np.float64)
        mat = self.matrix()
        return pts @ mat[:, :2].T + mat[:, 2]

    def inverse(self) -> "AffineParams":
        if self.scale <= 0:
            raise GeometryError(f"cannot invert scale {self.scale}")
        inv_scale = 1.0 / self.scale
        c, s = math.cos(-self.rotation), math.sin(-self.rotation)
        dx, dy = self.translation
        return AffineParams(
            rotation=-self.rotation,
            scale=inv_scale,
            translation=(-inv_scale * (c * dx - s * dy), -inv_scale * (s * dx + c * dy)),
        )


def fit_similarity(src_pts: np.ndarray, tgt_pts: np.ndarray) -> AffineParams:
    """Least-squares similarity transform taking src_pts onto tgt_pts.

    Minimizes mean squared distance over rotation, uniform scale and
    translation. Closed form: with centered point sets X, Y the optimal
    angle is atan2(sum cross(X, Y), sum dot(X, Y)) and the optimal scale
    is the projection magnitude over the source spread.
    """
    src = np.asarray(src_pts, dtype=np.float64)
    tgt = np.asarray(tgt_pts, dtype=np.float64)
    if src.shape != tgt.shape or src.ndim != 2 or src.shape[1] != 2:
        raise ShapeError(f"point sets must both be (N, 2), got {src.shape} and {tgt.shape}")
    src_mean = src.mean(axis=0)
    tgt_mean = tgt.mean(axis=0)
    x = src - src_mean
    y = tgt - tgt_mean
    spread = float((x * x).sum())
    if spread < 1e-12:
        raise GeometryError("source points have zero variance; similarity fit is degenerate")
    a = float((x * y).sum())
    b = float((x[:, 0] * y[:, 1] - x[:, 1] * y[:, 0]).sum())
    rotation = math.atan2(b, a)
    scale = math.hypot(a, b) / spread
    if scale <= 0:
        raise GeometryError("degenerate fit: target points have zero spread")
    c, s = math.cos(rotation), math.sin(rotation)
    rotated_mean = np.array([c * src_mean[0] - s * src_mean[1], s * src_mean[0] + c * src_mean[1]])
    translation = tgt_mean - scale * rotated_mean
    return AffineParams(rotation=rotation, scale=scale, translation=(float(translation[0]), float(translation[1])))


def warp_frame(frame: np.ndarray, params: AffineParams, out_shape=None) -> np.ndarray:
    """Warp one frame by a similarity transform with bilinear sampling, zero fill."""
    h, w = frame.shape[:2]
    if out_shape is not None:
        h, w = out_shape
    return cv2.warpAffine(
        frame,
        params.matrix().astype(np.float64),
        (w, h),
        flags=cv2.INTER_LINEAR,
        borderMode=cv2.BORDER_CONSTANT,
        borderValue=0,
    )


def align_source_to_target(f_src: FrameSequence, lm_src, lm_tgt) -> FrameSequence:
    """Warp each source frame onto the target pose via per-frame landmark fits."""
    if len(f_src) != len(lm_src.points) or len(lm_src.points) != len(lm_tgt.points):
        raise LengthError(
            f"frame counts differ: video {len(f_src)}, source landmarks "
            f"{len(lm_src.points)}, target landmarks {len(lm_tgt.points)}"
        )
    out = np.empty_like(f_src.frames)
    for i in range(len(f_src)):
        params = fit_similarity(lm_src.points[i], lm_tgt.points[i])
        out[i] = warp_frame(f_src.frames[i], params)
    return FrameSequence(out, f_src.fps)
