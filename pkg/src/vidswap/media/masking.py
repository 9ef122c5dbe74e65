"""Foreground/background splitting and compositing.

The face region is the convex hull of the 68 landmarks, dilated by a
fraction of the crop width and feathered with a linear ramp. The crop is
the landmark bounding square grown by a configurable factor, clamped to
the frame and resampled to the working resolution.
"""

from __future__ import annotations

from dataclasses import dataclass

import cv2
import numpy as np

from ..errors import GeometryError, ShapeError
from .landmarks import LandmarkTrack
from .video_io import FrameSequence

CROP_EXPAND = 1.8
DILATE_FRAC = 0.02
FEATHER_FRAC = 0.05


@dataclass
class FgBgPair:
    """Masked face foreground, face-zeroed background, and crop geometry.

    foreground/background are at the working resolution; mask is the soft
    feathered mask in [0, 1]; hard_mask is its interior (mask == 1 region,
    the dilated hull); crop_box rows are (x0, y0, side) in source pixels.
    """

    foreground: FrameSequence
    background: FrameSequence
    mask: np.ndarray       # (N, H, W) float32 in [0, 1]
    hard_mask: np.ndarray  # (N, H, W) uint8 in {0, 1}
    crop_box: np.ndarray   # (N, 3) int

    def __len__(self) -> int:
        return len(self.foreground)

    @property
    def resolution(self) -> int:
        return self.foreground.height


def _square_crop(points: np.ndarray, frame_h: int, frame_w: int, expand: float) -> tuple[int, int, int]:
    x0, y0 = points.min(axis=0)
    x1, y1 = points.max(axis=0)
    side = max(x1 - x0, y1 - y0) * expand
    side = int(round(min(side, frame_h, frame_w)))
    side = max(side, 2)
    cx, cy = (x0 + x1) / 2.0, (y0 + y1) / 2.0
    left = int(round(cx - side / 2.0))
    top = int(round(cy - side / 2.0))
    left = int(np.clip(left, 0, frame_w - side))
    top = int(np.clip(top, 0, frame_h - side))
    return left, top, side


def _hull_masks(points_crop: np.ndarray, res: int) -> tuple[np.ndarray, np.ndarray]:
    """Soft feathered mask and binary hard mask from crop-space landmarks."""
    hull = cv2.convexHull(points_crop.astype(np.float32))
    if hull is None or len(hull) < 3:
        raise GeometryError("degenerate landmark hull (collinear points)")
    area = cv2.contourArea(hull)
    if area < 1.0:
        raise GeometryError(f"landmark hull has near-zero area ({area:.3f} px^2)")
    hull_mask = np.zeros((res, res), dtype=np.uint8)
    cv2.fillPoly(hull_mask, [np.round(hull).astype(np.int32)], 1)
    dilate_px = max(1, int(round(DILATE_FRAC * res)))
    kernel = cv2.getStructuringElement(cv2.MORPH_ELLIPSE, (2 * dilate_px + 1, 2 * dilate_px + 1))
    hard = cv2.dilate(hull_mask, kernel)
    feather_px = max(1, int(round(FEATHER_FRAC * res)))
    # distance from outside the hard region, ramped linearly over the band
    dist = cv2.distanceTransform(1 - hard, cv2.DIST_L2, 3)
    soft = np.clip(1.0 - dist / feather_px, 0.0, 1.0).astype(np.float32)
    soft[hard > 0] = 1.0
    return soft, hard


def landmarks_in_crop(lms: LandmarkTrack, crop_box: np.ndarray, res: int) -> LandmarkTrack:
    """Map frame-space landmarks into crop pixel coordinates."""
    pts = lms.points.copy()
    for i in range(len(pts)):
        x0, y0, side = crop_box[i]
        pts[i] = (pts[i] - (x0, y0)) * (res / side)
    return LandmarkTrack(points=pts, confidence=lms.confidence.copy())


def extract_fg_bg(video: FrameSequence, lms: LandmarkTrack, resolution: int = 256,
                  expand: float = CROP_EXPAND) -> FgBgPair:
    """Split each frame into masked face foreground and face-zeroed background."""
    if len(video) != len(lms):
        raise ShapeError(f"landmark track ({len(lms)}) not aligned to video ({len(video)})")
    n = len(video)
    fg = np.zeros((n, resolution, resolution, 3), dtype=np.uint8)
    bg = np.zeros_like(fg)
    masks = np.zeros((n, resolution, resolution), dtype=np.float32)
    hards = np.zeros((n, resolution, resolution), dtype=np.uint8)
    boxes = np.zeros((n, 3), dtype=np.int64)
    for i in range(n):
        x0, y0, side = _square_crop(lms.points[i], video.height, video.width, expand)
        boxes[i] = (x0, y0, side)
        crop = video.frames[i, y0:y0 + side, x0:x0 + side]
        crop = cv2.resize(crop, (resolution, resolution), interpolation=cv2.INTER_LINEAR)
        pts = (lms.points[i] - (x0, y0)) * (resolution / side)
        soft, hard = _hull_masks(pts, resolution)
        fg[i] = np.clip(np.rint(crop.astype(np.float32) * soft[..., None]), 0, 255).astype(np.uint8)
        bg[i] = crop * (1 - hard)[..., None]
        masks[i] = soft
        hards[i] = hard
    return FgBgPair(
        foreground=FrameSequence(fg, video.fps),
        background=FrameSequence(bg, video.fps),
        mask=masks,
        hard_mask=hards,
        crop_box=boxes,
    )


def composite(generated: FrameSequence, target_full: FrameSequence, pair: FgBgPair) -> FrameSequence:
    """Alpha-blend generated crops back into the target frames.

    Pixels outside each frame's crop box are bit-identical to the target.
    """
    if len(generated) != len(pair) or len(generated) != len(target_full):
        raise ShapeError(
            f"lengths differ: generated {len(generated)}, pair {len(pair)}, target {len(target_full)}"
        )
    res = pair.resolution
    if generated.height != res or generated.width != res:
        raise ShapeError(f"generated frames are {generated.height}x{generated.width}, expected {res}x{res}")
    out = target_full.frames.copy()
    for i in range(len(generated)):
        x0, y0, side = pair.crop_box[i]
        gen = cv2.resize(generated.frames[i], (side, side), interpolation=cv2.INTER_LINEAR)
        alpha = cv2.resize(pair.mask[i], (side, side), interpolation=cv2.INTER_LINEAR)[..., None]
        region = out[i, y0:y0 + side, x0:x0 + side].astype(np.float32)
        blended = gen.astype(np.float32) * alpha + region * (1.0 - alpha)
        out[i, y0:y0 + side, x0:x0 + side] = np.clip(np.rint(blended), 0, 255).astype(np.uint8)
    return FrameSequence(out, target_full.fps)
