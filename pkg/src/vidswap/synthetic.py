"""Synthetic talking-head clips with ground-truth landmarks.

Used by the test suite, the demo corpus and anywhere a deterministic,
fully-offline stand-in for real footage is needed. Colors stay inside the
bands in facegeom so the default landmark backend can track the faces even
after corruption.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import cv2
import numpy as np

from . import facegeom as fg
from .media.landmarks import LandmarkTrack
from .media.video_io import FrameSequence

_SHIFT = 4  # subpixel bits for cv2 drawing
_S = 1 << _SHIFT


def _hsv_to_rgb(h: float, s: float, v: float) -> tuple[int, int, int]:
    px = np.array([[[h, s, v]]], dtype=np.float32)
    rgb = cv2.cvtColor(px, cv2.COLOR_HSV2RGB)[0, 0]
    return tuple(int(round(float(c) * 255)) for c in rgb)


@dataclass
class FaceIdentity:
    """Appearance parameters for one synthetic person."""

    skin_rgb: tuple[int, int, int]
    lip_rgb: tuple[int, int, int]
    eye_rgb: tuple[int, int, int]
    brow_rgb: tuple[int, int, int]
    nose_rgb: tuple[int, int, int]
    mouth_dark_rgb: tuple[int, int, int]
    face_a: float  # horizontal semi-axis as fraction of frame size
    face_b: float
    bg_top: tuple[int, int, int]
    bg_bottom: tuple[int, int, int]
    bg_prop: tuple[int, int, int]


def make_identity(seed: int) -> FaceIdentity:
    rng = np.random.default_rng(seed)
    skin_h = rng.uniform(18.0, 34.0)
    skin = _hsv_to_rgb(skin_h, rng.uniform(0.38, 0.55), rng.uniform(0.68, 0.8))
    lip = _hsv_to_rgb(rng.uniform(322.0, 338.0), rng.uniform(0.55, 0.7), rng.uniform(0.5, 0.62))
    eye = _hsv_to_rgb(rng.uniform(0.0, 360.0), rng.uniform(0.2, 0.5), rng.uniform(0.08, 0.16))
    brow = _hsv_to_rgb(skin_h, rng.uniform(0.5, 0.6), rng.uniform(0.5, 0.56))
    nose = _hsv_to_rgb(skin_h, rng.uniform(0.45, 0.55), rng.uniform(0.58, 0.64))
    mouth_dark = _hsv_to_rgb(330.0, 0.5, 0.14)
    bg_h = rng.uniform(*fg.BACKGROUND_HUE)
    bg_h2 = rng.uniform(*fg.BACKGROUND_HUE)
    return FaceIdentity(
        skin_rgb=skin,
        lip_rgb=lip,
        eye_rgb=eye,
        brow_rgb=brow,
        nose_rgb=nose,
        mouth_dark_rgb=mouth_dark,
        face_a=rng.uniform(0.20, 0.24),
        face_b=rng.uniform(0.28, 0.33),
        bg_top=_hsv_to_rgb(bg_h, rng.uniform(0.3, 0.6), rng.uniform(0.35, 0.6)),
        bg_bottom=_hsv_to_rgb(bg_h, rng.uniform(0.2, 0.5), rng.uniform(0.15, 0.35)),
        bg_prop=_hsv_to_rgb(bg_h2, rng.uniform(0.4, 0.7), rng.uniform(0.4, 0.7)),
    )


@dataclass
class FacePose:
    center: tuple[float, float]
    scale: float = 1.0
    roll: float = 0.0
    mouth_open: float = 0.0
    eye_open: float = 1.0


def _ipt(p) -> tuple[int, int]:
    return int(round(p[0] * _S)), int(round(p[1] * _S))


def _iax(a, b) -> tuple[int, int]:
    return max(int(round(a * _S)), 1), max(int(round(b * _S)), 1)


def render_face(identity: FaceIdentity, pose: FacePose, size: int, background: np.ndarray | None = None):
    """Render one frame. Returns (image uint8 RGB, true landmarks (68, 2))."""
    if background is None:
        img = np.zeros((size, size, 3), dtype=np.uint8)
    else:
        img = background.copy()
    a = identity.face_a * size * pose.scale
    b = identity.face_b * size * pose.scale
    cx, cy = pose.center
    deg = float(np.degrees(pose.roll))

    def to_img(local_pts):
        return fg.local_to_image(local_pts, (cx, cy), 1.0, pose.roll)

    cv2.ellipse(img, _ipt((cx, cy)), _iax(a, b), deg, 0, 360, identity.skin_rgb, -1, cv2.LINE_AA, _SHIFT)

    for side in (-1.0, 1.0):
        us = side * fg.EYE_U * a + np.linspace(-fg.BROW_HALF_U, fg.BROW_HALF_U, 5) * a
        arch = fg.BROW_ARCH * b * np.array([0.0, 0.7, 1.0, 0.7, 0.0])
        pts = to_img(np.stack([us, fg.BROW_V * b - arch], axis=1))
        cv2.polylines(
            img, [np.round(pts * _S).astype(np.int32)], False, identity.brow_rgb,
            max(int(0.03 * b), 1), cv2.LINE_AA, _SHIFT,
        )

    nose = to_img(np.array([[0.0, fg.NOSE_TOP_V * b], [0.0, fg.NOSE_TIP_V * b],
                            [-fg.NOSE_ROW_U * a, fg.NOSE_ROW_V * b], [fg.NOSE_ROW_U * a, fg.NOSE_ROW_V * b]]))
    thickness = max(int(0.025 * b), 1)
    cv2.line(img, _ipt(nose[0]), _ipt(nose[1]), identity.nose_rgb, thickness, cv2.LINE_AA, _SHIFT)
    cv2.line(img, _ipt(nose[2]), _ipt(nose[3]), identity.nose_rgb, thickness, cv2.LINE_AA, _SHIFT)

    ry_eye = fg.EYE_RY * b * max(pose.eye_open, 0.05)
    for side in (-1.0, 1.0):
        c_eye = to_img(np.array([[side * fg.EYE_U * a, fg.EYE_V * b]]))[0]
        cv2.ellipse(img, _ipt(c_eye), _iax(fg.EYE_RX * a, ry_eye), deg, 0, 360,
                    identity.eye_rgb, -1, cv2.LINE_AA, _SHIFT)

    c_mouth = to_img(np.array([[0.0, fg.MOUTH_V * b]]))[0]
    cv2.ellipse(img, _ipt(c_mouth), _iax(fg.MOUTH_RX * a, fg.mouth_outer_ry(b, pose.mouth_open)),
                deg, 0, 360, identity.lip_rgb, -1, cv2.LINE_AA, _SHIFT)
    if pose.mouth_open > 0.05:
        cv2.ellipse(img, _ipt(c_mouth), _iax(fg.INNER_RX * a, fg.mouth_inner_ry(b, pose.mouth_open)),
                    deg, 0, 360, identity.mouth_dark_rgb, -1, cv2.LINE_AA, _SHIFT)

    landmarks = to_img(fg.face_template(a, b, pose.mouth_open, pose.eye_open))
    return img, landmarks


def _make_background(identity: FaceIdentity, size: int, t: float) -> np.ndarray:
    ramp = np.linspace(0.0, 1.0, size, dtype=np.float32)[:, None, None]
    top = np.array(identity.bg_top, dtype=np.float32)
    bottom = np.array(identity.bg_bottom, dtype=np.float32)
    img = (top * (1 - ramp) + bottom * ramp).astype(np.float32)
    img = np.broadcast_to(img, (size, size, 3)).copy()
    # a drifting prop gives the background its own motion
    px = size * (0.15 + 0.1 * np.sin(2 * np.pi * t))
    py = size * 0.2
    cv2.circle(img, _ipt((px, py)), int(0.06 * size * _S), identity.bg_prop, -1, cv2.LINE_AA, _SHIFT)
    return np.clip(img, 0, 255).astype(np.uint8)


def make_clip(
    identity: FaceIdentity,
    n_frames: int,
    size: int = 256,
    seed: int = 0,
    fps: float = 25.0,
    motion: float = 1.0,
) -> tuple[FrameSequence, LandmarkTrack]:
    """A talking-head clip: slow head drift/roll plus a mouth cycle.

    motion scales the head movement amplitude; ground-truth landmarks are
    returned alongside the frames.
    """
    rng = np.random.default_rng(seed)
    phase = rng.uniform(0, 2 * np.pi, size=4)
    period = rng.uniform(12.0, 20.0)
    frames = np.empty((n_frames, size, size, 3), dtype=np.uint8)
    points = np.empty((n_frames, 68, 2), dtype=np.float64)
    for i in range(n_frames):
        t = i / period
        pose = FacePose(
            center=(
                size * (0.5 + motion * 0.03 * np.sin(2 * np.pi * t + phase[0])),
                size * (0.5 + motion * 0.025 * np.sin(2 * np.pi * t * 0.7 + phase[1])),
            ),
            scale=1.0 + motion * 0.03 * np.sin(2 * np.pi * t * 0.5 + phase[2]),
            roll=motion * np.deg2rad(4.0) * np.sin(2 * np.pi * t * 0.8 + phase[3]),
            mouth_open=0.5 + 0.5 * np.sin(2 * np.pi * i / 6.0 + phase[1]),
            eye_open=1.0,
        )
        bg = _make_background(identity, size, i / max(n_frames, 1))
        frames[i], points[i] = render_face(identity, pose, size, bg)
    track = LandmarkTrack(points=points, confidence=np.ones(n_frames))
    return FrameSequence(frames, fps), track


def make_corpus(out_dir, n_clips: int = 5, n_frames: int = 16, size: int = 64, seed: int = 0) -> list:
    """Write a small corpus of synthetic clips as image-sequence directories."""
    from pathlib import Path

    from .media.video_io import write_video

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for k in range(n_clips):
        clip, _ = make_clip(make_identity(seed + k), n_frames, size=size, seed=seed * 1000 + k)
        path = out_dir / f"clip_{k:02d}"
        write_video(clip, path)
        paths.append(path)
    return paths
