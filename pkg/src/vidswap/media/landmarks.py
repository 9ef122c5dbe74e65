"""Facial landmark detection, gap interpolation and on-disk caches.

Backends are pluggable. The default `geometric` backend is a classical
hue/blob/moment detector for the package's built-in face family: it finds
the skin-hue component, fits an ellipse via image moments, locates the
eyes (dark blobs) and mouth (lip-hue blob), and inverts the canonical
face template from those measurements.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Protocol

import cv2
import numpy as np

from .. import facegeom as fg
from ..errors import DetectionGapError, NoFaceError, ShapeError
from .video_io import FrameSequence, content_hash


@dataclass
class LandmarkTrack:
    """Per-frame 68-point landmarks in frame pixel coordinates."""

    points: np.ndarray      # (N, 68, 2) float
    confidence: np.ndarray  # (N,) in [0, 1]

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64)
        self.confidence = np.asarray(self.confidence, dtype=np.float64)
        if self.points.ndim != 3 or self.points.shape[1:] != (68, 2):
            raise ShapeError(f"landmark points must be (N, 68, 2), got {self.points.shape}")
        if self.confidence.shape != (self.points.shape[0],):
            raise ShapeError("confidence must have one value per frame")

    def __len__(self) -> int:
        return len(self.points)

    def transformed(self, fn: Callable[[np.ndarray], np.ndarray]) -> "LandmarkTrack":
        pts = np.stack([fn(p) for p in self.points])
        return LandmarkTrack(points=pts, confidence=self.confidence.copy())


class LandmarkBackend(Protocol):
    name: str

    def detect(self, frame: np.ndarray) -> Optional[tuple[np.ndarray, float]]:
        """Return ((68, 2) points, confidence) or None if no face found."""


class GeometricBackend:
    """Classical detector for the built-in synthetic face family."""

    name = "geometric"

    def __init__(self, min_face_frac: float = 0.02):
        self.min_face_frac = min_face_frac

    def detect(self, frame: np.ndarray):
        h, w = frame.shape[:2]
        hsv = cv2.cvtColor(frame.astype(np.float32) / 255.0, cv2.COLOR_RGB2HSV)
        hue, sat, val = hsv[..., 0], hsv[..., 1], hsv[..., 2]

        skin = (
            (hue >= fg.SKIN_HUE[0]) & (hue <= fg.SKIN_HUE[1])
            & (sat >= fg.SKIN_SAT[0]) & (sat <= fg.SKIN_SAT[1])
            & (val >= fg.SKIN_VAL_MIN)
        ).astype(np.uint8)
        n_labels, labels, stats, _ = cv2.connectedComponentsWithStats(skin, connectivity=8)
        if n_labels < 2:
            return None
        best = 1 + int(np.argmax(stats[1:, cv2.CC_STAT_AREA]))
        if stats[best, cv2.CC_STAT_AREA] < self.min_face_frac * h * w:
            return None
        face = (labels == best).astype(np.uint8)
        face = self._fill_holes(face)

        center, cov = self._moments(face)
        if cov is None:
            return None
        evals, evecs = np.linalg.eigh(cov)  # ascending
        a_mask = 2.0 * float(np.sqrt(max(evals[0], 1e-6)))
        b_mask = 2.0 * float(np.sqrt(max(evals[1], 1e-6)))
        major = evecs[:, 1]
        if major[1] < 0:  # prefer screen-down so an upright face reads upright
            major = -major

        interior = cv2.erode(face, np.ones((3, 3), np.uint8), iterations=max(1, int(0.015 * min(h, w))))
        dark = ((val <= fg.DARK_VAL_MAX) & (interior > 0)).astype(np.uint8)
        lip = (
            (hue >= fg.LIP_HUE[0]) & (hue <= fg.LIP_HUE[1])
            & (sat >= fg.LIP_SAT_MIN) & (interior > 0)
        ).astype(np.uint8)

        mouth = self._largest_blob(lip, min_area=max(6, int(0.0015 * a_mask * b_mask)))
        eyes = self._eye_pair(dark, center, a_mask, b_mask, mouth)

        if eyes is None:
            # ellipse-only fallback: assume the face is roughly upright
            roll = float(np.arctan2(major[1], major[0]) - np.pi / 2.0)
            roll = (roll + np.pi) % (2 * np.pi) - np.pi
            pts = fg.face_template(a_mask, b_mask, 0.0)
            return fg.local_to_image(pts, center, 1.0, roll), 0.3

        eye_a, eye_b = eyes
        down0 = major if mouth is None else self._unit(mouth[0] - 0.5 * (eye_a + eye_b))
        u0 = np.array([down0[1], -down0[0]])
        if np.dot(eye_b - eye_a, u0) < 0:
            eye_a, eye_b = eye_b, eye_a
        ab = eye_b - eye_a
        roll = float(np.arctan2(ab[1], ab[0]))
        a_est = float(np.linalg.norm(ab)) / (2.0 * fg.EYE_U)
        b_est = b_mask

        v_dir = np.array([-np.sin(roll), np.cos(roll)])
        mouth_open = 0.0
        conf = 0.6
        if mouth is not None:
            conf = 1.0
            mouth_open = self._openness(lip, mouth[1], v_dir, b_est)

        pts = fg.face_template(a_est, b_est, mouth_open)
        img_pts = fg.local_to_image(pts, center, 1.0, roll)
        # snap eye and mouth groups onto measured feature centers
        for group, target in ((slice(36, 42), eye_a), (slice(42, 48), eye_b)):
            img_pts[group] += target - img_pts[group].mean(axis=0)
        if mouth is not None:
            img_pts[48:68] += mouth[0] - img_pts[48:60].mean(axis=0)
        return img_pts, conf

    @staticmethod
    def _unit(v):
        n = float(np.linalg.norm(v))
        return v / n if n > 0 else np.array([0.0, 1.0])

    @staticmethod
    def _fill_holes(mask: np.ndarray) -> np.ndarray:
        padded = np.pad(mask, 1, mode="constant")
        flood = padded.copy()
        ff_mask = np.zeros((flood.shape[0] + 2, flood.shape[1] + 2), np.uint8)
        cv2.floodFill(flood, ff_mask, (0, 0), 1)
        holes = (flood == 0) & (padded == 0)
        return (padded | holes.astype(np.uint8))[1:-1, 1:-1]

    @staticmethod
    def _moments(mask: np.ndarray):
        m = cv2.moments(mask, binaryImage=True)
        if m["m00"] < 1:
            return None, None
        cx, cy = m["m10"] / m["m00"], m["m01"] / m["m00"]
        cov = np.array([[m["mu20"], m["mu11"]], [m["mu11"], m["mu02"]]]) / m["m00"]
        return np.array([cx, cy]), cov

    @staticmethod
    def _largest_blob(mask: np.ndarray, min_area: int):
        n, labels, stats, centroids = cv2.connectedComponentsWithStats(mask, connectivity=8)
        if n < 2:
            return None
        best = 1 + int(np.argmax(stats[1:, cv2.CC_STAT_AREA]))
        if stats[best, cv2.CC_STAT_AREA] < min_area:
            return None
        return centroids[best], labels == best

    def _eye_pair(self, dark: np.ndarray, center, a_mask, b_mask, mouth):
        n, labels, stats, centroids = cv2.connectedComponentsWithStats(dark, connectivity=8)
        face_area = np.pi * a_mask * b_mask
        cands = []
        for i in range(1, n):
            area = stats[i, cv2.CC_STAT_AREA]
            if area < max(3, 0.001 * face_area) or area > 0.12 * face_area:
                continue
            c = centroids[i]
            if mouth is not None and np.dot(c - center, mouth[0] - center) > 0:
                continue  # on the mouth side: not an eye
            cands.append((area, c))
        if len(cands) < 2:
            return None
        cands.sort(key=lambda t: -t[0])
        cands = cands[:6]
        best, best_score = None, np.inf
        for i in range(len(cands)):
            for j in range(i + 1, len(cands)):
                (a1, c1), (a2, c2) = cands[i], cands[j]
                sep = np.linalg.norm(c1 - c2)
                if not (0.45 * a_mask <= sep <= 1.6 * a_mask):
                    continue
                ratio = max(a1, a2) / max(min(a1, a2), 1)
                score = abs(sep - 2 * fg.EYE_U * a_mask) / a_mask + 0.5 * (ratio - 1.0)
                if score < best_score:
                    best_score, best = score, (c1, c2)
        return best

    @staticmethod
    def _openness(lip: np.ndarray, blob_mask: np.ndarray, v_dir: np.ndarray, b: float) -> float:
        ys, xs = np.nonzero(blob_mask)
        if len(xs) == 0 or b <= 0:
            return 0.0
        proj = xs * v_dir[0] + ys * v_dir[1]
        half = 0.5 * (proj.max() - proj.min())
        return float(np.clip((half / b - fg.MOUTH_RY0) / (0.5 * fg.MOUTH_RY_OPEN), 0.0, 1.0))


_BACKENDS: dict[str, Callable[[], LandmarkBackend]] = {"geometric": GeometricBackend}


def register_backend(name: str, factory: Callable[[], LandmarkBackend]) -> None:
    _BACKENDS[name] = factory


def get_backend(name: str = "geometric") -> LandmarkBackend:
    try:
        return _BACKENDS[name]()
    except KeyError:
        raise NoFaceError(f"unknown landmark backend: {name!r} (have {sorted(_BACKENDS)})") from None


def detect_landmarks(video: FrameSequence, backend: LandmarkBackend | None = None, max_gap: int = 5) -> LandmarkTrack:
    """Detect 68-point landmarks on every frame.

    Frames where detection fails are filled by linear interpolation from the
    nearest detected neighbors when the gap is at most `max_gap` frames;
    longer gaps raise DetectionGapError with the offending frame indices.
    """
    if backend is None:
        backend = get_backend()
    n = len(video)
    points = np.zeros((n, 68, 2), dtype=np.float64)
    conf = np.zeros(n, dtype=np.float64)
    detected = np.zeros(n, dtype=bool)
    for i, frame in enumerate(video.frames):
        result = backend.detect(frame)
        if result is not None:
            points[i], conf[i] = result
            detected[i] = True
    if not detected.any():
        raise NoFaceError(f"no face detected in any of {n} frames (backend {backend.name!r})")

    missing = np.nonzero(~detected)[0]
    if missing.size:
        gaps = np.split(missing, np.nonzero(np.diff(missing) > 1)[0] + 1)
        for gap in gaps:
            if len(gap) > max_gap:
                raise DetectionGapError(
                    f"detection failed on {len(gap)} consecutive frames (> {max_gap}): {gap.tolist()}",
                    frame_indices=gap.tolist(),
                )
            lo, hi = int(gap[0]) - 1, int(gap[-1]) + 1
            for idx in gap:
                if lo < 0:
                    points[idx], conf[idx] = points[hi], 0.5 * conf[hi]
                elif hi >= n:
                    points[idx], conf[idx] = points[lo], 0.5 * conf[lo]
                else:
                    w = (idx - lo) / (hi - lo)
                    points[idx] = (1 - w) * points[lo] + w * points[hi]
                    conf[idx] = 0.5 * ((1 - w) * conf[lo] + w * conf[hi])
    return LandmarkTrack(points=points, confidence=conf)


def cache_path(cache_dir, video_path) -> Path:
    return Path(cache_dir) / f"{content_hash(video_path)}.npz"


def save_track(path, track: LandmarkTrack) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savez(path, points=track.points.astype(np.float32), confidence=track.confidence.astype(np.float32))


def load_track(path) -> LandmarkTrack:
    data = np.load(path)
    return LandmarkTrack(points=data["points"].astype(np.float64), confidence=data["confidence"].astype(np.float64))
