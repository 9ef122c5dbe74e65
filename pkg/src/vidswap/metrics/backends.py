"""Deterministic feature backends for the metric suite.

Both backends are pluggable interfaces with documented defaults that need
no external weights: identity embeddings come from masked face-crop patch
statistics, video features from downsampled intensities plus temporal
difference statistics, each under a fixed-seed random projection.
"""

from __future__ import annotations

from typing import Callable, Protocol

import cv2
import numpy as np

from ..errors import MetricError
from ..media.landmarks import LandmarkTrack
from ..media.video_io import FrameSequence

_PROJECTION_SEED = 0x1DF00D


def _projection(in_dim: int, out_dim: int, salt: int) -> np.ndarray:
    rng = np.random.default_rng(_PROJECTION_SEED + salt)
    return rng.standard_normal((in_dim, out_dim)) / np.sqrt(in_dim)


class IdentityBackend(Protocol):
    name: str
    dim: int

    def embed(self, video: FrameSequence, track: LandmarkTrack) -> np.ndarray:
        """Per-frame identity embeddings, shape (N, dim)."""


class PatchIdentityBackend:
    """Face-crop pixels + normalized landmark geometry, randomly projected."""

    name = "patch"

    def __init__(self, dim: int = 128, patch: int = 16):
        self.dim = dim
        self.patch = patch
        in_dim = patch * patch * 3 + 68 * 2
        self._proj = _projection(in_dim, dim, salt=1)

    def embed(self, video: FrameSequence, track: LandmarkTrack) -> np.ndarray:
        if len(video) != len(track):
            raise MetricError(
                f"landmark track ({len(track)}) not aligned to video ({len(video)})"
            )
        out = np.empty((len(video), self.dim), dtype=np.float64)
        for i in range(len(video)):
            pts = track.points[i]
            x0, y0 = pts.min(axis=0)
            x1, y1 = pts.max(axis=0)
            side = max(x1 - x0, y1 - y0) * 1.2
            cx, cy = (x0 + x1) / 2, (y0 + y1) / 2
            h, w = video.height, video.width
            side = min(side, h, w)
            left = int(np.clip(cx - side / 2, 0, w - side))
            top = int(np.clip(cy - side / 2, 0, h - side))
            crop = video.frames[i, top:top + int(side), left:left + int(side)]
            if crop.size == 0:
                raise MetricError(f"empty face crop on frame {i}", frame_indices=[i])
            patch = cv2.resize(crop, (self.patch, self.patch), interpolation=cv2.INTER_AREA)
            centered = pts - pts.mean(axis=0)
            denom = float(np.abs(centered).max())
            geometry = centered / denom if denom > 0 else centered
            feats = np.concatenate([patch.astype(np.float64).ravel() / 255.0, geometry.ravel()])
            vec = feats @ self._proj
            norm = np.linalg.norm(vec)
            out[i] = vec / norm if norm > 0 else vec
        return out


class VideoFeatureBackend(Protocol):
    name: str
    dim: int

    def extract(self, video: FrameSequence) -> np.ndarray:
        """One feature vector per video, shape (dim,)."""


class MotionStatsBackend:
    """Appearance plus temporal-difference statistics, randomly projected.

    The temporal terms make frame-to-frame instability visible to the
    Fréchet distance.
    """

    name = "motion-stats"

    def __init__(self, dim: int = 32, patch: int = 16):
        self.dim = dim
        self.patch = patch
        self._proj = _projection(patch * patch * 3, dim, salt=2)

    def extract(self, video: FrameSequence) -> np.ndarray:
        small = np.stack([
            cv2.resize(f, (self.patch, self.patch), interpolation=cv2.INTER_AREA)
            for f in video.frames
        ]).astype(np.float64) / 255.0
        flat = small.reshape(len(video), -1)
        mean = flat.mean(axis=0)
        std = flat.std(axis=0)
        if len(video) >= 2:
            motion = np.abs(np.diff(flat, axis=0)).mean(axis=0)
        else:
            motion = np.zeros_like(mean)
        return np.concatenate([mean @ self._proj, std @ self._proj, motion @ self._proj])

    @property
    def feature_dim(self) -> int:
        return 3 * self.dim


_IDENTITY_BACKENDS: dict[str, Callable[[], IdentityBackend]] = {"patch": PatchIdentityBackend}
_VIDEO_BACKENDS: dict[str, Callable[[], VideoFeatureBackend]] = {"motion-stats": MotionStatsBackend}


def get_identity_backend(name: str = "patch") -> IdentityBackend:
    try:
        return _IDENTITY_BACKENDS[name]()
    except KeyError:
        raise MetricError(f"unknown identity backend {name!r} (have {sorted(_IDENTITY_BACKENDS)})") from None


def get_video_backend(name: str = "motion-stats") -> VideoFeatureBackend:
    try:
        return _VIDEO_BACKENDS[name]()
    except KeyError:
        raise MetricError(f"unknown video backend {name!r} (have {sorted(_VIDEO_BACKENDS)})") from None


def register_identity_backend(name: str, factory: Callable[[], IdentityBackend]) -> None:
    _IDENTITY_BACKENDS[name] = factory


def register_video_backend(name: str, factory: Callable[[], VideoFeatureBackend]) -> None:
    _VIDEO_BACKENDS[name] = factory
