"""Identity-based metrics: embedding distance and temporal consistency."""

from __future__ import annotations

import numpy as np

from ..errors import DetectionGapError, LengthError, MetricError, NoFaceError
from ..media.landmarks import LandmarkTrack, detect_landmarks
from ..media.video_io import FrameSequence
from .backends import IdentityBackend, get_identity_backend


def _embeddings(video: FrameSequence, backend: IdentityBackend, track: LandmarkTrack | None):
    if track is None:
        try:
            track = detect_landmarks(video)
        except (NoFaceError, DetectionGapError) as exc:
            frames = getattr(exc, "frame_indices", [])
            raise MetricError(f"face detection failed: {exc}", frame_indices=frames) from exc
    return backend.embed(video, track)


def spidis(source: FrameSequence, output: FrameSequence,
           backend: IdentityBackend | None = None,
           track_source: LandmarkTrack | None = None,
           track_output: LandmarkTrack | None = None,
           return_trace: bool = False):
    """Mean per-frame Euclidean distance between identity embeddings."""
    if len(source) != len(output):
        raise LengthError(f"source has {len(source)} frames, output {len(output)}")
    if backend is None:
        backend = get_identity_backend()
    e_src = _embeddings(source, backend, track_source)
    e_out = _embeddings(output, backend, track_output)
    trace = np.linalg.norm(e_src - e_out, axis=1)
    value = float(trace.mean())
    if return_trace:
        return value, trace
    return value


def _pair_cosine(emb: np.ndarray, pairs) -> float:
    sims = [float(np.dot(emb[i], emb[j])
                  / max(np.linalg.norm(emb[i]) * np.linalg.norm(emb[j]), 1e-12))
            for i, j in pairs]
    return float(np.mean(sims))


def tl_id(original: FrameSequence, edited: FrameSequence,
          backend: IdentityBackend | None = None,
          track_original: LandmarkTrack | None = None,
          track_edited: LandmarkTrack | None = None) -> float:
    """Local identity consistency: adjacent-frame embedding similarity of the
    edited video over the same statistic on the original. 1.0 is parity."""
    if len(original) != len(edited):
        raise LengthError(f"original has {len(original)} frames, edited {len(edited)}")
    if len(original) < 2:
        raise MetricError("temporal identity metrics need at least 2 frames")
    if backend is None:
        backend = get_identity_backend()
    e_orig = _embeddings(original, backend, track_original)
    e_edit = _embeddings(edited, backend, track_edited)
    pairs = [(i, i + 1) for i in range(len(original) - 1)]
    denom = _pair_cosine(e_orig, pairs)
    if abs(denom) < 1e-12:
        raise MetricError("original video has degenerate adjacent-frame similarity")
    return _pair_cosine(e_edit, pairs) / denom


def tg_id(original: FrameSequence, edited: FrameSequence,
          backend: IdentityBackend | None = None,
          track_original: LandmarkTrack | None = None,
          track_edited: LandmarkTrack | None = None) -> float:
    """Global identity consistency: as tl_id but over all unordered pairs."""
    if len(original) != len(edited):
        raise LengthError(f"original has {len(original)} frames, edited {len(edited)}")
    if len(original) < 2:
        raise MetricError("temporal identity metrics need at least 2 frames")
    if backend is None:
        backend = get_identity_backend()
    e_orig = _embeddings(original, backend, track_original)
    e_edit = _embeddings(edited, backend, track_edited)
    n = len(original)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    denom = _pair_cosine(e_orig, pairs)
    if abs(denom) < 1e-12:
        raise MetricError("original video has degenerate pairwise similarity")
    return _pair_cosine(e_edit, pairs) / denom
