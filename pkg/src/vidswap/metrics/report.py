"""Full evaluation of a swap: all metrics in one machine-readable report."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import MetricError
from ..media.landmarks import LandmarkTrack, detect_landmarks, get_backend
from ..media.video_io import FrameSequence, content_hash
from .backends import get_identity_backend, get_video_backend
from .frechet import fvd
from .identity import spidis, tg_id, tl_id
from .landmark_distance import compute_mean_face, lmd


@dataclass
class MetricsReport:
    spidis: float
    lmd: float
    tl_id: float
    tg_id: float
    fvd: float
    spidis_trace: list[float]
    lmd_trace: list[float]
    identity_backend: str
    video_backend: str
    landmark_backend: str
    input_hashes: dict
    mean_face: list = field(default_factory=list)

    def validate(self) -> None:
        for name in ("spidis", "lmd", "tl_id", "tg_id", "fvd"):
            value = getattr(self, name)
            if not np.isfinite(value):
                raise MetricError(f"metric {name} is not finite: {value}")
        if self.tl_id <= 0 or self.tg_id <= 0:
            raise MetricError("identity-consistency ratios must be positive")

    def to_json(self, indent: int = 2) -> str:
        ordered = {
            "spidis": self.spidis,
            "lmd": self.lmd,
            "tl_id": self.tl_id,
            "tg_id": self.tg_id,
            "fvd": self.fvd,
            "backends": {
                "identity": self.identity_backend,
                "video": self.video_backend,
                "landmarks": self.landmark_backend,
            },
            "input_hashes": self.input_hashes,
        }
        return json.dumps(ordered, indent=indent)

    def trace_json(self) -> str:
        return json.dumps(
            {
                "spidis_trace": self.spidis_trace,
                "lmd_trace": self.lmd_trace,
                "mean_face": self.mean_face,
            }
        )


def _windows(video: FrameSequence, length: int) -> list[FrameSequence]:
    return [video.window(i * length, (i + 1) * length) for i in range(len(video) // length)]


def video_digest(video: FrameSequence) -> str:
    return hashlib.sha256(video.frames.tobytes()).hexdigest()


def evaluate_swap(
    source: FrameSequence,
    target: FrameSequence,
    output: FrameSequence,
    identity_backend: str = "patch",
    video_backend: str = "motion-stats",
    landmark_backend: str = "geometric",
    window: int = 8,
    paths: dict | None = None,
) -> MetricsReport:
    """Score a swapped output against its source (identity, expressions) and
    target (temporal identity consistency, realism distribution)."""
    lm_backend = get_backend(landmark_backend)
    id_backend = get_identity_backend(identity_backend)
    vid_backend = get_video_backend(video_backend)

    track_src = detect_landmarks(source, backend=lm_backend)
    track_tgt = detect_landmarks(target, backend=lm_backend)
    track_out = detect_landmarks(output, backend=lm_backend)

    mean_face = compute_mean_face([track_src, track_tgt, track_out])
    spidis_value, spidis_trace = spidis(
        source, output, backend=id_backend,
        track_source=track_src, track_output=track_out, return_trace=True,
    )
    lmd_value, lmd_trace = lmd(track_src, track_out, mean_face=mean_face, return_trace=True)
    tl = tl_id(target, output, backend=id_backend,
               track_original=track_tgt, track_edited=track_out)
    tg = tg_id(target, output, backend=id_backend,
               track_original=track_tgt, track_edited=track_out)
    fvd_value = fvd(_windows(target, window), _windows(output, window), backend=vid_backend)

    hashes = {}
    if paths:
        for key, path in paths.items():
            if path is not None and Path(path).exists():
                hashes[key] = content_hash(path)
    hashes.setdefault("source", video_digest(source))
    hashes.setdefault("target", video_digest(target))
    hashes.setdefault("output", video_digest(output))

    report = MetricsReport(
        spidis=spidis_value,
        lmd=lmd_value,
        tl_id=tl,
        tg_id=tg,
        fvd=fvd_value,
        spidis_trace=[float(x) for x in spidis_trace],
        lmd_trace=[float(x) for x in lmd_trace],
        identity_backend=id_backend.name,
        video_backend=vid_backend.name,
        landmark_backend=lm_backend.name,
        input_hashes=hashes,
        mean_face=np.asarray(mean_face).tolist(),
    )
    report.validate()
    return report
