from .backends import (
    MotionStatsBackend,
    PatchIdentityBackend,
    get_identity_backend,
    get_video_backend,
    register_identity_backend,
    register_video_backend,
)
from .frechet import fit_gaussian, frechet_distance, fvd
from .identity import spidis, tg_id, tl_id
from .landmark_distance import canonical_mean_face, compute_mean_face, lmd, normalize_landmarks
from .report import MetricsReport, evaluate_swap, video_digest

__all__ = [
    "MetricsReport",
    "MotionStatsBackend",
    "PatchIdentityBackend",
    "canonical_mean_face",
    "compute_mean_face",
    "evaluate_swap",
    "fit_gaussian",
    "frechet_distance",
    "fvd",
    "get_identity_backend",
    "get_video_backend",
    "lmd",
    "normalize_landmarks",
    "register_identity_backend",
    "register_video_backend",
    "spidis",
    "tg_id",
    "tl_id",
    "video_digest",
]
