from .geometry import AffineParams, align_source_to_target, fit_similarity, warp_frame
from .landmarks import (
    GeometricBackend,
    LandmarkTrack,
    cache_path,
    detect_landmarks,
    get_backend,
    load_track,
    register_backend,
    save_track,
)
from .masking import FgBgPair, composite, extract_fg_bg, landmarks_in_crop
from .video_io import FrameSequence, content_hash, load_video, write_video

__all__ = [
    "AffineParams",
    "FgBgPair",
    "FrameSequence",
    "GeometricBackend",
    "LandmarkTrack",
    "align_source_to_target",
    "cache_path",
    "composite",
    "content_hash",
    "detect_landmarks",
    "extract_fg_bg",
    "fit_similarity",
    "get_backend",
    "landmarks_in_crop",
    "load_track",
    "load_video",
    "register_backend",
    "save_track",
    "warp_frame",
    "write_video",
]
