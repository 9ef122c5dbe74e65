"""Swap pipeline: landmark-align the source foreground to the target pose,
blend through the trained model window by window, and composite the crops
back into the target frames. No finetuning, no gradients."""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from .errors import LengthError, ShapeError
from .media.geometry import align_source_to_target
from .media.landmarks import (
    LandmarkTrack,
    cache_path,
    detect_landmarks,
    get_backend,
    load_track,
)
from .media.masking import composite, extract_fg_bg, landmarks_in_crop
from .media.video_io import FrameSequence, load_video, write_video
from .model.blendnet import BlendInput, BlendNet, tensor_to_frames
from .model.checkpoint import load_checkpoint


@dataclass
class SwapJob:
    source_path: str | Path
    target_path: str | Path
    output_path: str | Path
    checkpoint_path: str | Path
    clip_length: int | None = None  # None: the checkpoint's training length
    resample: bool = False
    seed: int = 0
    landmark_backend: str = "geometric"
    cache_dir: str | Path | None = None


def _track_for(video: FrameSequence, path, backend, cache_dir) -> LandmarkTrack:
    if cache_dir is not None and path is not None:
        cpath = cache_path(cache_dir, path)
        if cpath.exists():
            track = load_track(cpath)
            if len(track) == len(video):
                return track
    return detect_landmarks(video, backend=backend)


def resample_source(video: FrameSequence, lms: LandmarkTrack, n_target: int):
    """Uniform temporal resampling to n_target frames (nearest frame pick)."""
    idx = np.round(np.linspace(0, len(video) - 1, n_target)).astype(int)
    return (
        FrameSequence(video.frames[idx].copy(), video.fps),
        LandmarkTrack(points=lms.points[idx].copy(), confidence=lms.confidence[idx].copy()),
    )


def _window_slices(n_frames: int, window: int):
    """Non-overlapping windows; a short tail is left-padded by repeating its
    first frame and trimmed after decoding. Yields (start, stop, pad)."""
    start = 0
    while start < n_frames:
        stop = min(start + window, n_frames)
        pad = window - (stop - start)
        yield start, stop, pad
        start = stop


def swap_frames(
    model: BlendNet,
    source: FrameSequence,
    target: FrameSequence,
    lms_source: LandmarkTrack,
    lms_target: LandmarkTrack,
    clip_length: int,
) -> FrameSequence:
    """Swap with preloaded inputs; returns full-resolution output frames."""
    if len(source) != len(target):
        raise LengthError(f"source has {len(source)} frames, target {len(target)}")
    model.eval()
    res = model.config.resolution
    out_frames = target.frames.copy()
    for start, stop, pad in _window_slices(len(target), clip_length):
        src_w, tgt_w = source.window(start, stop), target.window(start, stop)
        lm_s = LandmarkTrack(lms_source.points[start:stop], lms_source.confidence[start:stop])
        lm_t = LandmarkTrack(lms_target.points[start:stop], lms_target.confidence[start:stop])
        if pad:
            src_w = FrameSequence(np.concatenate([src_w.frames[:1].repeat(pad, 0), src_w.frames]), src_w.fps)
            tgt_w = FrameSequence(np.concatenate([tgt_w.frames[:1].repeat(pad, 0), tgt_w.frames]), tgt_w.fps)
            lm_s = LandmarkTrack(
                np.concatenate([lm_s.points[:1].repeat(pad, 0), lm_s.points]),
                np.concatenate([lm_s.confidence[:1].repeat(pad, 0), lm_s.confidence]),
            )
            lm_t = LandmarkTrack(
                np.concatenate([lm_t.points[:1].repeat(pad, 0), lm_t.points]),
                np.concatenate([lm_t.confidence[:1].repeat(pad, 0), lm_t.confidence]),
            )
        pair_s = extract_fg_bg(src_w, lm_s, resolution=res)
        pair_t = extract_fg_bg(tgt_w, lm_t, resolution=res)
        lm_s_crop = landmarks_in_crop(lm_s, pair_s.crop_box, res)
        lm_t_crop = landmarks_in_crop(lm_t, pair_t.crop_box, res)
        aligned = align_source_to_target(pair_s.foreground, lm_s_crop, lm_t_crop)
        blend = BlendInput.from_foreground_background(aligned, pair_t.background)
        with torch.no_grad():
            out, _ = model(blend.tensor)
        generated = FrameSequence(tensor_to_frames(out), tgt_w.fps)
        composed = composite(generated, tgt_w, pair_t)
        out_frames[start:stop] = composed.frames[pad:]
    return FrameSequence(out_frames, target.fps)


def swap(job: SwapJob) -> FrameSequence:
    """Run a swap job end to end and write the result to job.output_path."""
    payload = load_checkpoint(job.checkpoint_path)
    model: BlendNet = payload["model"]
    clip_length = job.clip_length
    if clip_length is None:
        tool_cfg = payload.get("tool_config") or {}
        clip_length = int(tool_cfg.get("training", {}).get("clip_length", 8))
    backend = get_backend(job.landmark_backend)
    source = load_video(job.source_path)
    target = load_video(job.target_path)
    lms_s = _track_for(source, job.source_path, backend, job.cache_dir)
    lms_t = _track_for(target, job.target_path, backend, job.cache_dir)
    if len(source) != len(target):
        if not job.resample:
            raise LengthError(
                f"source has {len(source)} frames, target {len(target)}; "
                "pass resample to retime the source"
            )
        source, lms_s = resample_source(source, lms_s, len(target))
    result = swap_frames(model, source, target, lms_s, lms_t, clip_length)
    write_video(result, job.output_path)
    return result


def benchmark_latency(checkpoint_path, clip_length: int = 8, runs: int = 10, warmup: int = 2) -> dict:
    """Median wall-clock of the model forward alone for one window.

    I/O, detection and compositing are excluded; reported with a hardware
    descriptor so numbers are comparable.
    """
    import platform

    payload = load_checkpoint(checkpoint_path)
    model: BlendNet = payload["model"]
    model.eval()
    res = model.config.resolution
    if clip_length < 2:
        raise ShapeError("benchmark needs a window of at least 2 frames")
    x = torch.rand(clip_length, 6, res, res) * 2.0 - 1.0
    with torch.no_grad():
        for _ in range(warmup):
            model(x)
        times = []
        for _ in range(max(runs, 1)):
            t0 = time.perf_counter()
            model(x)
            times.append((time.perf_counter() - t0) * 1000.0)
    return {
        "median_ms": float(statistics.median(times)),
        "runs": len(times),
        "window": [clip_length, 6, res, res],
        "device": "cpu" if not torch.cuda.is_available() else torch.cuda.get_device_name(0),
        "hardware": platform.processor() or platform.machine(),
        "torch_threads": torch.get_num_threads(),
    }
