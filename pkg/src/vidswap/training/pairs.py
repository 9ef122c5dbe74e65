"""Self-supervised pair construction: corrupt a clip's own face foreground
and pair the six-channel input with the clean crop as target."""

from __future__ import annotations

from dataclasses import dataclass

import cv2
import numpy as np
import torch

from ..corruption import CorruptionSpec, apply_corruption, sample_corruption
from ..errors import ShapeError
from ..media.landmarks import LandmarkTrack, detect_landmarks
from ..media.masking import FgBgPair, extract_fg_bg
from ..media.video_io import FrameSequence
from ..model.blendnet import BlendInput, frames_to_tensor


@dataclass
class TrainingPair:
    input: BlendInput
    target: torch.Tensor  # (N, 3, H, W) in [-1, 1], the clean crop

    def __post_init__(self):
        if self.target.shape[0] != self.input.n_frames or self.target.shape[1] != 3:
            raise ShapeError(
                f"target {tuple(self.target.shape)} does not match input "
                f"({self.input.n_frames} frames)"
            )
        if self.target.shape[2:] != self.input.tensor.shape[2:]:
            raise ShapeError("input and target resolutions differ")


def crop_frames(video: FrameSequence, crop_box: np.ndarray, resolution: int) -> FrameSequence:
    """Clean crops for each frame given per-frame square boxes."""
    out = np.empty((len(video), resolution, resolution, 3), dtype=np.uint8)
    for i in range(len(video)):
        x0, y0, side = crop_box[i]
        crop = video.frames[i, y0:y0 + side, x0:x0 + side]
        out[i] = cv2.resize(crop, (resolution, resolution), interpolation=cv2.INTER_LINEAR)
    return FrameSequence(out, video.fps)


def make_training_pair(
    clip: FrameSequence,
    spec: CorruptionSpec,
    seed: int,
    resolution: int = 256,
    lms: LandmarkTrack | None = None,
    backend=None,
    return_pair: bool = False,
):
    """Build one (corrupted input, clean target) pair from a single clip."""
    if lms is None:
        lms = detect_landmarks(clip, backend=backend)
    pair = extract_fg_bg(clip, lms, resolution=resolution)
    sample = sample_corruption(spec, len(clip), seed)
    corrupted = apply_corruption(pair.foreground, sample)
    blend = BlendInput.from_foreground_background(corrupted, pair.background)
    target = frames_to_tensor(crop_frames(clip, pair.crop_box, resolution).frames)
    training_pair = TrainingPair(input=blend, target=target)
    if return_pair:
        return training_pair, pair
    return training_pair
