"""The blending autoencoder: framewise two-level encoder, temporal mixing
before each quantizer, EMA vector quantization, framewise decoder."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
from torch import nn

from ..errors import ShapeError, TemporalContextError
from ..media.video_io import FrameSequence
from .config import ModelConfig
from .layers import Decoder, EncoderBottom, EncoderTop, TemporalMixer
from .quantizer import EmaCodebook, quantize


@dataclass
class BlendInput:
    """Six-channel video tensor: channels 0-2 the (corrupted or aligned)
    source foreground, channels 3-5 the face-zeroed target background,
    values in [-1, 1]."""

    tensor: torch.Tensor

    def __post_init__(self):
        t = self.tensor
        if t.dim() != 4 or t.shape[1] != 6:
            raise ShapeError(f"blend input must be (N, 6, H, W), got {tuple(t.shape)}")
        if t.shape[0] < 2:
            raise TemporalContextError(f"blend input needs N >= 2 frames, got {t.shape[0]}")
        if t.shape[2] != t.shape[3]:
            raise ShapeError(f"frames must be square, got {t.shape[2]}x{t.shape[3]}")

    @staticmethod
    def from_foreground_background(foreground: FrameSequence, background: FrameSequence) -> "BlendInput":
        if len(foreground) != len(background):
            raise ShapeError(
                f"foreground has {len(foreground)} frames, background {len(background)}"
            )
        f = frames_to_tensor(foreground.frames)
        b = frames_to_tensor(background.frames)
        return BlendInput(torch.cat([f, b], dim=1))

    @property
    def n_frames(self) -> int:
        return int(self.tensor.shape[0])


def frames_to_tensor(frames: np.ndarray) -> torch.Tensor:
    """(N, H, W, 3) uint8 -> (N, 3, H, W) float32 in [-1, 1]."""
    t = torch.from_numpy(np.ascontiguousarray(frames)).float()
    return (t / 127.5 - 1.0).permute(0, 3, 1, 2).contiguous()


def tensor_to_frames(t: torch.Tensor) -> np.ndarray:
    """(N, 3, H, W) in [-1, 1] -> (N, H, W, 3) uint8."""
    arr = ((t.detach().clamp(-1, 1) + 1.0) * 127.5).round().to(torch.uint8)
    return arr.permute(0, 2, 3, 1).contiguous().cpu().numpy()


class BlendNet(nn.Module):
    def __init__(self, config: ModelConfig):
        super().__init__()
        self.config = config
        self.encoder_bottom = EncoderBottom(6, config.channels, config.embedding_dim)
        self.encoder_top = EncoderTop(config.channels, config.embedding_dim)
        self.temporal_top = TemporalMixer(config.embedding_dim, config.temporal_kernel, config.temporal_blocks)
        self.temporal_bottom = TemporalMixer(config.embedding_dim, config.temporal_kernel, config.temporal_blocks)
        self.codebook_top = EmaCodebook(config.codebook_size, config.embedding_dim, config.ema_decay)
        self.codebook_bottom = EmaCodebook(config.codebook_size, config.embedding_dim, config.ema_decay)
        self.decoder = Decoder(config.channels, config.embedding_dim)

    @staticmethod
    def build(config: ModelConfig, seed: int = 0) -> "BlendNet":
        """Construct with deterministic initialization."""
        torch.manual_seed(seed)
        return BlendNet(config)

    def _check_input(self, x: torch.Tensor):
        res = self.config.resolution
        if x.dim() != 4 or x.shape[1] != 6 or x.shape[2] != res or x.shape[3] != res:
            raise ShapeError(f"expected (N, 6, {res}, {res}), got {tuple(x.shape)}")

    def encode(self, x: torch.Tensor):
        """Framewise encoding to (bottom, top) feature grids at embedding depth."""
        if isinstance(x, BlendInput):
            x = x.tensor
        self._check_input(x)
        trunk, bottom = self.encoder_bottom(x)
        top = self.encoder_top(trunk)
        return bottom, top

    def temporal_mix(self, features: torch.Tensor, hierarchy: str) -> torch.Tensor:
        if hierarchy == "top":
            return self.temporal_top(features)
        if hierarchy == "bottom":
            return self.temporal_bottom(features)
        raise ShapeError(f"hierarchy must be 'top' or 'bottom', got {hierarchy!r}")

    def quantize_top(self, features: torch.Tensor):
        return quantize(features, self.codebook_top)

    def quantize_bottom(self, features: torch.Tensor):
        return quantize(features, self.codebook_bottom)

    def decode(self, quantized_top: torch.Tensor, quantized_bottom: torch.Tensor) -> torch.Tensor:
        d = self.config.embedding_dim
        ts, bs = self.config.top_size, self.config.bottom_size
        if quantized_top.dim() != 4 or quantized_top.shape[1:] != (d, ts, ts):
            raise ShapeError(f"top grid must be (N, {d}, {ts}, {ts}), got {tuple(quantized_top.shape)}")
        if quantized_bottom.dim() != 4 or quantized_bottom.shape[1:] != (d, bs, bs):
            raise ShapeError(
                f"bottom grid must be (N, {d}, {bs}, {bs}), got {tuple(quantized_bottom.shape)}"
            )
        if quantized_top.shape[0] != quantized_bottom.shape[0]:
            raise ShapeError("hierarchies carry different frame counts")
        return self.decoder(quantized_top, quantized_bottom)

    def forward(self, x):
        """Full pipeline; returns (output video tensor, dict of vq losses)."""
        bottom, top = self.encode(x)
        top = self.temporal_mix(top, "top")
        bottom = self.temporal_mix(bottom, "bottom")
        q_top, codes_top, commit_top = self.quantize_top(top)
        q_bottom, codes_bottom, commit_bottom = self.quantize_bottom(bottom)
        out = self.decode(q_top, q_bottom)
        losses = {"commitment_top": commit_top, "commitment_bottom": commit_bottom}
        self._last_codes = (codes_top, codes_bottom)
        return out, losses

    def encode_codes(self, x) -> tuple[torch.Tensor, torch.Tensor]:
        """Discrete latent grids (top, bottom) for an input, inference mode."""
        with torch.no_grad():
            bottom, top = self.encode(x)
            top = self.temporal_mix(top, "top")
            bottom = self.temporal_mix(bottom, "bottom")
            _, codes_top, _ = self.quantize_top(top)
            _, codes_bottom, _ = self.quantize_bottom(bottom)
        return codes_top, codes_bottom
