"""Convolutional building blocks.

Everything spatial is strictly framewise (2D convs over the batch-as-time
axis); only TemporalMixer touches neighboring frames. No normalization
layers anywhere: batch statistics would leak information across frames.
"""

from __future__ import annotations

import torch
from torch import nn

from ..errors import TemporalContextError


class ResBlock2d(nn.Module):
    def __init__(self, channels: int):
        super().__init__()
        self.body = nn.Sequential(
            nn.ReLU(),
            nn.Conv2d(channels, channels // 2, 3, padding=1),
            nn.ReLU(),
            nn.Conv2d(channels // 2, channels, 1),
        )

    def forward(self, x):
        return x + self.body(x)


class EncoderBottom(nn.Module):
    """6-channel input to embedding-depth features at 1/4 resolution."""

    def __init__(self, in_channels: int, channels: int, embedding_dim: int):
        super().__init__()
        self.trunk = nn.Sequential(
            nn.Conv2d(in_channels, channels // 2, 4, stride=2, padding=1),
            nn.ReLU(),
            nn.Conv2d(channels // 2, channels, 4, stride=2, padding=1),
            nn.ReLU(),
            nn.Conv2d(channels, channels, 3, padding=1),
            ResBlock2d(channels),
            ResBlock2d(channels),
        )
        self.head = nn.Sequential(nn.ReLU(), nn.Conv2d(channels, embedding_dim, 1))

    def forward(self, x):
        trunk = self.trunk(x)
        return trunk, self.head(trunk)


class EncoderTop(nn.Module):
    """Bottom trunk features to embedding-depth features at 1/8 resolution."""

    def __init__(self, channels: int, embedding_dim: int):
        super().__init__()
        self.trunk = nn.Sequential(
            nn.Conv2d(channels, channels, 4, stride=2, padding=1),
            nn.ReLU(),
            nn.Conv2d(channels, channels, 3, padding=1),
            ResBlock2d(channels),
            ResBlock2d(channels),
        )
        self.head = nn.Sequential(nn.ReLU(), nn.Conv2d(channels, embedding_dim, 1))

    def forward(self, trunk):
        return self.head(self.trunk(trunk))


class TemporalResBlock(nn.Module):
    def __init__(self, channels: int, kernel: tuple[int, int, int]):
        super().__init__()
        padding = tuple(k // 2 for k in kernel)
        self.body = nn.Sequential(
            nn.ReLU(),
            nn.Conv3d(channels, channels, kernel, padding=padding),
            nn.ReLU(),
            nn.Conv3d(channels, channels, kernel, padding=padding),
        )

    def forward(self, x):
        return x + self.body(x)


class TemporalMixer(nn.Module):
    """Residual 3D-convolution stack over (time, height, width).

    Zero blocks is the ablation case: an exact identity with no cross-frame
    information flow.
    """

    def __init__(self, channels: int, kernel: tuple[int, int, int], blocks: int):
        super().__init__()
        self.blocks = nn.ModuleList(TemporalResBlock(channels, kernel) for _ in range(blocks))

    @property
    def is_identity(self) -> bool:
        return len(self.blocks) == 0

    def forward(self, features: torch.Tensor) -> torch.Tensor:
        if len(self.blocks) == 0:
            return features
        if features.shape[0] < 2:
            raise TemporalContextError(
                f"temporal mixing needs at least 2 frames, got {features.shape[0]}"
            )
        x = features.transpose(0, 1).unsqueeze(0)  # (1, C, N, h, w); time zero-padded
        for block in self.blocks:
            x = block(x)
        return x.squeeze(0).transpose(0, 1).contiguous()


class Decoder(nn.Module):
    """Fuse upsampled top with bottom codes and decode framewise to RGB."""

    def __init__(self, channels: int, embedding_dim: int, out_channels: int = 3):
        super().__init__()
        self.upsample_top = nn.ConvTranspose2d(embedding_dim, embedding_dim, 4, stride=2, padding=1)
        self.body = nn.Sequential(
            nn.Conv2d(2 * embedding_dim, channels, 3, padding=1),
            ResBlock2d(channels),
            ResBlock2d(channels),
            nn.ReLU(),
            nn.ConvTranspose2d(channels, channels // 2, 4, stride=2, padding=1),
            nn.ReLU(),
            nn.ConvTranspose2d(channels // 2, out_channels, 4, stride=2, padding=1),
            nn.Tanh(),
        )

    def forward(self, quantized_top, quantized_bottom):
        top = self.upsample_top(quantized_top)
        return self.body(torch.cat([top, quantized_bottom], dim=1))
