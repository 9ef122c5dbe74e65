"""Vector quantization with EMA codebook learning.

Assignment is exhaustive nearest neighbor in Euclidean distance with ties
going to the lowest index (torch.argmin returns the first minimum).
Gradients pass straight through the quantization step. In training mode the
codebook follows the EMA update with Laplace-smoothed cluster sizes.
"""

from __future__ import annotations

import torch
from torch import nn

from ..errors import ShapeError


class EmaCodebook(nn.Module):
    """Learned K x D embedding table updated by exponential moving averages."""

    def __init__(self, codebook_size: int, embedding_dim: int, decay: float = 0.99, epsilon: float = 1e-5):
        super().__init__()
        self.codebook_size = codebook_size
        self.embedding_dim = embedding_dim
        self.decay = decay
        self.epsilon = epsilon
        entries = torch.randn(codebook_size, embedding_dim)
        self.register_buffer("entries", entries)
        self.register_buffer("usage_ema", torch.zeros(codebook_size))
        self.register_buffer("embed_ema", entries.clone())

    @torch.no_grad()
    def ema_update(self, flat: torch.Tensor, codes: torch.Tensor) -> None:
        one_hot = torch.zeros(flat.shape[0], self.codebook_size, device=flat.device, dtype=flat.dtype)
        one_hot.scatter_(1, codes.unsqueeze(1), 1.0)
        counts = one_hot.sum(0)
        self.usage_ema.mul_(self.decay).add_(counts, alpha=1.0 - self.decay)
        self.embed_ema.mul_(self.decay).add_(one_hot.t() @ flat, alpha=1.0 - self.decay)
        n = self.usage_ema.sum()
        smoothed = (self.usage_ema + self.epsilon) / (n + self.codebook_size * self.epsilon) * n
        self.entries.copy_(self.embed_ema / smoothed.unsqueeze(1))

    @torch.no_grad()
    def restart_unused(self, flat: torch.Tensor, threshold: float = 1e-3, generator=None) -> int:
        """Reseed entries whose EMA usage fell below threshold from random
        encoder outputs; returns the number of restarted codes."""
        dead = torch.nonzero(self.usage_ema < threshold).flatten()
        if dead.numel() == 0 or flat.shape[0] == 0:
            return 0
        idx = torch.randint(0, flat.shape[0], (dead.numel(),), generator=generator, device=flat.device)
        fresh = flat[idx].to(self.entries.dtype)
        self.entries[dead] = fresh
        self.embed_ema[dead] = fresh
        self.usage_ema[dead] = 1.0
        return int(dead.numel())


def quantize(features: torch.Tensor, codebook: EmaCodebook):
    """Replace each D-vector with its nearest codebook entry.

    features: (N, D, h, w). Returns (quantized same shape, codes (N, h, w)
    int64, commitment loss scalar). The quantized tensor carries the
    straight-through gradient when grad is enabled and is built from exact
    codebook rows otherwise.
    """
    if features.dim() != 4 or features.shape[1] != codebook.embedding_dim:
        raise ShapeError(
            f"features must be (N, {codebook.embedding_dim}, h, w), got {tuple(features.shape)}"
        )
    n, d, h, w = features.shape
    flat = features.permute(0, 2, 3, 1).reshape(-1, d)
    entries = codebook.entries
    distances = (
        flat.pow(2).sum(1, keepdim=True)
        - 2.0 * flat @ entries.t()
        + entries.pow(2).sum(1)
    )
    codes = distances.argmin(dim=1)
    hard = entries[codes]
    commit_loss = torch.mean((flat - hard.detach()) ** 2)
    if codebook.training:
        codebook.ema_update(flat.detach(), codes)
    if torch.is_grad_enabled() and features.requires_grad:
        quantized_flat = flat + (hard - flat).detach()
    else:
        quantized_flat = hard
    quantized = quantized_flat.reshape(n, h, w, d).permute(0, 3, 1, 2).contiguous()
    return quantized, codes.reshape(n, h, w), commit_loss
