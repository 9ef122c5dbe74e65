"""Training objective: pixel reconstruction + perceptual term + commitment.

The perceptual metric is a pluggable interface. `features` uses a
pretrained deep-feature distance when torchvision weights are locally
available; `gradient` is a multi-scale image-gradient L1 surrogate that
needs no external weights. `auto` prefers features and falls back.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Protocol

import torch
import torch.nn.functional as F

from ..errors import ConfigError, NumericalError, ShapeError


class PerceptualMetric(Protocol):
    name: str

    def __call__(self, pred: torch.Tensor, target: torch.Tensor) -> torch.Tensor: ...


class ZeroPerceptual:
    name = "none"

    def __call__(self, pred, target):
        return pred.new_zeros(())


class GradientPerceptual:
    """L1 distance between image gradients at multiple scales."""

    name = "gradient"

    def __init__(self, scales: int = 3):
        self.scales = scales

    def __call__(self, pred: torch.Tensor, target: torch.Tensor) -> torch.Tensor:
        loss = pred.new_zeros(())
        p, t = pred, target
        for s in range(self.scales):
            loss = loss + self._grad_l1(p, t)
            if s + 1 < self.scales:
                p = F.avg_pool2d(p, 2)
                t = F.avg_pool2d(t, 2)
        return loss / self.scales

    @staticmethod
    def _grad_l1(a: torch.Tensor, b: torch.Tensor) -> torch.Tensor:
        dax = a[..., :, 1:] - a[..., :, :-1]
        dbx = b[..., :, 1:] - b[..., :, :-1]
        day = a[..., 1:, :] - a[..., :-1, :]
        dby = b[..., 1:, :] - b[..., :-1, :]
        return (dax - dbx).abs().mean() + (day - dby).abs().mean()


class FeaturePerceptual:
    """Deep-feature L1 distance on VGG16 activations (requires local weights)."""

    name = "features"

    def __init__(self):
        from torchvision.models import VGG16_Weights, vgg16  # deferred: heavy import

        net = vgg16(weights=VGG16_Weights.DEFAULT).features[:16].eval()
        for p in net.parameters():
            p.requires_grad_(False)
        self.net = net

    def __call__(self, pred: torch.Tensor, target: torch.Tensor) -> torch.Tensor:
        return F.l1_loss(self.net(pred), self.net(target))


def resolve_perceptual(name: str = "auto") -> PerceptualMetric:
    if name == "none":
        return ZeroPerceptual()
    if name == "gradient":
        return GradientPerceptual()
    if name == "features":
        return FeaturePerceptual()
    if name == "auto":
        try:
            return FeaturePerceptual()
        except Exception:
            return GradientPerceptual()
    raise ConfigError(f"unknown perceptual metric {name!r} (use auto|features|gradient|none)")


@dataclass
class LossReport:
    reconstruction: float
    perceptual: float
    commitment_top: float
    commitment_bottom: float
    total: float

    def as_dict(self) -> dict:
        return asdict(self)


def compute_loss(
    pred: torch.Tensor,
    target: torch.Tensor,
    vq_losses: dict,
    perceptual: PerceptualMetric | None = None,
    reconstruction: str = "l1",
    perceptual_weight: float = 0.3,
    commitment_weight: float = 0.25,
) -> tuple[torch.Tensor, LossReport]:
    """Total objective and its per-term report.

    total = reconstruction + perceptual_weight * perceptual
          + commitment_weight * (commitment_top + commitment_bottom)
    """
    if pred.shape != target.shape:
        raise ShapeError(f"pred {tuple(pred.shape)} vs target {tuple(target.shape)}")
    if reconstruction == "l1":
        recon = (pred - target).abs().mean()
    elif reconstruction == "l2":
        recon = ((pred - target) ** 2).mean()
    else:
        raise ConfigError(f"reconstruction must be 'l1' or 'l2', got {reconstruction!r}")
    if perceptual is None:
        perceptual = ZeroPerceptual()
    perc = perceptual(pred, target)
    commit_top = vq_losses.get("commitment_top", pred.new_zeros(()))
    commit_bottom = vq_losses.get("commitment_bottom", pred.new_zeros(()))
    total = recon + perceptual_weight * perc + commitment_weight * (commit_top + commit_bottom)
    for term_name, value in (
        ("reconstruction", recon),
        ("perceptual", perc),
        ("commitment_top", commit_top),
        ("commitment_bottom", commit_bottom),
        ("total", total),
    ):
        if not torch.isfinite(value):
            raise NumericalError(f"loss term {term_name!r} is not finite: {value}")
    report = LossReport(
        reconstruction=float(recon),
        perceptual=float(perc),
        commitment_top=float(commit_top),
        commitment_bottom=float(commit_bottom),
        total=float(total),
    )
    return total, report


def psnr(pred: torch.Tensor, target: torch.Tensor) -> float:
    """PSNR in dB for tensors in [-1, 1] (equivalent to [0, 1] convention)."""
    mse = float(((pred - target) ** 2).mean())
    if mse == 0:
        return math.inf
    return 10.0 * math.log10(4.0 / mse)
