"""Versioned single-file checkpoints: config + weights + codebooks + step."""

from __future__ import annotations

from pathlib import Path

import torch

from ..errors import CheckpointError
from .blendnet import BlendNet
from .config import ModelConfig

FORMAT = "vidswap-checkpoint"
VERSION = 1


def save_checkpoint(path, model: BlendNet, step: int = 0, epoch: int = 0,
                    optimizer=None, tool_config: dict | None = None) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "format": FORMAT,
        "version": VERSION,
        "model_config": model.config.to_dict(),
        "model_state": model.state_dict(),
        "optimizer_state": optimizer.state_dict() if optimizer is not None else None,
        "step": int(step),
        "epoch": int(epoch),
        "tool_config": tool_config,
    }
    torch.save(payload, path)


def load_checkpoint(path, expect_config: ModelConfig | None = None) -> dict:
    """Load and validate a checkpoint; returns the payload with a rebuilt
    'model' entry in eval mode."""
    path = Path(path)
    if not path.exists():
        raise CheckpointError(f"checkpoint not found: {path}")
    try:
        payload = torch.load(path, map_location="cpu", weights_only=False)
    except Exception as exc:
        raise CheckpointError(f"unreadable checkpoint {path}: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("format") != FORMAT:
        raise CheckpointError(f"{path} is not a {FORMAT} file")
    if payload.get("version") != VERSION:
        raise CheckpointError(
            f"checkpoint version {payload.get('version')} unsupported (expected {VERSION})"
        )
    config = ModelConfig.from_dict(payload["model_config"])
    if expect_config is not None and config != expect_config:
        raise CheckpointError(
            f"checkpoint model config {config} does not match requested {expect_config}"
        )
    model = BlendNet(config)
    try:
        model.load_state_dict(payload["model_state"])
    except Exception as exc:
        raise CheckpointError(f"checkpoint weights incompatible: {exc}") from exc
    model.eval()
    payload["model"] = model
    return payload
