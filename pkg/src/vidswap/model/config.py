"""Model hyperparameters."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

from ..errors import ConfigError


@dataclass(frozen=True)
class ModelConfig:
    resolution: int = 256
    codebook_size: int = 512
    embedding_dim: int = 64
    channels: int = 128
    temporal_kernel: tuple[int, int, int] = (3, 3, 3)
    temporal_blocks: int = 2
    commitment_weight: float = 0.25
    ema_decay: float = 0.99

    def __post_init__(self):
        if self.resolution % 8 != 0 or self.resolution < 8:
            raise ConfigError(f"resolution must be a positive multiple of 8, got {self.resolution}")
        if self.codebook_size < 2:
            raise ConfigError(f"codebook_size must be >= 2, got {self.codebook_size}")
        if self.embedding_dim < 1 or self.channels < 2:
            raise ConfigError("embedding_dim and channels must be positive")
        t, h, w = self.temporal_kernel
        if t % 2 == 0 or t < 1:
            raise ConfigError(f"temporal kernel time extent must be odd, got {t}")
        if h % 2 == 0 or w % 2 == 0:
            raise ConfigError(f"temporal kernel spatial extents must be odd, got ({h}, {w})")
        if self.temporal_blocks < 0:
            raise ConfigError(f"temporal_blocks must be >= 0, got {self.temporal_blocks}")
        if not (0.0 < self.ema_decay < 1.0):
            raise ConfigError(f"ema_decay must be in (0, 1), got {self.ema_decay}")
        if self.commitment_weight < 0:
            raise ConfigError(f"commitment_weight must be >= 0, got {self.commitment_weight}")

    @property
    def bottom_size(self) -> int:
        return self.resolution // 4

    @property
    def top_size(self) -> int:
        return self.resolution // 8

    def to_dict(self) -> dict:
        d = asdict(self)
        d["temporal_kernel"] = list(self.temporal_kernel)
        return d

    @staticmethod
    def from_dict(d: dict) -> "ModelConfig":
        known = set(ModelConfig.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown model config keys: {sorted(unknown)}")
        d = dict(d)
        if "temporal_kernel" in d:
            d["temporal_kernel"] = tuple(d["temporal_kernel"])
        return ModelConfig(**d)
