"""Optimization loop: one clip window per step, fresh corruption per epoch,
periodic checkpoints, JSONL loss logs, dead-code restarts at epoch ends."""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import torch

from ..corruption import CorruptionSpec
from ..errors import ConfigError, NumericalError, VidswapError
from ..media.landmarks import LandmarkTrack, cache_path, detect_landmarks, get_backend, load_track
from ..media.video_io import FrameSequence, load_video
from ..model.blendnet import BlendNet
from ..model.checkpoint import load_checkpoint, save_checkpoint
from ..model.config import ModelConfig
from .losses import compute_loss, resolve_perceptual
from .pairs import TrainingPair, make_training_pair

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainingConfig:
    clip_length: int = 8
    steps: int = 2000
    learning_rate: float = 2e-4
    reconstruction: str = "l1"
    perceptual: str = "auto"
    perceptual_weight: float = 0.3
    checkpoint_interval: int = 500
    log_every: int = 1

    def __post_init__(self):
        if self.clip_length < 2:
            raise ConfigError(f"clip_length must be >= 2, got {self.clip_length}")
        if self.steps < 1:
            raise ConfigError(f"steps must be >= 1, got {self.steps}")
        if self.learning_rate <= 0:
            raise ConfigError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.reconstruction not in ("l1", "l2"):
            raise ConfigError(f"reconstruction must be l1|l2, got {self.reconstruction!r}")
        if self.checkpoint_interval < 1:
            raise ConfigError("checkpoint_interval must be >= 1")


def derive_seed(global_seed: int, *parts: int) -> int:
    """Stable per-(epoch, clip, window) seed, independent of scheduling."""
    h = hashlib.sha256(np.int64([global_seed, *parts]).tobytes()).digest()
    return int.from_bytes(h[:4], "little")


def train_step(model: BlendNet, pair: TrainingPair, optimizer, *,
               perceptual, reconstruction: str = "l1", perceptual_weight: float = 0.3,
               step: int = 0):
    """One gradient step on the objective; EMA codebook updates run inside
    the quantizers while the model is in training mode."""
    model.train()
    try:
        out, vq_losses = model(pair.input.tensor)
        total, report = compute_loss(
            out, pair.target, vq_losses,
            perceptual=perceptual,
            reconstruction=reconstruction,
            perceptual_weight=perceptual_weight,
            commitment_weight=model.config.commitment_weight,
        )
        optimizer.zero_grad(set_to_none=True)
        total.backward()
        optimizer.step()
    except NumericalError as exc:
        raise NumericalError(f"step {step}: {exc}") from exc
    return report


@dataclass
class _Clip:
    frames: FrameSequence
    landmarks: LandmarkTrack
    name: str


def _resolve_corpus(corpus, cache_dir, backend_name: str, clip_length: int) -> list[_Clip]:
    backend = get_backend(backend_name)
    clips: list[_Clip] = []
    for idx, entry in enumerate(corpus):
        if isinstance(entry, tuple):
            frames, lms = entry
            name = f"clip{idx}"
        else:
            path = Path(entry)
            frames = load_video(path)
            name = path.name
            lms = None
            if cache_dir is not None:
                cpath = cache_path(cache_dir, path)
                if cpath.exists():
                    lms = load_track(cpath)
        if lms is None:
            lms = detect_landmarks(frames, backend=backend)
        if len(frames) < clip_length:
            raise ConfigError(
                f"clip {name} has {len(frames)} frames, fewer than clip_length {clip_length}"
            )
        clips.append(_Clip(frames=frames, landmarks=lms, name=name))
    if not clips:
        raise ConfigError("training corpus is empty")
    return clips


def train_loop(
    corpus,
    model_config: ModelConfig,
    training: TrainingConfig,
    corruption: CorruptionSpec,
    checkpoint_dir,
    seed: int = 0,
    cache_dir=None,
    landmark_backend: str = "geometric",
    log_path=None,
    resume_from=None,
    tool_config: dict | None = None,
) -> list[Path]:
    """Train over a corpus of clips; returns the checkpoint paths written.

    corpus entries are video paths or (FrameSequence, LandmarkTrack) tuples.
    Corruption seeds derive from (seed, epoch, clip, window) so runs are
    reproducible and resumable at epoch granularity.
    """
    clips = _resolve_corpus(corpus, cache_dir, landmark_backend, training.clip_length)
    checkpoint_dir = Path(checkpoint_dir)
    checkpoint_dir.mkdir(parents=True, exist_ok=True)

    step = 0
    epoch = 0
    if resume_from is not None:
        payload = load_checkpoint(resume_from, expect_config=model_config)
        model = payload["model"]
        optimizer = torch.optim.Adam(model.parameters(), lr=training.learning_rate)
        if payload.get("optimizer_state"):
            optimizer.load_state_dict(payload["optimizer_state"])
        step = payload["step"]
        epoch = payload["epoch"]
        log.info("resumed from %s at step %d (epoch %d)", resume_from, step, epoch)
    else:
        model = BlendNet.build(model_config, seed=seed)
        optimizer = torch.optim.Adam(model.parameters(), lr=training.learning_rate)

    perceptual = resolve_perceptual(training.perceptual)
    restart_gen = torch.Generator().manual_seed(derive_seed(seed, 0xC0DE))
    log_file = open(log_path, "a") if log_path is not None else None
    written: list[Path] = []
    n = training.clip_length

    try:
        while step < training.steps:
            feature_pool: list[torch.Tensor] = []
            for clip_idx, clip in enumerate(clips):
                n_windows = len(clip.frames) // n
                for win in range(n_windows):
                    if step >= training.steps:
                        break
                    window = clip.frames.window(win * n, (win + 1) * n)
                    lms = LandmarkTrack(
                        points=clip.landmarks.points[win * n:(win + 1) * n],
                        confidence=clip.landmarks.confidence[win * n:(win + 1) * n],
                    )
                    pair_seed = derive_seed(seed, epoch, clip_idx, win)
                    pair = make_training_pair(
                        window, corruption, pair_seed,
                        resolution=model_config.resolution, lms=lms,
                    )
                    report = train_step(
                        model, pair, optimizer,
                        perceptual=perceptual,
                        reconstruction=training.reconstruction,
                        perceptual_weight=training.perceptual_weight,
                        step=step,
                    )
                    step += 1
                    if log_file is not None and step % training.log_every == 0:
                        record = {"step": step, "epoch": epoch, "clip": clip_idx, **report.as_dict()}
                        log_file.write(json.dumps(record) + "\n")
                        log_file.flush()
                    if step % 200 == 0 or step == training.steps:
                        log.info("step %d/%d loss %.4f", step, training.steps, report.total)
                    if len(feature_pool) < 16:
                        with torch.no_grad():
                            bottom, _ = model.encode(pair.input.tensor)
                            flat = bottom.permute(0, 2, 3, 1).reshape(-1, model_config.embedding_dim)
                            take = torch.randint(0, flat.shape[0], (256,), generator=restart_gen)
                            feature_pool.append(flat[take])
                    if step % training.checkpoint_interval == 0:
                        path = checkpoint_dir / f"step_{step:07d}.pt"
                        save_checkpoint(path, model, step=step, epoch=epoch,
                                        optimizer=optimizer, tool_config=tool_config)
                        written.append(path)
            epoch += 1
            if feature_pool:
                pool = torch.cat(feature_pool)
                for codebook in (model.codebook_top, model.codebook_bottom):
                    restarted = codebook.restart_unused(pool, generator=restart_gen)
                    if restarted:
                        log.debug("epoch %d: restarted %d codes", epoch, restarted)
    finally:
        if log_file is not None:
            log_file.close()

    final = checkpoint_dir / "final.pt"
    save_checkpoint(final, model, step=step, epoch=epoch, optimizer=optimizer, tool_config=tool_config)
    written.append(final)
    return written
