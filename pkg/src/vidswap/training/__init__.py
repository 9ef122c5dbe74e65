from .loop import TrainingConfig, derive_seed, train_loop, train_step
from .losses import (
    FeaturePerceptual,
    GradientPerceptual,
    LossReport,
    PerceptualMetric,
    ZeroPerceptual,
    compute_loss,
    psnr,
    resolve_perceptual,
)
from .pairs import TrainingPair, crop_frames, make_training_pair

__all__ = [
    "FeaturePerceptual",
    "GradientPerceptual",
    "LossReport",
    "PerceptualMetric",
    "TrainingConfig",
    "TrainingPair",
    "ZeroPerceptual",
    "compute_loss",
    "crop_frames",
    "derive_seed",
    "make_training_pair",
    "psnr",
    "resolve_perceptual",
    "train_loop",
    "train_step",
]
