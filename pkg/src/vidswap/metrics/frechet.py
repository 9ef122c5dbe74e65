"""Frechet distance between feature Gaussians and the video-set metric."""

from __future__ import annotations

import numpy as np

from ..errors import NumericalError, SampleCountError, ShapeError
from ..media.video_io import FrameSequence
from .backends import VideoFeatureBackend, get_video_backend

EIG_TOLERANCE = -1e-8


def _sqrt_psd(matrix: np.ndarray, label: str) -> np.ndarray:
    values, vectors = np.linalg.eigh(matrix)
    if values.min() < EIG_TOLERANCE:
        raise NumericalError(
            f"{label} has eigenvalue {values.min():.3e} below tolerance {EIG_TOLERANCE}"
        )
    values = np.clip(values, 0.0, None)
    return (vectors * np.sqrt(values)) @ vectors.T


def frechet_distance(mu1, sigma1, mu2, sigma2) -> float:
    """|mu1-mu2|^2 + Tr(S1 + S2 - 2 (S1 S2)^{1/2}).

    The matrix square root goes through the symmetric form
    (S1^{1/2} S2 S1^{1/2})^{1/2} via eigendecomposition, clamping
    eigenvalues above -1e-8 to zero.
    """
    mu1 = np.asarray(mu1, dtype=np.float64).ravel()
    mu2 = np.asarray(mu2, dtype=np.float64).ravel()
    sigma1 = np.atleast_2d(np.asarray(sigma1, dtype=np.float64))
    sigma2 = np.atleast_2d(np.asarray(sigma2, dtype=np.float64))
    d = mu1.shape[0]
    if mu2.shape[0] != d or sigma1.shape != (d, d) or sigma2.shape != (d, d):
        raise ShapeError(
            f"dimension mismatch: mu {mu1.shape}/{mu2.shape}, sigma {sigma1.shape}/{sigma2.shape}"
        )
    for name, sigma in (("sigma1", sigma1), ("sigma2", sigma2)):
        if not np.allclose(sigma, sigma.T, atol=1e-8):
            raise ShapeError(f"{name} is not symmetric")
    root1 = _sqrt_psd(sigma1, "sigma1")
    inner = root1 @ sigma2 @ root1
    inner = 0.5 * (inner + inner.T)
    values = np.linalg.eigh(inner)[0]
    if values.min() < EIG_TOLERANCE:
        raise NumericalError(
            f"cross term has eigenvalue {values.min():.3e} below tolerance {EIG_TOLERANCE}"
        )
    trace_sqrt = float(np.sqrt(np.clip(values, 0.0, None)).sum())
    diff = mu1 - mu2
    value = float(diff @ diff + np.trace(sigma1) + np.trace(sigma2) - 2.0 * trace_sqrt)
    return max(value, 0.0)


def fit_gaussian(features: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 2 or features.shape[0] < 2:
        raise SampleCountError(
            f"need at least 2 feature vectors to fit a Gaussian, got {features.shape}"
        )
    mu = features.mean(axis=0)
    sigma = np.cov(features, rowvar=False)
    return mu, np.atleast_2d(sigma)


def fvd(real: list[FrameSequence], generated: list[FrameSequence],
        backend: VideoFeatureBackend | None = None) -> float:
    """Frechet distance between Gaussians fit to per-video features."""
    if len(real) < 2 or len(generated) < 2:
        raise SampleCountError(
            f"fvd needs >= 2 videos per set, got {len(real)} real / {len(generated)} generated"
        )
    if backend is None:
        backend = get_video_backend()
    feats_real = np.stack([backend.extract(v) for v in real])
    feats_gen = np.stack([backend.extract(v) for v in generated])
    mu_r, sig_r = fit_gaussian(feats_real)
    mu_g, sig_g = fit_gaussian(feats_gen)
    return frechet_distance(mu_r, sig_r, mu_g, sig_g)
