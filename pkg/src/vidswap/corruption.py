"""Synthetic pseudo errors applied to the face foreground during training:
rotation/translation/scale, color shifts, and barrel/mustache radial
distortion, drawn per clip with small per-frame jitter."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import cv2
import numpy as np

from .errors import DistortionParameterError, ShapeError
from .media.video_io import FrameSequence

_INTERVAL = tuple[float, float]


def _check_interval(name: str, lo: float, hi: float, positive: bool = False):
    if not (np.isfinite(lo) and np.isfinite(hi)) or lo > hi:
        raise ShapeError(f"{name} interval invalid: ({lo}, {hi})")
    if positive and lo <= 0:
        raise ShapeError(f"{name} interval must be strictly positive, got ({lo}, {hi})")


@dataclass(frozen=True)
class CorruptionSpec:
    """Sampling intervals for each pseudo-error family.

    Angles in degrees, translation as a fraction of crop width, scale and
    contrast/saturation multiplicative, brightness additive on the [0, 1]
    pixel scale. per_frame_jitter scales each family's base half-range to
    get the per-frame additive jitter amplitude.
    """

    rotation_degrees: _INTERVAL = (-15.0, 15.0)
    translation_frac: _INTERVAL = (-0.05, 0.05)
    scale: _INTERVAL = (0.9, 1.1)
    brightness: _INTERVAL = (-0.2, 0.2)
    contrast: _INTERVAL = (0.8, 1.25)
    saturation: _INTERVAL = (0.8, 1.25)
    hue_degrees: _INTERVAL = (-15.0, 15.0)
    barrel_k: _INTERVAL = (-0.25, 0.0)
    mustache_k1: _INTERVAL = (0.0, 0.25)
    mustache_k2: _INTERVAL = (-0.25, 0.0)
    per_frame_jitter: float = 0.2

    def __post_init__(self):
        _check_interval("rotation_degrees", *self.rotation_degrees)
        _check_interval("translation_frac", *self.translation_frac)
        _check_interval("scale", *self.scale, positive=True)
        _check_interval("brightness", *self.brightness)
        _check_interval("contrast", *self.contrast, positive=True)
        _check_interval("saturation", *self.saturation, positive=True)
        _check_interval("hue_degrees", *self.hue_degrees)
        _check_interval("barrel_k", *self.barrel_k)
        _check_interval("mustache_k1", *self.mustache_k1)
        _check_interval("mustache_k2", *self.mustache_k2)
        if not (0.0 <= self.per_frame_jitter <= 1.0):
            raise ShapeError(f"per_frame_jitter must be in [0, 1], got {self.per_frame_jitter}")

    @staticmethod
    def identity() -> "CorruptionSpec":
        return CorruptionSpec(
            rotation_degrees=(0.0, 0.0),
            translation_frac=(0.0, 0.0),
            scale=(1.0, 1.0),
            brightness=(0.0, 0.0),
            contrast=(1.0, 1.0),
            saturation=(1.0, 1.0),
            hue_degrees=(0.0, 0.0),
            barrel_k=(0.0, 0.0),
            mustache_k1=(0.0, 0.0),
            mustache_k2=(0.0, 0.0),
            per_frame_jitter=0.0,
        )

    def with_rotation_base(self, degrees: float) -> "CorruptionSpec":
        return replace(self, rotation_degrees=(degrees, degrees))


@dataclass(frozen=True)
class ColorDeltas:
    brightness: float = 0.0
    contrast: float = 1.0
    saturation: float = 1.0
    hue_degrees: float = 0.0


@dataclass(frozen=True, eq=False)
class CorruptionSample:
    """One realized corruption: a per-clip base draw plus per-frame jitter."""

    rotation_degrees: float
    translation_frac: tuple[float, float]
    scale: float
    color: ColorDeltas
    barrel_k: float
    mustache_k1: float
    mustache_k2: float
    frame_rotation: np.ndarray     # (N,) additive degrees
    frame_translation: np.ndarray  # (N, 2) additive fraction of width
    frame_scale: np.ndarray        # (N,) additive

    def __eq__(self, other) -> bool:
        if not isinstance(other, CorruptionSample):
            return NotImplemented
        return (
            self.rotation_degrees == other.rotation_degrees
            and self.translation_frac == other.translation_frac
            and self.scale == other.scale
            and self.color == other.color
            and self.barrel_k == other.barrel_k
            and self.mustache_k1 == other.mustache_k1
            and self.mustache_k2 == other.mustache_k2
            and np.array_equal(self.frame_rotation, other.frame_rotation)
            and np.array_equal(self.frame_translation, other.frame_translation)
            and np.array_equal(self.frame_scale, other.frame_scale)
        )

    @property
    def n_frames(self) -> int:
        return len(self.frame_rotation)

    def is_identity(self) -> bool:
        return (
            self.rotation_degrees == 0.0
            and self.translation_frac == (0.0, 0.0)
            and self.scale == 1.0
            and self.color == ColorDeltas()
            and self.barrel_k == self.mustache_k1 == self.mustache_k2 == 0.0
            and not self.frame_rotation.any()
            and not self.frame_translation.any()
            and not self.frame_scale.any()
        )


def _half_range(interval: _INTERVAL) -> float:
    return 0.5 * (interval[1] - interval[0])


def sample_corruption(spec: CorruptionSpec, n_frames: int, rng_seed: int) -> CorruptionSample:
    """Draw one corruption for a clip; identical (spec, seed) gives identical draws."""
    if n_frames < 1:
        raise ShapeError(f"n_frames must be >= 1, got {n_frames}")
    rng = np.random.default_rng(rng_seed)
    base_rot = rng.uniform(*spec.rotation_degrees)
    base_trans = (rng.uniform(*spec.translation_frac), rng.uniform(*spec.translation_frac))
    base_scale = rng.uniform(*spec.scale)
    color = ColorDeltas(
        brightness=rng.uniform(*spec.brightness),
        contrast=rng.uniform(*spec.contrast),
        saturation=rng.uniform(*spec.saturation),
        hue_degrees=rng.uniform(*spec.hue_degrees),
    )
    barrel_k = rng.uniform(*spec.barrel_k)
    k1 = rng.uniform(*spec.mustache_k1)
    k2 = rng.uniform(*spec.mustache_k2)
    j = spec.per_frame_jitter
    rot_amp = j * _half_range(spec.rotation_degrees)
    trans_amp = j * _half_range(spec.translation_frac)
    scale_amp = j * _half_range(spec.scale)
    return CorruptionSample(
        rotation_degrees=float(base_rot),
        translation_frac=(float(base_trans[0]), float(base_trans[1])),
        scale=float(base_scale),
        color=color,
        barrel_k=float(barrel_k),
        mustache_k1=float(k1),
        mustache_k2=float(k2),
        frame_rotation=rng.uniform(-rot_amp, rot_amp, size=n_frames) if rot_amp > 0 else np.zeros(n_frames),
        frame_translation=rng.uniform(-trans_amp, trans_amp, size=(n_frames, 2)) if trans_amp > 0 else np.zeros((n_frames, 2)),
        frame_scale=rng.uniform(-scale_amp, scale_amp, size=n_frames) if scale_amp > 0 else np.zeros(n_frames),
    )


def radial_map_forward(r: np.ndarray, k: float, k1: float, k2: float) -> np.ndarray:
    """Destination radius for source radius r (radii normalized to half-width)."""
    r = np.asarray(r, dtype=np.float64)
    return r * (1.0 + (k + k1) * r ** 2 + k2 * r ** 4)


def check_radial_invertible(k: float, k1: float, k2: float) -> None:
    """Reject parameters whose radial map is non-monotone on [0, 1]."""
    r = np.linspace(0.0, 1.0, 2049)
    deriv = 1.0 + 3.0 * (k + k1) * r ** 2 + 5.0 * k2 * r ** 4
    if deriv.min() <= 0.0:
        raise DistortionParameterError(
            f"radial map not invertible on [0, 1] for k={k}, k1={k1}, k2={k2} "
            f"(min derivative {deriv.min():.4f})"
        )


def radial_distort(frame: np.ndarray, k: float, k1: float, k2: float) -> np.ndarray:
    """Barrel/mustache warp by inverse mapping with bilinear sampling.

    Barrel uses k < 0 with k1 = k2 = 0; mustache uses k = 0 and k1, k2 of
    opposite signs. Out-of-bounds samples fill with zero.
    """
    if frame.shape[0] != frame.shape[1]:
        raise ShapeError(f"radial_distort expects a square frame, got {frame.shape[:2]}")
    if k == 0.0 and k1 == 0.0 and k2 == 0.0:
        return frame.copy()
    check_radial_invertible(k, k1, k2)
    size = frame.shape[0]
    half = (size - 1) / 2.0

    # invert the forward map on a dense monotone table out to the corners
    r_src = np.linspace(0.0, np.sqrt(2.0) + 0.05, 4096)
    r_dst = radial_map_forward(r_src, k, k1, k2)
    increasing = np.diff(r_dst) > 0
    cut = len(r_dst) if increasing.all() else int(np.argmin(increasing)) + 1
    r_src, r_dst = r_src[:cut], r_dst[:cut]

    ys, xs = np.mgrid[0:size, 0:size].astype(np.float64)
    u = (xs - half) / half
    v = (ys - half) / half
    rd = np.hypot(u, v)
    rs = np.interp(rd, r_dst, r_src, right=np.inf)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(rd > 0, rs / rd, 1.0)
    map_x = (u * ratio * half + half).astype(np.float32)
    map_y = (v * ratio * half + half).astype(np.float32)
    return cv2.remap(frame, map_x, map_y, cv2.INTER_LINEAR, borderMode=cv2.BORDER_CONSTANT, borderValue=0)


def color_perturb(frame: np.ndarray, deltas: ColorDeltas) -> np.ndarray:
    """Brightness (additive), contrast (about the channel mean), and
    HSV-space saturation/hue adjustments, clamped to [0, 255]."""
    out = frame.astype(np.float32) / 255.0
    if deltas.saturation != 1.0 or deltas.hue_degrees != 0.0:
        hsv = cv2.cvtColor(out, cv2.COLOR_RGB2HSV)
        hsv[..., 0] = np.mod(hsv[..., 0] + deltas.hue_degrees, 360.0)
        hsv[..., 1] = np.clip(hsv[..., 1] * deltas.saturation, 0.0, 1.0)
        out = cv2.cvtColor(hsv, cv2.COLOR_HSV2RGB)
    if deltas.contrast != 1.0:
        mean = out.reshape(-1, 3).mean(axis=0)
        out = mean + (out - mean) * deltas.contrast
    if deltas.brightness != 0.0:
        out = out + deltas.brightness
    return np.clip(np.rint(out * 255.0), 0, 255).astype(np.uint8)


def frame_affine(sample: CorruptionSample, index: int, size: int) -> np.ndarray:
    """2x3 warp matrix (about the crop center) for one frame of the sample."""
    rot = sample.rotation_degrees + float(sample.frame_rotation[index])
    scale = sample.scale + float(sample.frame_scale[index])
    tx = (sample.translation_frac[0] + float(sample.frame_translation[index, 0])) * size
    ty = (sample.translation_frac[1] + float(sample.frame_translation[index, 1])) * size
    center = ((size - 1) / 2.0, (size - 1) / 2.0)
    # getRotationMatrix2D treats positive angles as counter-clockwise in image
    # coordinates; negate so positive sample rotation is clockwise on screen,
    # matching the rest of the geometry module (+v down).
    mat = cv2.getRotationMatrix2D(center, -rot, scale)
    mat[0, 2] += tx
    mat[1, 2] += ty
    return mat


def apply_corruption(f: FrameSequence, sample: CorruptionSample, mask: np.ndarray | None = None):
    """Corrupt a foreground sequence: geometric warp, then radial distortion,
    then color. The mask, when given, is transported by the same geometric
    warp and returned alongside.

    Returns the corrupted FrameSequence, or (FrameSequence, mask) when a
    mask is supplied.
    """
    if sample.n_frames != len(f):
        raise ShapeError(f"sample has {sample.n_frames} frames, video has {len(f)}")
    check_radial_invertible(sample.barrel_k, sample.mustache_k1, sample.mustache_k2)
    size = f.height
    if f.width != size:
        raise ShapeError(f"foreground frames must be square, got {f.height}x{f.width}")
    out = np.empty_like(f.frames)
    out_mask = None if mask is None else np.empty_like(mask)
    geometric_identity = (
        sample.rotation_degrees == 0.0 and sample.scale == 1.0
        and sample.translation_frac == (0.0, 0.0)
        and not sample.frame_rotation.any() and not sample.frame_scale.any()
        and not sample.frame_translation.any()
    )
    radial_identity = sample.barrel_k == 0.0 and sample.mustache_k1 == 0.0 and sample.mustache_k2 == 0.0
    for i in range(len(f)):
        frame = f.frames[i]
        if not geometric_identity:
            mat = frame_affine(sample, i, size)
            frame = cv2.warpAffine(frame, mat, (size, size), flags=cv2.INTER_LINEAR,
                                   borderMode=cv2.BORDER_CONSTANT, borderValue=0)
            if out_mask is not None:
                out_mask[i] = cv2.warpAffine(mask[i], mat, (size, size), flags=cv2.INTER_LINEAR,
                                             borderMode=cv2.BORDER_CONSTANT, borderValue=0)
        elif out_mask is not None:
            out_mask[i] = mask[i]
        if not radial_identity:
            frame = radial_distort(frame, sample.barrel_k, sample.mustache_k1, sample.mustache_k2)
            if out_mask is not None:
                out_mask[i] = radial_distort(out_mask[i], sample.barrel_k, sample.mustache_k1, sample.mustache_k2)
        out[i] = color_perturb(frame, sample.color)
    corrupted = FrameSequence(out, f.fps)
    if mask is None:
        return corrupted
    return corrupted, out_mask
