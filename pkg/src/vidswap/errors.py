"""Exception hierarchy. Exit-code mapping lives in the CLI: config errors
exit 1, data errors 2, numerical errors 3."""


class VidswapError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(VidswapError):
    """Invalid or missing user configuration."""


class DataError(VidswapError):
    """Problem with input data (videos, landmarks, shapes, checkpoints)."""


class DecodeError(DataError):
    """Video file could not be read."""


class EmptyVideoError(DecodeError):
    """Container opened but produced zero frames."""


class NoFaceError(DataError):
    """No face detected in any frame of a video."""


class DetectionGapError(DataError):
    """Run of undetected frames too long to interpolate."""

    def __init__(self, message, frame_indices=None):
        super().__init__(message)
        self.frame_indices = list(frame_indices or [])


class GeometryError(DataError):
    """Degenerate geometry (collinear landmarks, zero-variance point set)."""


class ShapeError(DataError):
    """Tensor/array shape does not match the expected contract."""


class LengthError(DataError):
    """Frame-count mismatch between sequences."""


class TemporalContextError(DataError):
    """Temporal operation invoked with fewer than 2 frames."""


class DistortionParameterError(DataError):
    """Radial distortion parameters produce a non-invertible warp."""


class SampleCountError(DataError):
    """Too few samples to fit a distribution (e.g. FVD needs >= 2 videos)."""


class MetricError(DataError):
    """Metric could not be computed (e.g. detection failed on some frames)."""

    def __init__(self, message, frame_indices=None):
        super().__init__(message)
        self.frame_indices = list(frame_indices or [])


class CheckpointError(DataError):
    """Checkpoint missing, corrupt, or incompatible with the model config."""


class NumericalError(VidswapError):
    """NaN/Inf encountered in a numerical computation."""
