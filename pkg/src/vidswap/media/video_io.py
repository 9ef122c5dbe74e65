"""Video decode/encode and the FrameSequence container.

Supported routes: mp4 (best codec the local OpenCV/ffmpeg build offers),
AVI with FFV1 (lossless), and image-sequence directories (lossless PNG).
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field
from pathlib import Path

import cv2
import numpy as np

from ..errors import DecodeError, EmptyVideoError, LengthError, ShapeError

IMAGE_EXTENSIONS = (".png", ".jpg", ".jpeg", ".bmp")


@dataclass
class FrameSequence:
    """An ordered run of equal-sized RGB frames.

    frames: (N, H, W, 3) uint8, RGB order.
    fps: frames per second, > 0.
    """

    frames: np.ndarray
    fps: float = 25.0

    def __post_init__(self):
        self.frames = np.ascontiguousarray(self.frames)
        if self.frames.ndim != 4 or self.frames.shape[-1] != 3:
            raise ShapeError(f"frames must be (N, H, W, 3), got {self.frames.shape}")
        if self.frames.dtype != np.uint8:
            raise ShapeError(f"frames must be uint8, got {self.frames.dtype}")
        if len(self.frames) < 1:
            raise EmptyVideoError("FrameSequence needs at least one frame")
        if self.fps <= 0:
            raise ShapeError(f"fps must be positive, got {self.fps}")

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def height(self) -> int:
        return self.frames.shape[1]

    @property
    def width(self) -> int:
        return self.frames.shape[2]

    def window(self, start: int, stop: int) -> "FrameSequence":
        if not (0 <= start < stop <= len(self)):
            raise LengthError(f"window [{start}, {stop}) out of range for {len(self)} frames")
        return FrameSequence(self.frames[start:stop].copy(), self.fps)

    def copy(self) -> "FrameSequence":
        return FrameSequence(self.frames.copy(), self.fps)


def _is_image_dir(path: Path) -> bool:
    return path.is_dir() or (not path.suffix and not path.exists())


def load_video(path) -> FrameSequence:
    """Decode a video file or image-sequence directory into a FrameSequence."""
    path = Path(path)
    if path.is_dir():
        return _load_image_dir(path)
    if not path.exists():
        raise DecodeError(f"video not found: {path}")
    cap = cv2.VideoCapture(str(path))
    if not cap.isOpened():
        raise DecodeError(f"could not open video: {path}")
    fps = cap.get(cv2.CAP_PROP_FPS)
    frames = []
    while True:
        ok, frame = cap.read()
        if not ok:
            break
        frames.append(frame[:, :, ::-1])  # BGR -> RGB
    cap.release()
    if not frames:
        raise EmptyVideoError(f"no frames decoded from: {path}")
    return FrameSequence(np.stack(frames).astype(np.uint8), fps if fps and fps > 0 else 25.0)


def _load_image_dir(path: Path) -> FrameSequence:
    files = sorted(p for p in path.iterdir() if p.suffix.lower() in IMAGE_EXTENSIONS)
    if not files:
        raise EmptyVideoError(f"no image frames in directory: {path}")
    frames = []
    for f in files:
        img = cv2.imread(str(f), cv2.IMREAD_COLOR)
        if img is None:
            raise DecodeError(f"unreadable frame image: {f}")
        frames.append(img[:, :, ::-1])
    fps = 25.0
    fps_file = path / "fps.txt"
    if fps_file.exists():
        fps = float(fps_file.read_text().strip())
    shapes = {f.shape for f in frames}
    if len(shapes) != 1:
        raise ShapeError(f"frames in {path} have mixed sizes: {sorted(shapes)}")
    return FrameSequence(np.stack(frames), fps)


def write_video(video: FrameSequence, path) -> None:
    """Encode a FrameSequence.

    .mp4 uses the best codec available (avc1, falling back to mp4v),
    .avi uses lossless FFV1, and a directory path writes a PNG sequence.
    """
    path = Path(path)
    if _is_image_dir(path):
        _write_image_dir(video, path)
        return
    suffix = path.suffix.lower()
    if suffix == ".mp4":
        fourccs = ["avc1", "mp4v"]
    elif suffix == ".avi":
        fourccs = ["FFV1", "MJPG"]
    else:
        raise DecodeError(f"unsupported output container: {path}")
    path.parent.mkdir(parents=True, exist_ok=True)
    h, w = video.height, video.width
    writer = None
    for name in fourccs:
        writer = cv2.VideoWriter(str(path), cv2.VideoWriter_fourcc(*name), video.fps, (w, h))
        if writer.isOpened():
            break
        writer.release()
        writer = None
    if writer is None:
        raise DecodeError(f"no working encoder for {path} (tried {fourccs})")
    try:
        for frame in video.frames:
            writer.write(np.ascontiguousarray(frame[:, :, ::-1]))
    finally:
        writer.release()
    if not path.exists() or os.path.getsize(path) == 0:
        raise DecodeError(f"encoder produced no output at {path}")


def _write_image_dir(video: FrameSequence, path: Path) -> None:
    path.mkdir(parents=True, exist_ok=True)
    for i, frame in enumerate(video.frames):
        out = path / f"frame_{i:06d}.png"
        if not cv2.imwrite(str(out), frame[:, :, ::-1]):
            raise DecodeError(f"could not write frame image: {out}")
    (path / "fps.txt").write_text(f"{video.fps}\n")


def content_hash(path) -> str:
    """Stable hash of a video's on-disk content; image dirs hash file names + bytes."""
    path = Path(path)
    h = hashlib.sha256()
    if path.is_dir():
        for f in sorted(p for p in path.iterdir() if p.suffix.lower() in IMAGE_EXTENSIONS):
            h.update(f.name.encode())
            h.update(f.read_bytes())
    else:
        if not path.exists():
            raise DecodeError(f"cannot hash missing file: {path}")
        with open(path, "rb") as fh:
            for chunk in iter(lambda: fh.read(1 << 20), b""):
                h.update(chunk)
    return h.hexdigest()
