"""Similarity-normalized landmark distance.

Each frame's landmarks are centered at their centroid, rotated so the
eye-line angle matches the mean face, and scaled to the mean-face
inter-ocular distance; the metric is the mean Euclidean distance over
landmark indices 17-67 (the 0-16 jaw perimeter is excluded), averaged
over frames.
"""

from __future__ import annotations

import numpy as np

from .. import facegeom as fg
from ..errors import GeometryError, LengthError
from ..media.landmarks import LandmarkTrack

INCLUDED = slice(17, 68)


def canonical_mean_face() -> np.ndarray:
    """Neutral template with horizontal eye line and inter-ocular distance 1."""
    a = 1.0 / (2.0 * fg.EYE_U)
    pts = fg.face_template(a, 1.45 * a, mouth_open=0.0)
    return pts - pts.mean(axis=0)


def _eye_frame(points: np.ndarray):
    eye_a, eye_b = fg.eye_centers(points)
    delta = eye_b - eye_a
    dist = float(np.hypot(*delta))
    if dist < 1e-9:
        raise GeometryError("degenerate eye landmarks: zero inter-ocular distance")
    return float(np.arctan2(delta[1], delta[0])), dist


def normalize_landmarks(points: np.ndarray, mean_face: np.ndarray) -> np.ndarray:
    """Center, rotate to the mean-face eye angle, scale to its inter-ocular
    distance."""
    mean_angle, mean_dist = _eye_frame(mean_face)
    angle, dist = _eye_frame(points)
    rot = mean_angle - angle
    c, s = np.cos(rot), np.sin(rot)
    centered = points - points.mean(axis=0)
    rotated = centered @ np.array([[c, s], [-s, c]])  # row vectors
    return rotated * (mean_dist / dist)


def compute_mean_face(tracks: list[LandmarkTrack]) -> np.ndarray:
    """Average landmark configuration over an evaluation corpus, in the
    canonical frame (horizontal eye line, unit inter-ocular distance)."""
    canon = canonical_mean_face()
    acc = np.zeros((68, 2))
    count = 0
    for track in tracks:
        for pts in track.points:
            acc += normalize_landmarks(pts, canon)
            count += 1
    if count == 0:
        raise GeometryError("mean face needs at least one landmark frame")
    return acc / count


def lmd(lms_a: LandmarkTrack, lms_b: LandmarkTrack,
        mean_face: np.ndarray | None = None,
        return_trace: bool = False):
    """Mean normalized landmark distance between two tracks."""
    if len(lms_a) != len(lms_b):
        raise LengthError(f"tracks differ in length: {len(lms_a)} vs {len(lms_b)}")
    if mean_face is None:
        mean_face = canonical_mean_face()
    trace = np.empty(len(lms_a))
    for i in range(len(lms_a)):
        na = normalize_landmarks(lms_a.points[i], mean_face)
        nb = normalize_landmarks(lms_b.points[i], mean_face)
        trace[i] = float(np.linalg.norm(na[INCLUDED] - nb[INCLUDED], axis=1).mean())
    value = float(trace.mean())
    if return_trace:
        return value, trace
    return value
