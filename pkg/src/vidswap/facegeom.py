"""Canonical geometry and color conventions for the built-in face family.

The synthetic renderer draws faces from this template and the default
landmark backend inverts it from image evidence, so both sides must agree
on the layout. Landmark index convention is the standard 68-point one:
0-16 jaw perimeter, 17-26 brows, 27-35 nose, 36-47 eyes, 48-67 mouth.

Local face coordinates: origin at the face-ellipse center, +u to the
image right, +v DOWN, so an upright face has its chin at +v.
"""

from __future__ import annotations

import numpy as np

# Feature placement as fractions of the face semi-axes (a horizontal, b vertical).
EYE_U = 0.45          # eye centers at u = +/- EYE_U * a
EYE_V = -0.30         # eye line height
EYE_RX = 0.16         # eye half-width / a
EYE_RY = 0.10         # eye half-height / b (fully open)
BROW_V = -0.46
BROW_HALF_U = 0.18
BROW_ARCH = 0.04
NOSE_TOP_V = -0.25
NOSE_TIP_V = 0.05
NOSE_ROW_V = 0.12
NOSE_ROW_U = 0.10
MOUTH_V = 0.45        # mouth center height
MOUTH_RX = 0.32       # outer lip half-width / a
MOUTH_RY0 = 0.10      # outer lip half-height / b, closed
MOUTH_RY_OPEN = 0.12  # extra outer half-height at full openness
INNER_RX = 0.22
INNER_RY0 = 0.015
INNER_RY_OPEN = 0.10

JAW_START_DEG = 190.0  # ellipse angle of jaw point 0 (image-left, above mid)
JAW_SWEEP_DEG = 200.0  # sweep down through the chin (90 deg) to point 16

# Hue windows (degrees, OpenCV float HSV convention H in [0, 360)) that the
# default detector relies on. Synthetic identities must keep their colors
# inside these bands even after the corruption module's +/-15 deg hue shifts.
SKIN_HUE = (0.0, 52.0)
SKIN_SAT = (0.12, 0.95)
SKIN_VAL_MIN = 0.30
LIP_HUE = (293.0, 357.0)
LIP_SAT_MIN = 0.25
DARK_VAL_MAX = 0.45
BACKGROUND_HUE = (80.0, 280.0)  # safe band for backgrounds/props

_EYE_ANGLES = np.deg2rad([180.0, 230.0, 310.0, 0.0, 50.0, 130.0])
_OUTER_LIP_ANGLES = np.deg2rad([180.0, 210.0, 240.0, 270.0, 300.0, 330.0, 0.0, 30.0, 60.0, 90.0, 120.0, 150.0])
_INNER_LIP_ANGLES = np.deg2rad([180.0, 225.0, 270.0, 315.0, 0.0, 45.0, 90.0, 135.0])


def mouth_outer_ry(b: float, mouth_open: float) -> float:
    return (MOUTH_RY0 + 0.5 * MOUTH_RY_OPEN * mouth_open) * b


def mouth_inner_ry(b: float, mouth_open: float) -> float:
    return (INNER_RY0 + INNER_RY_OPEN * mouth_open) * b


def face_template(a: float, b: float, mouth_open: float = 0.0, eye_open: float = 1.0) -> np.ndarray:
    """68 landmark positions in local face coordinates for semi-axes (a, b)."""
    pts = np.zeros((68, 2), dtype=np.float64)

    jaw_angles = np.deg2rad(JAW_START_DEG - np.arange(17) * (JAW_SWEEP_DEG / 16.0))
    pts[0:17, 0] = a * np.cos(jaw_angles)
    pts[0:17, 1] = b * np.sin(jaw_angles)

    for side, base in ((-1.0, 17), (1.0, 22)):
        us = side * EYE_U * a + np.linspace(-BROW_HALF_U, BROW_HALF_U, 5) * a
        arch = BROW_ARCH * b * np.array([0.0, 0.7, 1.0, 0.7, 0.0])
        pts[base:base + 5, 0] = us
        pts[base:base + 5, 1] = BROW_V * b - arch

    pts[27:31, 0] = 0.0
    pts[27:31, 1] = np.linspace(NOSE_TOP_V, NOSE_TIP_V, 4) * b
    pts[31:36, 0] = np.linspace(-NOSE_ROW_U, NOSE_ROW_U, 5) * a
    pts[31:36, 1] = NOSE_ROW_V * b

    ry = EYE_RY * b * max(eye_open, 0.05)
    for side, base in ((-1.0, 36), (1.0, 42)):
        cx = side * EYE_U * a
        pts[base:base + 6, 0] = cx + EYE_RX * a * np.cos(_EYE_ANGLES)
        pts[base:base + 6, 1] = EYE_V * b + ry * np.sin(_EYE_ANGLES)

    ry_out = mouth_outer_ry(b, mouth_open)
    pts[48:60, 0] = MOUTH_RX * a * np.cos(_OUTER_LIP_ANGLES)
    pts[48:60, 1] = MOUTH_V * b + ry_out * np.sin(_OUTER_LIP_ANGLES)
    ry_in = mouth_inner_ry(b, mouth_open)
    pts[60:68, 0] = INNER_RX * a * np.cos(_INNER_LIP_ANGLES)
    pts[60:68, 1] = MOUTH_V * b + ry_in * np.sin(_INNER_LIP_ANGLES)

    return pts


def local_to_image(points: np.ndarray, center, scale: float, roll: float) -> np.ndarray:
    """Map local face coordinates to image pixels (rotation positive clockwise
    on screen because +v points down)."""
    c, s = np.cos(roll), np.sin(roll)
    rot = np.array([[c, -s], [s, c]])
    return np.asarray(points) @ (scale * rot).T + np.asarray(center, dtype=np.float64)


def eye_centers(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(negative-u eye, positive-u eye) centers from a 68-point set."""
    pts = np.asarray(points)
    return pts[36:42].mean(axis=0), pts[42:48].mean(axis=0)
