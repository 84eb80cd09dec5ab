"""Shared imports and small numeric helpers for the reason_sim package."""
from __future__ import annotations

import math

import matplotlib
import numpy as np

matplotlib.use("Agg")

from matplotlib.figure import Figure  # noqa: E402  (backend must be chosen first)

# Pinned so repeated exports of the same run are byte-identical.
matplotlib.rcParams["svg.hashsalt"] = "reason_sim"
matplotlib.rcParams["svg.fonttype"] = "none"


def wrap_angle(angle: float) -> float:
    """Map an angle onto (-pi, pi]."""
    wrapped = math.remainder(angle, 2.0 * math.pi)
    if wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    return wrapped


def wrap_angles(angles):
    """Vectorised wrap_angle for numpy arrays."""
    arr = np.asarray(angles, dtype=float)
    out = np.remainder(arr + np.pi, 2.0 * np.pi) - np.pi
    return np.where(out <= -np.pi, out + 2.0 * np.pi, out)


__all__ = ["Figure", "wrap_angle", "wrap_angles"]
