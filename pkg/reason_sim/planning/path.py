"""Reference paths handed from the planner to the tracking controller."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np

from reason_sim import config

PROJECTION_LOOKAHEAD = 20.0   # m searched ahead of the current progress


@dataclass(frozen=True, eq=False)
class ReferencePath:
    """Ordered (x, y, theta, v_ref) samples; `s` holds the cumulative arc length."""
    id: int
    samples: np.ndarray
    s: np.ndarray = field(init=False, repr=False, compare=False)
    _theta_unwrapped: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 2 or samples.shape[1] != 4 or len(samples) == 0:
            raise ValueError("reference path needs an (n, 4) array of samples")
        steps = np.hypot(np.diff(samples[:, 0]), np.diff(samples[:, 1]))
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "s", np.concatenate([[0.0], np.cumsum(steps)]))
        object.__setattr__(self, "_theta_unwrapped", np.unwrap(samples[:, 2]))

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def total_length(self) -> float:
        return float(self.s[-1])

    @property
    def end(self) -> Tuple[float, float]:
        return float(self.samples[-1, 0]), float(self.samples[-1, 1])

    @classmethod
    def from_poses(cls, path_id: int, poses: Sequence[Tuple[float, float, float]],
                   v_max: float = config.V_MAX, ramp_decel: float = config.RAMP_DECEL) -> "ReferencePath":
        """Attach a speed profile: v_max, ramping down to rest at the last pose."""
        poses = np.asarray(poses, dtype=float).reshape(-1, 3)
        steps = np.hypot(np.diff(poses[:, 0]), np.diff(poses[:, 1]))
        s = np.concatenate([[0.0], np.cumsum(steps)])
        remaining = s[-1] - s
        v_ref = np.minimum(v_max, np.sqrt(2.0 * ramp_decel * remaining))
        return cls(path_id, np.column_stack([poses, v_ref]))

    def project(self, x: float, y: float, progress: int = 0) -> Tuple[int, float]:
        """Nearest sample at or after `progress` and the arc length of the projected point."""
        progress = min(max(progress, 0), len(self) - 1)
        stop = int(np.searchsorted(self.s, self.s[progress] + PROJECTION_LOOKAHEAD, side="right"))
        stop = max(stop, progress + 1)
        seg = self.samples[progress:stop]
        d2 = (seg[:, 0] - x) ** 2 + (seg[:, 1] - y) ** 2
        idx = progress + int(np.argmin(d2))
        theta = self.samples[idx, 2]
        along = (x - self.samples[idx, 0]) * math.cos(theta) + (y - self.samples[idx, 1]) * math.sin(theta)
        lo = self.s[max(idx - 1, progress)]
        hi = self.s[min(idx + 1, len(self) - 1)]
        return idx, float(min(max(self.s[idx] + along, lo), hi))

    def interpolate(self, s_query) -> np.ndarray:
        """Samples at arc lengths `s_query`, clamped to the path ends; theta is unwrapped."""
        s_query = np.clip(np.asarray(s_query, dtype=float), 0.0, self.total_length)
        if len(self) == 1:
            return np.repeat(self.samples, len(s_query), axis=0)
        cols = (self.samples[:, 0], self.samples[:, 1], self._theta_unwrapped, self.samples[:, 3])
        return np.column_stack([np.interp(s_query, self.s, c) for c in cols])

    def window(self, s0: float, N: int, Ts: float, speed_cap: float = math.inf) -> np.ndarray:
        """N+1 reference samples spaced in time by Ts, advancing at the capped v_ref.

        Past the end of the path the final sample repeats.
        """
        s_values = np.empty(N + 1)
        s_values[0] = s0
        for k in range(N):
            v = min(float(np.interp(s_values[k], self.s, self.samples[:, 3])), speed_cap)
            s_values[k + 1] = min(s_values[k] + max(v, 0.0) * Ts, self.total_length)
        window = self.interpolate(s_values)
        window[:, 3] = np.minimum(window[:, 3], max(speed_cap, 0.0))
        return window

    def rows(self):
        """(path_id, x, y, theta, v_ref) tuples for CSV export."""
        for x, y, theta, v in self.samples:
            yield self.id, float(x), float(y), float(theta), float(v)


__all__ = ["ReferencePath", "PROJECTION_LOOKAHEAD"]
