"""Value types shared by every layer of the simulator."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np

from reason_sim import config
from reason_sim._shared import wrap_angle
from reason_sim.errors import ConfigError


def _require(condition: bool, message: str):
    if not condition:
        raise ConfigError(message)


def _finite(*values: float) -> bool:
    return all(math.isfinite(v) for v in values)


@dataclass(frozen=True)
class VehicleState:
    """Ego pose and speed; the reference point is the rear-axle centre."""
    x: float
    y: float
    theta: float
    v: float

    def __post_init__(self):
        _require(_finite(self.x, self.y, self.theta, self.v), "vehicle state must be finite")
        _require(-math.pi < self.theta <= math.pi, "theta must lie in (-pi, pi]")
        _require(self.v >= 0.0, "v must be >= 0")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.theta, self.v], dtype=float)

    @classmethod
    def from_array(cls, arr) -> "VehicleState":
        """Build a state from [x, y, theta, v], wrapping theta and clamping v at 0."""
        x, y, theta, v = (float(a) for a in arr)
        return cls(x, y, wrap_angle(theta), max(0.0, v))


@dataclass(frozen=True)
class ControlInput:
    a: float = 0.0
    delta: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.delta], dtype=float)


@dataclass(frozen=True)
class BicycleParams:
    L: float = config.WHEELBASE
    l_r: float = config.REAR_TO_CG
    a_min: float = config.ACCEL_MIN
    a_max: float = config.ACCEL_MAX
    delta_max: float = config.STEER_MAX
    Ts: float = config.TS
    model: str = config.VEHICLE_MODEL

    def __post_init__(self):
        _require(self.L > 0, "L must be > 0")
        _require(0 < self.l_r < self.L, "l_r must satisfy 0 < l_r < L")
        _require(self.a_min < 0 < self.a_max, "acceleration bounds must satisfy a_min < 0 < a_max")
        _require(0 < self.delta_max < math.pi / 2, "delta_max must lie in (0, pi/2)")
        _require(self.Ts > 0, "Ts must be > 0")
        _require(self.model in ("rear_axle", "slip_angle"),
                 "model must be 'rear_axle' or 'slip_angle'")

    @property
    def delta_min(self) -> float:
        return -self.delta_max

    @property
    def max_curvature(self) -> float:
        return math.tan(self.delta_max) / self.L

    def lower_bounds(self) -> np.ndarray:
        return np.array([self.a_min, self.delta_min])

    def upper_bounds(self) -> np.ndarray:
        return np.array([self.a_max, self.delta_max])

    def clamp(self, u: ControlInput) -> ControlInput:
        return ControlInput(
            a=min(max(u.a, self.a_min), self.a_max),
            delta=min(max(u.delta, self.delta_min), self.delta_max),
        )


class Lane(str, Enum):
    RIGHT = "Right"
    LEFT = "Left"
    CENTERLINE = "Centerline"


@dataclass(frozen=True)
class RoadGeometry:
    """Straight two-lane road along +x; the ego's legal lane lies below the centerline."""
    lane_width: float = config.LANE_WIDTH
    centerline_y: float = config.CENTERLINE_Y
    road_length: float = config.ROAD_LENGTH

    def __post_init__(self):
        _require(self.lane_width > 0, "lane_width must be > 0")
        _require(self.road_length > 0, "road_length must be > 0")
        _require(_finite(self.centerline_y), "centerline_y must be finite")

    @property
    def right_lane(self) -> Tuple[float, float]:
        return (self.centerline_y - self.lane_width, self.centerline_y)

    @property
    def left_lane(self) -> Tuple[float, float]:
        return (self.centerline_y, self.centerline_y + self.lane_width)

    @property
    def y_min(self) -> float:
        return self.centerline_y - self.lane_width

    @property
    def y_max(self) -> float:
        return self.centerline_y + self.lane_width

    def contains(self, x: float, y: float) -> bool:
        return 0.0 <= x <= self.road_length and self.y_min <= y <= self.y_max


@dataclass(frozen=True)
class CyclistState:
    x: float
    y: float
    v: float = config.CYCLIST_SPEED

    def __post_init__(self):
        _require(_finite(self.x, self.y, self.v), "cyclist state must be finite")
        _require(self.v >= 0.0, "cyclist speed must be >= 0")


@dataclass(frozen=True)
class Goal:
    x: float = config.GOAL[0]
    y: float = config.GOAL[1]
    tolerance: float = config.GOAL_TOLERANCE

    def __post_init__(self):
        _require(self.tolerance > 0, "goal tolerance must be > 0")

    def reached(self, x: float, y: float) -> bool:
        return math.hypot(x - self.x, y - self.y) <= self.tolerance


__all__ = [
    "VehicleState",
    "ControlInput",
    "BicycleParams",
    "Lane",
    "RoadGeometry",
    "CyclistState",
    "Goal",
]
