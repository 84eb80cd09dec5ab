"""Kinematic bicycle model, its affine discretization and an RK4 integrator.

State order is [x, y, theta, v]; input order is [a, delta].
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from reason_sim._shared import wrap_angle
from reason_sim.errors import SteeringSingularityError
from reason_sim.world.types import BicycleParams, ControlInput, VehicleState


@dataclass(frozen=True)
class LinearizedModel:
    """x+ = A_d x + B_d u + d_d, valid near `state`, `control`."""
    A_d: np.ndarray
    B_d: np.ndarray
    d_d: np.ndarray
    state: VehicleState
    control: ControlInput
    Ts: float

    def predict(self, x, u) -> np.ndarray:
        return self.A_d @ np.asarray(x, dtype=float) + self.B_d @ np.asarray(u, dtype=float) + self.d_d


def slip_angle(delta: float, p: BicycleParams) -> float:
    return math.atan((p.l_r / p.L) * math.tan(delta))


def _derivative(x: np.ndarray, u: np.ndarray, p: BicycleParams,
                no_reverse: bool = False) -> np.ndarray:
    _, _, theta, v = x
    a, delta = u
    if no_reverse:
        # braking stops at v = 0
        v = max(v, 0.0)
        if v == 0.0 and a < 0.0:
            a = 0.0
    if p.model == "slip_angle":
        beta = slip_angle(delta, p)
        return np.array([
            v * math.cos(theta + beta),
            v * math.sin(theta + beta),
            v / p.l_r * math.sin(beta),
            a,
        ])
    return np.array([
        v * math.cos(theta),
        v * math.sin(theta),
        v * math.tan(delta) / p.L,
        a,
    ])


def continuous_derivative(state: VehicleState, u: ControlInput, p: BicycleParams) -> np.ndarray:
    """(x_dot, y_dot, theta_dot, v_dot) for the configured bicycle variant."""
    return _derivative(state.as_array(), u.as_array(), p)


def yaw_rate(state: VehicleState, u: ControlInput, p: BicycleParams) -> float:
    return float(continuous_derivative(state, u, p)[2])


def euler_step(x, u, p: BicycleParams, Ts: float) -> np.ndarray:
    """One forward-Euler step of the rear-axle model, on raw arrays."""
    x = np.asarray(x, dtype=float)
    _, _, theta, v = x
    a, delta = u
    return x + Ts * np.array([
        v * math.cos(theta),
        v * math.sin(theta),
        v * math.tan(delta) / p.L,
        a,
    ])


def linearize_discretize(state: VehicleState, u: ControlInput, p: BicycleParams,
                         Ts: float) -> LinearizedModel:
    """First-order expansion of the Euler-discretized rear-axle model about (state, u)."""
    delta = u.delta
    if abs(delta) >= math.pi / 2:
        raise SteeringSingularityError()
    theta, v = state.theta, state.v
    c, s = math.cos(theta), math.sin(theta)
    cos2 = math.cos(delta) ** 2
    tan_d = math.tan(delta)

    A_d = np.array([
        [1.0, 0.0, -Ts * v * s, Ts * c],
        [0.0, 1.0, Ts * v * c, Ts * s],
        [0.0, 0.0, 1.0, Ts * tan_d / p.L],
        [0.0, 0.0, 0.0, 1.0],
    ])
    B_d = np.array([
        [0.0, 0.0],
        [0.0, 0.0],
        [0.0, Ts * v / (p.L * cos2)],
        [Ts, 0.0],
    ])
    d_d = np.array([
        Ts * v * theta * s,
        -Ts * v * theta * c,
        -Ts * v * delta / (p.L * cos2),
        0.0,
    ])
    return LinearizedModel(A_d=A_d, B_d=B_d, d_d=d_d, state=state, control=u, Ts=Ts)


def rk4_array(x, u, p: BicycleParams, dt: float) -> np.ndarray:
    """Classical RK4 step on a raw state array; braking never drives v below 0 inside the stages."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    k1 = _derivative(x, u, p, True)
    k2 = _derivative(x + 0.5 * dt * k1, u, p, True)
    k3 = _derivative(x + 0.5 * dt * k2, u, p, True)
    k4 = _derivative(x + dt * k3, u, p, True)
    return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def step_rk4(state: VehicleState, u: ControlInput, p: BicycleParams, dt: float) -> VehicleState:
    if not dt > 0:
        raise ValueError("dt must be > 0")
    x = rk4_array(state.as_array(), u.as_array(), p, dt)
    x[2] = wrap_angle(x[2])
    x[3] = max(0.0, x[3])
    return VehicleState.from_array(x)


def integrate(state: VehicleState, u: ControlInput, p: BicycleParams, Ts: float,
              substeps: int) -> VehicleState:
    """Advance the plant over one control period with `substeps` RK4 steps."""
    dt = Ts / substeps
    for _ in range(substeps):
        state = step_rk4(state, u, p, dt)
    return state


__all__ = [
    "LinearizedModel",
    "slip_angle",
    "continuous_derivative",
    "yaw_rate",
    "euler_step",
    "linearize_discretize",
    "rk4_array",
    "step_rk4",
    "integrate",
]
