"""Linear time-varying MPC that tracks a ReferencePath.

The prediction model is the affine discretization of the rear-axle bicycle,
linearized at each reference sample of the window with zero nominal input.
States are substituted out so the problem left for the solver is a dense QP
over the stacked input sequence [a_0, delta_0, ..., a_{N-1}, delta_{N-1}].
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from reason_sim import config
from reason_sim._shared import wrap_angle
from reason_sim.control.dynamics import LinearizedModel, linearize_discretize
from reason_sim.control.qp import BoxQp, solve_box_qp
from reason_sim.errors import ConfigError, ReferenceExhaustedError
from reason_sim.planning.path import ReferencePath
from reason_sim.world.types import BicycleParams, ControlInput, CyclistState, RoadGeometry, VehicleState

NX = 4
NU = 2


def _psd(m: np.ndarray) -> bool:
    return bool(np.all(np.linalg.eigvalsh(0.5 * (m + m.T)) >= -1e-12))


def _stage_matrix(q_perp: float, q_par: float, q_thetav: np.ndarray) -> np.ndarray:
    return linalg.block_diag(q_perp, q_par, q_thetav)


@dataclass(frozen=True, eq=False)
class MpcWeights:
    """Weights on the error vector [e_perp, e_par, e_theta, e_v] and on the inputs."""
    N: int = config.HORIZON
    Q_perp: float = config.Q_PERP
    Q_par: float = config.Q_PAR
    Q_thetav: np.ndarray = field(default_factory=lambda: np.diag([config.Q_THETA, config.Q_V]))
    R: np.ndarray = field(default_factory=lambda: np.diag([config.R_ACCEL, config.R_STEER]))
    R_d: np.ndarray = field(default_factory=lambda: np.diag([config.RD_ACCEL, config.RD_STEER]))
    Q_f: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.Q_f is None:
            object.__setattr__(self, "Q_f", config.TERMINAL_SCALE * self.stage)
        if self.N < 2:
            raise ConfigError("N must be >= 2")
        if self.Q_perp < 0 or self.Q_par < 0:
            raise ConfigError("Q_perp and Q_par must be >= 0")
        for name, shape in (("Q_thetav", (2, 2)), ("R", (2, 2)), ("R_d", (2, 2)), ("Q_f", (4, 4))):
            m = np.asarray(getattr(self, name), dtype=float)
            if m.shape != shape:
                raise ConfigError(f"{name} must be {shape[0]}x{shape[1]}")
            if not _psd(m):
                raise ConfigError(f"{name} must be positive semi-definite")
            object.__setattr__(self, name, m)
        if not np.all(np.linalg.eigvalsh(self.R) > 0):
            raise ConfigError("R must be positive definite")

    @property
    def stage(self) -> np.ndarray:
        return _stage_matrix(self.Q_perp, self.Q_par, self.Q_thetav)

    def scaled(self, factor: float) -> "MpcWeights":
        return MpcWeights(
            N=self.N,
            Q_perp=self.Q_perp * factor,
            Q_par=self.Q_par * factor,
            Q_thetav=self.Q_thetav * factor,
            R=self.R * factor,
            R_d=self.R_d * factor,
            Q_f=self.Q_f * factor,
        )


@dataclass(frozen=True)
class MpcSettings:
    tol: float = config.QP_TOL
    max_iter: int = config.QP_MAX_ITER
    regularization: float = config.QP_REGULARIZATION
    d_stop: float = config.GUARD_D_STOP
    k_gap: float = config.GUARD_K_GAP

    def __post_init__(self):
        if not self.tol > 0:
            raise ConfigError("tol must be > 0")
        if self.max_iter < 1:
            raise ConfigError("max_iter must be >= 1")
        if self.regularization < 0:
            raise ConfigError("regularization must be >= 0")
        if self.d_stop < 0:
            raise ConfigError("d_stop must be >= 0")
        if not self.k_gap > 0:
            raise ConfigError("k_gap must be > 0")


@dataclass(frozen=True, eq=False)
class QpProblem:
    """Condensed tracking QP plus the affine map from inputs to predicted states."""
    box: BoxQp
    constant: float
    prediction: np.ndarray       # (N+1)*4 x 2N
    free_response: np.ndarray    # (N+1)*4
    horizon: int

    def predict(self, U: np.ndarray) -> np.ndarray:
        return (self.prediction @ U + self.free_response).reshape(self.horizon + 1, NX)

    def cost(self, U: np.ndarray) -> float:
        """Full tracking objective, including the terms that do not depend on U."""
        return self.box.objective(U) + self.constant


@dataclass(frozen=True, eq=False)
class MpcSolution:
    controls: np.ndarray      # N x 2
    states: np.ndarray        # (N+1) x 4
    objective: float
    kkt_residual: float
    iterations: int
    converged: bool
    status: str

    @property
    def first(self) -> ControlInput:
        return ControlInput(float(self.controls[0, 0]), float(self.controls[0, 1]))


def _error_map(theta_ref: float) -> np.ndarray:
    """Rows give [e_perp, e_par, e_theta, e_v] from the state deviation."""
    c, s = math.cos(theta_ref), math.sin(theta_ref)
    return np.array([
        [-s, c, 0.0, 0.0],
        [c, s, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ])


def compute_errors(state: VehicleState, ref_sample) -> Tuple[float, float, Tuple[float, float]]:
    """Tracking errors in the reference frame: (e_perp, e_par, (e_theta, e_v))."""
    x_ref, y_ref, theta_ref, v_ref = (float(v) for v in ref_sample[:4])
    dx, dy = state.x - x_ref, state.y - y_ref
    c, s = math.cos(theta_ref), math.sin(theta_ref)
    e_perp = -s * dx + c * dy
    e_par = c * dx + s * dy
    return e_perp, e_par, (wrap_angle(state.theta - theta_ref), state.v - v_ref)


def _align_headings(theta0: float, window: np.ndarray) -> np.ndarray:
    """Unwrap reference headings onto the branch of the current heading."""
    window = np.array(window, dtype=float, copy=True)
    window[:, 2] = np.unwrap(np.concatenate([[theta0], window[:, 2]]))[1:]
    return window


def linearize_window(window: np.ndarray, p: BicycleParams, N: int) -> Sequence[LinearizedModel]:
    """Models x_{k+1} = A_k x_k + B_k u_k + d_k at each reference sample, zero nominal input."""
    models = []
    zero = ControlInput(0.0, 0.0)
    for k in range(N):
        x_ref, y_ref, theta_ref, v_ref = window[k]
        # VehicleState insists on a wrapped heading; the expansion point keeps the unwrapped one
        ref = VehicleState(float(x_ref), float(y_ref), wrap_angle(float(theta_ref)), max(0.0, float(v_ref)))
        model = linearize_discretize(ref, zero, p, p.Ts)
        shift = float(theta_ref) - ref.theta
        if shift:
            d_d = model.d_d - (model.A_d[:, 2] - np.eye(NX)[:, 2]) * shift
            model = LinearizedModel(model.A_d, model.B_d, d_d, ref, zero, p.Ts)
        models.append(model)
    return models


def build_qp(x0: VehicleState, window: np.ndarray, models: Sequence[LinearizedModel],
             w: MpcWeights, u_prev: ControlInput, p: BicycleParams,
             regularization: float = config.QP_REGULARIZATION) -> QpProblem:
    """Condense the horizon cost into 0.5 U'HU + g'U + constant under box bounds."""
    N = w.N
    window = np.asarray(window, dtype=float)
    if len(window) < N + 1 or len(models) < N:
        raise ReferenceExhaustedError()
    window = _align_headings(x0.theta, window[:N + 1])
    nU = NU * N

    gamma = np.zeros(((N + 1) * NX, nU))
    free = np.zeros((N + 1) * NX)
    free[:NX] = x0.as_array()
    for k in range(N):
        m = models[k]
        rows, nxt = slice(k * NX, (k + 1) * NX), slice((k + 1) * NX, (k + 2) * NX)
        gamma[nxt] = m.A_d @ gamma[rows]
        gamma[nxt, k * NU:(k + 1) * NU] += m.B_d
        free[nxt] = m.A_d @ free[rows] + m.d_d

    H = np.zeros((nU, nU))
    g = np.zeros(nU)
    constant = 0.0
    stage = w.stage
    for k in range(1, N + 1):
        C = _error_map(window[k, 2])
        M = C.T @ (w.Q_f if k == N else stage) @ C
        G = gamma[k * NX:(k + 1) * NX]
        z = free[k * NX:(k + 1) * NX] - window[k]
        H += 2.0 * G.T @ M @ G
        g += 2.0 * G.T @ M @ z
        constant += float(z @ M @ z)

    R_bar = np.kron(np.eye(N), w.R)
    Rd_bar = np.kron(np.eye(N), w.R_d)
    D = np.eye(nU) - np.eye(nU, k=-NU)
    e = np.zeros(nU)
    e[:NU] = u_prev.as_array()
    H += 2.0 * R_bar + 2.0 * D.T @ Rd_bar @ D
    g += -2.0 * D.T @ Rd_bar @ e
    constant += float(e @ Rd_bar @ e)
    H = 0.5 * (H + H.T) + regularization * np.eye(nU)

    box = BoxQp(
        H=H,
        g=g,
        lower=np.tile(p.lower_bounds(), N),
        upper=np.tile(p.upper_bounds(), N),
    )
    return QpProblem(box=box, constant=constant, prediction=gamma, free_response=free, horizon=N)


def solve_qp(problem: QpProblem, tol: float = config.QP_TOL, max_iter: int = config.QP_MAX_ITER,
             warm_start: Optional[np.ndarray] = None) -> MpcSolution:
    result = solve_box_qp(problem.box, tol=tol, max_iter=max_iter, x0=warm_start)
    U = result.x
    return MpcSolution(
        controls=U.reshape(problem.horizon, NU),
        states=problem.predict(U),
        objective=problem.cost(U),
        kkt_residual=result.residual,
        iterations=result.iterations,
        converged=result.converged,
        status=result.status,
    )


def collision_speed_cap(ego: VehicleState, cyclist: CyclistState, road: RoadGeometry,
                        settings: MpcSettings) -> float:
    """Reference-speed ceiling while the cyclist is ahead in the ego's corridor.

    The corridor is a lane-wide strip along the ego heading, so a vehicle
    already turning out of the lane is not held back.
    """
    c, s = math.cos(ego.theta), math.sin(ego.theta)
    dx, dy = cyclist.x - ego.x, cyclist.y - ego.y
    d_long = c * dx + s * dy
    lateral = -s * dx + c * dy
    if not (d_long > 0.0 and abs(lateral) < road.lane_width / 2.0):
        return math.inf
    return max(0.0, settings.k_gap * (d_long - settings.d_stop))


def _shifted(previous: Optional[MpcSolution], N: int) -> Optional[np.ndarray]:
    if previous is None or previous.controls.shape != (N, NU):
        return None
    return np.vstack([previous.controls[1:], previous.controls[-1:]]).ravel()


def mpc_step(x0: VehicleState, path: ReferencePath, progress: int, w: MpcWeights,
             p: BicycleParams, u_prev: ControlInput, speed_cap: float = math.inf,
             settings: Optional[MpcSettings] = None,
             previous: Optional[MpcSolution] = None) -> Tuple[ControlInput, MpcSolution, int]:
    """One receding-horizon step.

    Returns the clamped first input, the full solution and the updated
    (never decreasing) projection index along `path`.
    """
    settings = settings or MpcSettings()
    index, s0 = path.project(x0.x, x0.y, progress)
    index = max(index, progress)
    window = path.window(s0, w.N, p.Ts, speed_cap)
    window = _align_headings(x0.theta, window)
    models = linearize_window(window, p, w.N)
    problem = build_qp(x0, window, models, w, u_prev, p, settings.regularization)
    solution = solve_qp(problem, settings.tol, settings.max_iter, warm_start=_shifted(previous, w.N))
    return p.clamp(solution.first), solution, index


__all__ = [
    "MpcWeights",
    "MpcSettings",
    "QpProblem",
    "MpcSolution",
    "compute_errors",
    "linearize_window",
    "build_qp",
    "solve_qp",
    "collision_speed_cap",
    "mpc_step",
]
