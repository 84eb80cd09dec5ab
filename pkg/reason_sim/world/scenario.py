"""Scenario definition and its construction from a parsed configuration mapping."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Dict, Mapping

import numpy as np

from reason_sim import config
from reason_sim.control.mpc import MpcSettings, MpcWeights
from reason_sim.errors import ConfigError
from reason_sim.planning.lattice import LatticeSettings, PlannerWeights
from reason_sim.supervision.reasons import ReasonParams, TriggerThresholds
from reason_sim.world.types import BicycleParams, CyclistState, Goal, RoadGeometry, VehicleState

NUMBER = "number"
INTEGER = "integer"
STRING = "string"
NUMBERS = "list of numbers"

SCHEMA: Dict[str, Dict[str, str]] = {
    "road": {"lane_width": NUMBER, "centerline_y": NUMBER, "road_length": NUMBER},
    "ego": {
        "x": NUMBER, "y": NUMBER, "theta": NUMBER, "v": NUMBER,
        "wheelbase": NUMBER, "l_r": NUMBER, "a_min": NUMBER, "a_max": NUMBER,
        "delta_max": NUMBER, "v_max": NUMBER, "model": STRING,
        "goal_x": NUMBER, "goal_y": NUMBER, "goal_tolerance": NUMBER,
    },
    "cyclist": {"x": NUMBER, "y": NUMBER, "speed": NUMBER},
    "reasons": {
        "k1": NUMBER, "k2": NUMBER, "k3": NUMBER, "k4": NUMBER,
        "d_th_vru": NUMBER, "t_th_vru": NUMBER, "d_th_driver": NUMBER, "t_th_driver": NUMBER,
    },
    "thresholds": {
        "tau": NUMBER, "tau_policymaker": NUMBER, "tau_vru": NUMBER, "tau_driver": NUMBER,
        "cooldown": NUMBER, "max_replans": INTEGER,
    },
    "planner": {
        "grid_resolution": NUMBER, "headings": INTEGER, "arc_length": NUMBER,
        "curvatures": NUMBERS, "sample_spacing": NUMBER,
        "w1": NUMBER, "w2": NUMBER, "w3": NUMBER, "w4": NUMBER, "replan_w4": NUMBER,
        "d_safe": NUMBER, "inflation": NUMBER, "prediction_horizon": NUMBER, "field_resolution": NUMBER,
        "road_margin": NUMBER, "ramp_decel": NUMBER,
    },
    "mpc": {
        "horizon": INTEGER, "q_perp": NUMBER, "q_par": NUMBER, "q_theta": NUMBER, "q_v": NUMBER,
        "r_a": NUMBER, "r_delta": NUMBER, "rd_a": NUMBER, "rd_delta": NUMBER,
        "terminal_scale": NUMBER, "tol": NUMBER, "max_iter": INTEGER,
        "d_stop": NUMBER, "k_gap": NUMBER,
    },
    "sim": {
        "ts": NUMBER, "substeps": INTEGER, "duration_max": NUMBER,
        "collision_distance": NUMBER, "log_every": INTEGER, "seed": INTEGER,
    },
}


@dataclass(frozen=True)
class Scenario:
    road: RoadGeometry = field(default_factory=RoadGeometry)
    ego_start: VehicleState = field(default_factory=lambda: VehicleState(*config.EGO_START))
    goal: Goal = field(default_factory=Goal)
    cyclist_start: CyclistState = field(
        default_factory=lambda: CyclistState(*config.CYCLIST_START, v=config.CYCLIST_SPEED))
    reason_params: ReasonParams = field(default_factory=ReasonParams)
    thresholds: TriggerThresholds = field(default_factory=TriggerThresholds)
    planner_weights: PlannerWeights = field(default_factory=PlannerWeights)
    lattice: LatticeSettings = field(default_factory=LatticeSettings)
    mpc_weights: MpcWeights = field(default_factory=MpcWeights)
    mpc_settings: MpcSettings = field(default_factory=MpcSettings)
    bicycle: BicycleParams = field(default_factory=BicycleParams)
    sim_duration_max: float = config.DURATION_MAX
    collision_distance: float = config.COLLISION_DISTANCE
    substeps: int = config.SUBSTEPS

    def __post_init__(self):
        road = self.road
        if not road.contains(self.goal.x, self.goal.y):
            raise ConfigError("goal must lie inside the road")
        if not road.contains(self.ego_start.x, self.ego_start.y):
            raise ConfigError("ego start must lie inside the road")
        lo, hi = road.right_lane
        if not (lo <= self.cyclist_start.y < hi):
            raise ConfigError("cyclist must ride in the right lane")
        if not self.ego_start.x < self.cyclist_start.x:
            raise ConfigError("ego must start behind the cyclist")
        if not self.sim_duration_max > 0:
            raise ConfigError("duration_max must be > 0")
        if not self.collision_distance >= 0:
            raise ConfigError("collision_distance must be >= 0")
        if self.substeps < 1:
            raise ConfigError("substeps must be >= 1")
        limit = self.bicycle.max_curvature
        for kappa in self.lattice.curvatures:
            if abs(kappa) > limit:
                raise ConfigError(f"curvature {kappa} exceeds tan(delta_max)/L = {limit:.4f}")

    @property
    def cyclist_speed(self) -> float:
        return self.cyclist_start.v

    @property
    def Ts(self) -> float:
        return self.bicycle.Ts


def default_scenario() -> Scenario:
    return Scenario()


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _checked(data: Mapping[str, Any]) -> Dict[str, Dict[str, Any]]:
    """Reject unknown sections, unknown keys and mistyped values."""
    if not isinstance(data, Mapping):
        raise ConfigError("configuration must be a table")
    out: Dict[str, Dict[str, Any]] = {name: {} for name in SCHEMA}
    for section, values in data.items():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        if not isinstance(values, Mapping):
            raise ConfigError(f"[{section}] must be a table")
        for key, value in values.items():
            kind = SCHEMA[section].get(key)
            if kind is None:
                raise ConfigError(f"unknown key '{key}' in [{section}]")
            if kind == NUMBER:
                ok = _is_number(value)
                value = float(value) if ok else value
            elif kind == INTEGER:
                ok = isinstance(value, int) and not isinstance(value, bool)
            elif kind == STRING:
                ok = isinstance(value, str)
            else:
                ok = isinstance(value, list) and all(_is_number(v) for v in value)
                value = tuple(float(v) for v in value) if ok else value
            if not ok:
                raise ConfigError(f"[{section}] {key} must be a {kind}")
            out[section][key] = value
    return out


def scenario_from_mapping(data: Mapping[str, Any]) -> Scenario:
    """Build a validated Scenario; omitted keys keep their defaults."""
    cfg = _checked(data)
    road_cfg, ego, cyc = cfg["road"], cfg["ego"], cfg["cyclist"]
    thr, pl, mpc, sim = cfg["thresholds"], cfg["planner"], cfg["mpc"], cfg["sim"]

    road = RoadGeometry(**road_cfg)
    x0, y0, theta0, v0 = config.EGO_START
    theta = ego.get("theta", theta0)
    if not -math.pi < theta <= math.pi:
        raise ConfigError("theta must lie in (-pi, pi]")
    ego_start = VehicleState(ego.get("x", x0), ego.get("y", y0), theta, ego.get("v", v0))
    bicycle = BicycleParams(
        L=ego.get("wheelbase", config.WHEELBASE),
        l_r=ego.get("l_r", config.REAR_TO_CG),
        a_min=ego.get("a_min", config.ACCEL_MIN),
        a_max=ego.get("a_max", config.ACCEL_MAX),
        delta_max=ego.get("delta_max", config.STEER_MAX),
        Ts=sim.get("ts", config.TS),
        model=ego.get("model", config.VEHICLE_MODEL),
    )
    goal = Goal(
        ego.get("goal_x", config.GOAL[0]),
        ego.get("goal_y", config.GOAL[1]),
        ego.get("goal_tolerance", config.GOAL_TOLERANCE),
    )
    cyclist = CyclistState(
        cyc.get("x", config.CYCLIST_START[0]),
        cyc.get("y", config.CYCLIST_START[1]),
        cyc.get("speed", config.CYCLIST_SPEED),
    )

    tau = thr.get("tau", config.TAU)
    thresholds = TriggerThresholds(
        tau_policymaker=thr.get("tau_policymaker", tau),
        tau_vru=thr.get("tau_vru", tau),
        tau_driver=thr.get("tau_driver", tau),
        cooldown=thr.get("cooldown", config.REPLAN_COOLDOWN),
        max_replans=thr.get("max_replans"),
    )

    w1, w2, w3, w4 = config.PLANNER_WEIGHTS
    weights = PlannerWeights(
        w1=pl.get("w1", w1), w2=pl.get("w2", w2), w3=pl.get("w3", w3), w4=pl.get("w4", w4),
        replan_w4=pl.get("replan_w4", config.REPLAN_W4),
    )
    lattice = LatticeSettings(
        resolution=pl.get("grid_resolution", config.GRID_RESOLUTION),
        headings=pl.get("headings", config.HEADINGS),
        arc_length=pl.get("arc_length", config.PRIMITIVE_LENGTH),
        curvatures=pl.get("curvatures", config.CURVATURES),
        sample_spacing=pl.get("sample_spacing", config.SAMPLE_SPACING),
        d_safe=pl.get("d_safe", config.D_SAFE),
        inflation=pl.get("inflation", config.CYCLIST_INFLATION),
        prediction_horizon=pl.get("prediction_horizon", config.PREDICTION_HORIZON),
        field_resolution=pl.get("field_resolution", config.FIELD_RESOLUTION),
        road_margin=pl.get("road_margin", config.ROAD_MARGIN),
        v_max=ego.get("v_max", config.V_MAX),
        ramp_decel=pl.get("ramp_decel", config.RAMP_DECEL),
    )

    q_stage = [mpc.get("q_perp", config.Q_PERP), mpc.get("q_par", config.Q_PAR),
               mpc.get("q_theta", config.Q_THETA), mpc.get("q_v", config.Q_V)]
    mpc_weights = MpcWeights(
        N=mpc.get("horizon", config.HORIZON),
        Q_perp=q_stage[0],
        Q_par=q_stage[1],
        Q_thetav=np.diag(q_stage[2:]),
        R=np.diag([mpc.get("r_a", config.R_ACCEL), mpc.get("r_delta", config.R_STEER)]),
        R_d=np.diag([mpc.get("rd_a", config.RD_ACCEL), mpc.get("rd_delta", config.RD_STEER)]),
        Q_f=mpc.get("terminal_scale", config.TERMINAL_SCALE) * np.diag(q_stage),
    )
    mpc_settings = MpcSettings(
        tol=mpc.get("tol", config.QP_TOL),
        max_iter=mpc.get("max_iter", config.QP_MAX_ITER),
        d_stop=mpc.get("d_stop", config.GUARD_D_STOP),
        k_gap=mpc.get("k_gap", config.GUARD_K_GAP),
    )

    return Scenario(
        road=road,
        ego_start=ego_start,
        goal=goal,
        cyclist_start=cyclist,
        reason_params=ReasonParams(**cfg["reasons"]),
        thresholds=thresholds,
        planner_weights=weights,
        lattice=lattice,
        mpc_weights=mpc_weights,
        mpc_settings=mpc_settings,
        bicycle=bicycle,
        sim_duration_max=sim.get("duration_max", config.DURATION_MAX),
        collision_distance=sim.get("collision_distance", config.COLLISION_DISTANCE),
        substeps=sim.get("substeps", config.SUBSTEPS),
    )


def sim_options(data: Mapping[str, Any]) -> Dict[str, int]:
    """The [sim] keys that belong to a run rather than to the scenario."""
    sim = _checked(data)["sim"]
    return {"seed": sim.get("seed", 0), "log_every": sim.get("log_every", config.LOG_EVERY)}


__all__ = ["Scenario", "SCHEMA", "default_scenario", "scenario_from_mapping", "sim_options"]
