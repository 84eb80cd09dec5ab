"""Closed loop: score the situation, maybe replan, track the path, integrate.

Each control period the supervisor scores the current ego and cyclist states,
decides whether a stakeholder asks for a new global plan, and the tracking
controller computes the input held over the next period. Both agents then
move forward by one period.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

from reason_sim import config
from reason_sim.control.dynamics import integrate, yaw_rate
from reason_sim.control.mpc import MpcSolution, collision_speed_cap, compute_errors, mpc_step
from reason_sim.errors import ConfigError, NoPathError, ScenarioInfeasibleError
from reason_sim.planning.lattice import plan
from reason_sim.planning.occupancy import cyclist_field
from reason_sim.planning.path import ReferencePath
from reason_sim.planning.primitives import PrimitiveSet, generate_primitives
from reason_sim.sim.log import ReplanEvent, SimLog, StepRecord
from reason_sim.supervision.reasons import (
    ReasonAccumulators,
    check_trigger,
    evaluate,
    update_accumulators,
)
from reason_sim.utils.logging import log, log_progress
from reason_sim.world.scenario import Scenario
from reason_sim.world.types import ControlInput, CyclistState, VehicleState


class SimMode(str, Enum):
    BASELINE = "baseline"
    REPLANNER = "replanner"


@dataclass(frozen=True)
class SimConfig:
    scenario: Scenario = field(default_factory=Scenario)
    mode: SimMode = SimMode.BASELINE
    seed: int = 0             # reserved; runs are deterministic
    log_every: int = config.LOG_EVERY

    def __post_init__(self):
        object.__setattr__(self, "mode", SimMode(self.mode))
        if self.log_every < 1:
            raise ConfigError("log_every must be >= 1")


def cyclist_step(c: CyclistState, dt: float) -> CyclistState:
    if not dt > 0:
        raise ValueError("dt must be > 0")
    return replace(c, x=c.x + c.v * dt)


def _primitives(scenario: Scenario) -> PrimitiveSet:
    lat = scenario.lattice
    return generate_primitives(scenario.bicycle, lat.arc_length, lat.curvatures,
                               lat.headings, lat.resolution, lat.sample_spacing)


def _plan(scenario: Scenario, start: VehicleState, cyclist: Optional[CyclistState],
          prims: PrimitiveSet, relaxed: bool, path_id: int) -> ReferencePath:
    lat = scenario.lattice
    horizon = lat.prediction_horizon if relaxed else 0.0
    field_ = cyclist_field(scenario.road, cyclist, lat.inflation, lat.field_resolution,
                           lat.road_margin, horizon)
    weights = scenario.planner_weights.relax() if relaxed else scenario.planner_weights
    return plan(start, scenario.goal, field_, prims, weights, lat, path_id=path_id)


def initial_path(scenario: Scenario, prims: Optional[PrimitiveSet] = None) -> ReferencePath:
    """First plan, made on the empty road; the moving cyclist is left to the collision guard."""
    prims = prims or _primitives(scenario)
    try:
        return _plan(scenario, scenario.ego_start, None, prims, relaxed=False, path_id=0)
    except NoPathError as exc:
        raise ScenarioInfeasibleError() from exc


def run(cfg: SimConfig) -> SimLog:
    sc = cfg.scenario
    mode = cfg.mode
    p = sc.bicycle
    Ts = p.Ts
    road, goal = sc.road, sc.goal
    params, thresholds = sc.reason_params, sc.thresholds
    total_steps = int(math.floor(sc.sim_duration_max / Ts + 1e-9))

    prims = _primitives(sc)
    path = initial_path(sc, prims)
    sim_log = SimLog(mode=mode.value, Ts=Ts, paths=[path])
    log(f"{mode.value}: initial path {path.id} with {len(path)} samples, {path.total_length:.1f} m")

    ego = sc.ego_start
    cyclist = sc.cyclist_start
    acc = ReasonAccumulators()
    u_prev = ControlInput()
    previous: Optional[MpcSolution] = None
    progress = 0
    last_replan = -math.inf
    replans = 0
    # a successful replan disarms the supervisor until every score is back at or above its tau
    armed = True

    for k in range(total_steps + 1):
        t = k * Ts
        if k > 0:
            acc = update_accumulators(acc, ego, cyclist, params.d_th_vru, params.d_th_driver, Ts)
        report = evaluate(ego, cyclist, road, acc, params, thresholds)

        arrived = goal.reached(ego.x, ego.y)
        collided = report.distance < sc.collision_distance
        if arrived or collided or k == total_steps:
            sim_log.records.append(StepRecord(
                t=t, ego=ego, control=u_prev, cyclist=cyclist, report=report,
                active_path_id=path.id, yaw_rate=yaw_rate(ego, u_prev, p),
            ))
            if arrived:
                sim_log.arrival_time = t
                log(f"{mode.value}: goal reached at t={t:.1f}s")
            elif collided:
                sim_log.collided = True
                log(f"{mode.value}: collision at t={t:.1f}s, distance {report.distance:.2f} m")
            else:
                log(f"{mode.value}: time limit {sc.sim_duration_max:.0f}s reached")
            break

        decision = check_trigger(report, thresholds, t - last_replan)
        if not armed and report.violating_stakeholder is None:
            armed = True
        replan_event = False
        allowed = thresholds.max_replans is None or replans < thresholds.max_replans
        if decision.replan and mode is SimMode.REPLANNER and armed and allowed:
            last_replan = t
            try:
                path = _plan(sc, ego, cyclist, prims, relaxed=True, path_id=path.id + 1)
            except NoPathError as exc:
                sim_log.replans.append(ReplanEvent(t, decision.stakeholder, path.id, False))
                log(f"{mode.value}: replan at t={t:.1f}s failed ({exc}); keeping path {path.id}")
            else:
                replans += 1
                replan_event = True
                armed = False
                progress = 0
                previous = None
                sim_log.paths.append(path)
                sim_log.replans.append(ReplanEvent(t, decision.stakeholder, path.id, True))
                log(f"{mode.value}: replan at t={t:.1f}s for {decision.stakeholder.value}, "
                    f"path {path.id} with {len(path)} samples")

        cap = collision_speed_cap(ego, cyclist, road, sc.mpc_settings)
        u, solution, progress = mpc_step(ego, path, progress, sc.mpc_weights, p, u_prev,
                                         speed_cap=cap, settings=sc.mpc_settings, previous=previous)
        fallback = not solution.converged
        if fallback:
            log(f"{mode.value}: solver {solution.status} at t={t:.1f}s after {solution.iterations} "
                f"iterations, residual {solution.kkt_residual:.2e}; holding previous input")
            u = u_prev
            previous = None
        else:
            previous = solution

        _, s0 = path.project(ego.x, ego.y, progress)
        e_perp, _, _ = compute_errors(ego, path.interpolate([s0])[0])
        sim_log.records.append(StepRecord(
            t=t, ego=ego, control=u, cyclist=cyclist, report=report,
            trigger=decision.replan, replan_event=replan_event, active_path_id=path.id,
            qp_iters=solution.iterations, qp_residual=solution.kkt_residual,
            yaw_rate=yaw_rate(ego, u, p), e_perp=e_perp, solver_fallback=fallback,
        ))

        ego = integrate(ego, u, p, Ts, sc.substeps)
        cyclist = cyclist_step(cyclist, Ts)
        u_prev = u
        if (k + 1) % cfg.log_every == 0:
            log_progress(f"{mode.value} t={t + Ts:5.1f}s", k + 1, total_steps)

    return sim_log


__all__ = ["SimMode", "SimConfig", "cyclist_step", "initial_path", "run"]
