"""Stakeholder reason scores, their close-following timers and the replan trigger.

Every score lies in (0, 1]: it is exactly 1 while the stakeholder has nothing to
complain about and decays exponentially once a distance or time threshold is
crossed. The supervisor compares each score with its own threshold and asks
the planner for a new path when one of them falls short.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

from reason_sim import config
from reason_sim.errors import ConfigError
from reason_sim.world.geometry import ego_cyclist_distance, signed_lateral_displacement
from reason_sim.world.types import CyclistState, RoadGeometry, VehicleState


class Stakeholder(str, Enum):
    POLICYMAKER = "policymaker"
    VRU = "vru"
    DRIVER = "driver"


@dataclass(frozen=True)
class ReasonParams:
    k1: float = config.K_POLICY
    k2: float = config.K_SAFETY
    k3: float = config.K_COMFORT
    k4: float = config.K_DRIVER
    d_th_vru: float = config.D_TH_VRU
    t_th_vru: float = config.T_TH_VRU
    d_th_driver: float = config.D_TH_DRIVER
    t_th_driver: float = config.T_TH_DRIVER

    def __post_init__(self):
        for name in ("k1", "k2", "k3", "k4"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be > 0")
        for name in ("d_th_vru", "t_th_vru", "d_th_driver", "t_th_driver"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be > 0")
        if not self.d_th_driver > self.d_th_vru:
            raise ConfigError("d_th_driver must be > d_th_vru")


@dataclass(frozen=True)
class TriggerThresholds:
    tau_policymaker: float = config.TAU
    tau_vru: float = config.TAU
    tau_driver: float = config.TAU
    cooldown: float = config.REPLAN_COOLDOWN
    max_replans: Optional[int] = None

    def __post_init__(self):
        for name in ("tau_policymaker", "tau_vru", "tau_driver"):
            if not 0.0 < getattr(self, name) < 1.0:
                raise ConfigError(f"{name} must lie in (0, 1)")
        if not self.cooldown >= 0:
            raise ConfigError("cooldown must be >= 0")
        if self.max_replans is not None and self.max_replans < 0:
            raise ConfigError("max_replans must be >= 0")

    def tau(self, who: Stakeholder) -> float:
        return {
            Stakeholder.POLICYMAKER: self.tau_policymaker,
            Stakeholder.VRU: self.tau_vru,
            Stakeholder.DRIVER: self.tau_driver,
        }[who]


@dataclass(frozen=True)
class ReasonAccumulators:
    t_close_vru: float = 0.0
    t_behind_driver: float = 0.0


@dataclass(frozen=True)
class ReasonReport:
    r_policymaker: float
    r_vru_safety: float
    r_vru_comfort: float
    r_vru: float
    r_driver: float
    accumulators: ReasonAccumulators = field(default_factory=ReasonAccumulators)
    distance: float = math.inf
    violating_stakeholder: Optional[Stakeholder] = None

    @property
    def min_score(self) -> float:
        return min(self.r_policymaker, self.r_vru, self.r_driver)

    def score(self, who: Stakeholder) -> float:
        return {
            Stakeholder.POLICYMAKER: self.r_policymaker,
            Stakeholder.VRU: self.r_vru,
            Stakeholder.DRIVER: self.r_driver,
        }[who]


@dataclass(frozen=True)
class TriggerDecision:
    """Replan request; `stakeholder` is None when nothing needs to change."""
    stakeholder: Optional[Stakeholder] = None

    @property
    def replan(self) -> bool:
        return self.stakeholder is not None


NO_TRIGGER = TriggerDecision()


def policymaker_score(d_veh: float, k1: float) -> float:
    """Regulatory compliance from the signed offset to the centerline."""
    if d_veh > 0:
        return 1.0
    return math.exp(k1 * d_veh)


def vru_safety_score(d: float, d_th: float, k2: float) -> float:
    """Perceived safety of the cyclist; 1 beyond d_th, decaying as the gap closes."""
    if d > d_th:
        return 1.0
    return math.exp(k2 * (d - d_th))


def vru_comfort_score(t_close: float, d: float, params: ReasonParams) -> float:
    if t_close < params.t_th_vru or d > params.d_th_vru:
        return 1.0
    return math.exp(-params.k3 * (t_close - params.t_th_vru))


def vru_score(safety: float, comfort: float) -> float:
    return safety * comfort


def driver_score(t_behind: float, d: float, params: ReasonParams) -> float:
    """Driver impatience after prolonged close following."""
    if t_behind < params.t_th_driver or d > params.d_th_driver:
        return 1.0
    return math.exp(-params.k4 * (t_behind - params.t_th_driver))


def update_accumulators(acc: ReasonAccumulators, ego: VehicleState, cyclist: CyclistState,
                        d_th_vru: float, d_th_driver: float, dt: float) -> ReasonAccumulators:
    """Advance the close-following timers by one step; they never reset."""
    d = ego_cyclist_distance(ego, cyclist)
    t_close = acc.t_close_vru + dt if d < d_th_vru else acc.t_close_vru
    behind = ego.x < cyclist.x
    t_behind = acc.t_behind_driver + dt if (d < d_th_driver and behind) else acc.t_behind_driver
    if t_close == acc.t_close_vru and t_behind == acc.t_behind_driver:
        return acc
    return replace(acc, t_close_vru=t_close, t_behind_driver=t_behind)


def _lowest_violator(scores, thresholds: TriggerThresholds) -> Optional[Stakeholder]:
    worst = None
    for who, value in scores:
        if value < thresholds.tau(who) and (worst is None or value < worst[1]):
            worst = (who, value)
    return worst[0] if worst else None


def evaluate(ego: VehicleState, cyclist: CyclistState, road: RoadGeometry,
             acc: ReasonAccumulators, params: ReasonParams,
             thresholds: Optional[TriggerThresholds] = None) -> ReasonReport:
    thresholds = thresholds or TriggerThresholds()
    d = ego_cyclist_distance(ego, cyclist)
    r_policy = policymaker_score(signed_lateral_displacement(ego, road), params.k1)
    safety = vru_safety_score(d, params.d_th_vru, params.k2)
    comfort = vru_comfort_score(acc.t_close_vru, d, params)
    r_vru = vru_score(safety, comfort)
    r_driver = driver_score(acc.t_behind_driver, d, params)
    violator = _lowest_violator(
        ((Stakeholder.POLICYMAKER, r_policy), (Stakeholder.VRU, r_vru), (Stakeholder.DRIVER, r_driver)),
        thresholds,
    )
    return ReasonReport(
        r_policymaker=r_policy,
        r_vru_safety=safety,
        r_vru_comfort=comfort,
        r_vru=r_vru,
        r_driver=r_driver,
        accumulators=acc,
        distance=d,
        violating_stakeholder=violator,
    )


def check_trigger(report: ReasonReport, thresholds: TriggerThresholds,
                  time_since_last_replan: float) -> TriggerDecision:
    if time_since_last_replan < thresholds.cooldown:
        return NO_TRIGGER
    violator = _lowest_violator(
        ((who, report.score(who)) for who in Stakeholder),
        thresholds,
    )
    return TriggerDecision(violator) if violator else NO_TRIGGER


__all__ = [
    "Stakeholder",
    "ReasonParams",
    "TriggerThresholds",
    "ReasonAccumulators",
    "ReasonReport",
    "TriggerDecision",
    "NO_TRIGGER",
    "policymaker_score",
    "vru_safety_score",
    "vru_comfort_score",
    "vru_score",
    "driver_score",
    "update_accumulators",
    "evaluate",
    "check_trigger",
]
