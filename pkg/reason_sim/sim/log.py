"""Per-step simulation records and the run summary derived from them."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from reason_sim.planning.path import ReferencePath
from reason_sim.supervision.reasons import ReasonReport, Stakeholder
from reason_sim.world.types import ControlInput, CyclistState, VehicleState


@dataclass(frozen=True)
class StepRecord:
    t: float
    ego: VehicleState
    control: ControlInput
    cyclist: CyclistState
    report: ReasonReport
    trigger: bool = False
    replan_event: bool = False
    active_path_id: int = 0
    qp_iters: int = 0
    qp_residual: float = 0.0
    yaw_rate: float = 0.0
    e_perp: float = 0.0
    solver_fallback: bool = False


@dataclass(frozen=True)
class ReplanEvent:
    t: float
    stakeholder: Stakeholder
    path_id: int
    succeeded: bool


@dataclass(frozen=True)
class SimSummary:
    mode: str
    arrival_time: Optional[float]
    num_replans: int
    min_distance: float
    min_r_policy: float
    min_r_vru: float
    min_r_driver: float
    final_r_policy: float
    final_r_vru: float
    final_r_driver: float
    first_trigger_time: Optional[float]
    first_trigger_t_behind: Optional[float]
    collided: bool
    steps: int
    solver_fallbacks: int
    max_yaw_rate: float

    @property
    def min_ego_cyclist_distance(self) -> float:
        return self.min_distance

    def items(self) -> List[Tuple[str, object]]:
        """(key, value) pairs in summary-file order."""
        return [(name, getattr(self, name)) for name in self.__dataclass_fields__]


@dataclass
class SimLog:
    mode: str
    Ts: float
    records: List[StepRecord] = field(default_factory=list)
    paths: List[ReferencePath] = field(default_factory=list)
    replans: List[ReplanEvent] = field(default_factory=list)
    arrival_time: Optional[float] = None
    collided: bool = False

    def __len__(self) -> int:
        return len(self.records)

    @property
    def num_replans(self) -> int:
        return sum(1 for r in self.records if r.replan_event)

    @property
    def path_ids(self) -> List[int]:
        return sorted({r.active_path_id for r in self.records})

    def summary(self) -> SimSummary:
        recs = self.records
        if not recs:
            raise ValueError("empty simulation log")
        first = next((r for r in recs if r.trigger), None)
        last = recs[-1].report
        return SimSummary(
            mode=self.mode,
            arrival_time=self.arrival_time,
            num_replans=self.num_replans,
            min_distance=min(r.report.distance for r in recs),
            min_r_policy=min(r.report.r_policymaker for r in recs),
            min_r_vru=min(r.report.r_vru for r in recs),
            min_r_driver=min(r.report.r_driver for r in recs),
            final_r_policy=last.r_policymaker,
            final_r_vru=last.r_vru,
            final_r_driver=last.r_driver,
            first_trigger_time=first.t if first else None,
            first_trigger_t_behind=first.report.accumulators.t_behind_driver if first else None,
            collided=self.collided,
            steps=len(recs),
            solver_fallbacks=sum(1 for r in recs if r.solver_fallback),
            max_yaw_rate=max((abs(r.yaw_rate) for r in recs), default=0.0),
        )


__all__ = ["StepRecord", "ReplanEvent", "SimSummary", "SimLog"]
