"""A* search over a state lattice of motion primitives.

Edges cost w1 * length + w2 * |curvature change| + w3 * clearance penalty
+ w4 * samples in the oncoming lane. The traffic-rule weight w4 drops to
`replan_w4` when the supervisor asks for a relaxed replan.
"""
from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, replace
from typing import Dict, Iterator, List, NamedTuple, Optional, Tuple

import numpy as np

from reason_sim import config
from reason_sim._shared import wrap_angles
from reason_sim.errors import ConfigError, NoPathError
from reason_sim.planning.occupancy import OccupancyField
from reason_sim.planning.path import ReferencePath
from reason_sim.planning.primitives import MotionPrimitive, PrimitiveSet
from reason_sim.world.types import Goal, VehicleState


@dataclass(frozen=True)
class PlannerWeights:
    w1: float = config.PLANNER_WEIGHTS[0]
    w2: float = config.PLANNER_WEIGHTS[1]
    w3: float = config.PLANNER_WEIGHTS[2]
    w4: float = config.PLANNER_WEIGHTS[3]
    replan_w4: float = config.REPLAN_W4
    relaxed: bool = False

    def __post_init__(self):
        for name in ("w1", "w2", "w3"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ConfigError(f"{name} must be >= 0")
        if math.isnan(self.w4) or self.w4 < 0:
            raise ConfigError("w4 must be >= 0")
        if not (math.isfinite(self.replan_w4) and self.replan_w4 >= 0):
            raise ConfigError("replan_w4 must be >= 0")
        if not self.replan_w4 < self.w4:
            raise ConfigError("replan_w4 must be < w4")

    @property
    def traffic_weight(self) -> float:
        return self.replan_w4 if self.relaxed else self.w4

    def relax(self) -> "PlannerWeights":
        return replace(self, relaxed=True)


@dataclass(frozen=True)
class LatticeSettings:
    resolution: float = config.GRID_RESOLUTION
    headings: int = config.HEADINGS
    arc_length: float = config.PRIMITIVE_LENGTH
    curvatures: Tuple[float, ...] = config.CURVATURES
    sample_spacing: float = config.SAMPLE_SPACING
    d_safe: float = config.D_SAFE
    inflation: float = config.CYCLIST_INFLATION
    prediction_horizon: float = config.PREDICTION_HORIZON
    field_resolution: float = config.FIELD_RESOLUTION
    road_margin: float = config.ROAD_MARGIN
    v_max: float = config.V_MAX
    ramp_decel: float = config.RAMP_DECEL
    max_expansions: int = config.MAX_EXPANSIONS

    def __post_init__(self):
        checks = (
            (self.resolution > 0, "grid_resolution must be > 0"),
            (self.headings >= 4, "headings must be >= 4"),
            (self.arc_length > 0, "arc_length must be > 0"),
            (len(self.curvatures) > 0, "curvatures must not be empty"),
            (self.sample_spacing > 0, "sample_spacing must be > 0"),
            (self.d_safe >= 0, "d_safe must be >= 0"),
            (self.inflation >= 0, "inflation must be >= 0"),
            (self.prediction_horizon >= 0, "prediction_horizon must be >= 0"),
            (self.field_resolution > 0, "field_resolution must be > 0"),
            (self.road_margin >= 0, "road_margin must be >= 0"),
            (self.v_max > 0, "v_max must be > 0"),
            (self.ramp_decel > 0, "ramp_decel must be > 0"),
            (self.max_expansions >= 1, "max_expansions must be >= 1"),
        )
        for ok, message in checks:
            if not ok:
                raise ConfigError(message)
        object.__setattr__(self, "curvatures", tuple(float(k) for k in self.curvatures))


class LatticeNode(NamedTuple):
    """Grid cell offsets from the lattice origin plus a heading index."""
    ix: int
    iy: int
    heading: int


# search state: the node plus the curvature of the edge that reached it
SearchState = Tuple[LatticeNode, float]


def placement_costs(primitive: MotionPrimitive, x0, y0, field: OccupancyField,
                    w: PlannerWeights, d_safe: float = config.D_SAFE) -> np.ndarray:
    """Length, clearance and traffic-rule cost of `primitive` started at each (x0, y0).

    Origins broadcast against each other; infeasible placements cost inf.
    """
    x0 = np.asarray(x0, dtype=float)[..., None]
    y0 = np.asarray(y0, dtype=float)[..., None]
    xs, ys = np.broadcast_arrays(x0 + primitive.samples[:, 0], y0 + primitive.samples[:, 1])
    drivable, blocked, clearance, prohibited = field.query(xs, ys)

    infeasible = ~drivable.all(axis=-1) | blocked.any(axis=-1)
    penalty = (np.maximum(0.0, d_safe - clearance) ** 2).sum(axis=-1)
    n_prohibited = prohibited.sum(axis=-1)
    w4 = w.traffic_weight
    if math.isinf(w4):
        infeasible = infeasible | (n_prohibited > 0)
        traffic = np.zeros(n_prohibited.shape)
    else:
        traffic = w4 * n_prohibited

    cost = w.w1 * primitive.edge_length + w.w3 * penalty + traffic
    return np.where(infeasible, np.inf, cost)


def edge_cost(primitive: MotionPrimitive, placement: Tuple[float, float], field: OccupancyField,
              w: PlannerWeights, prev_curvature: float = 0.0,
              d_safe: float = config.D_SAFE) -> float:
    """Cost of one lattice edge whose start node sits at world point `placement`."""
    base = float(placement_costs(primitive, placement[0], placement[1], field, w, d_safe))
    if math.isinf(base):
        return math.inf
    return base + w.w2 * abs(primitive.curvature - prev_curvature)


class LatticeGraph:
    """Implicit lattice graph anchored at the planning start pose."""

    def __init__(self, start: VehicleState, goal: Goal, field: OccupancyField,
                 primitives: PrimitiveSet, weights: PlannerWeights,
                 settings: Optional[LatticeSettings] = None):
        self.settings = settings or LatticeSettings()
        self.start = start
        self.goal = goal
        self.field = field
        self.primitives = primitives
        self.weights = weights
        self.resolution = primitives.resolution
        self.origin = (start.x, start.y)

        road = field.road
        res = self.resolution
        eps = 1e-9
        self._ix = np.arange(math.ceil(-start.x / res - eps),
                             math.floor((road.road_length - start.x) / res + eps) + 1)
        self._iy = np.arange(math.ceil((road.y_min - start.y) / res - eps),
                             math.floor((road.y_max - start.y) / res + eps) + 1)
        self._base: Dict[Tuple[int, int], np.ndarray] = {}

    def start_state(self) -> SearchState:
        return LatticeNode(0, 0, self.primitives.heading_index(self.start.theta)), 0.0

    def node_pose(self, node: LatticeNode) -> Tuple[float, float, float]:
        return (self.origin[0] + node.ix * self.resolution,
                self.origin[1] + node.iy * self.resolution,
                self.primitives.heading_angle(node.heading))

    def _in_grid(self, node: LatticeNode) -> bool:
        return (self._ix[0] <= node.ix <= self._ix[-1]) and (self._iy[0] <= node.iy <= self._iy[-1])

    def _base_table(self, heading: int, k: int) -> np.ndarray:
        table = self._base.get((heading, k))
        if table is None:
            xs0 = self.origin[0] + self._ix * self.resolution
            ys0 = self.origin[1] + self._iy * self.resolution
            table = placement_costs(self.primitives[heading][k], xs0[None, :], ys0[:, None],
                                    self.field, self.weights, self.settings.d_safe)
            self._base[(heading, k)] = table
        return table

    def successors(self, state: SearchState) -> Iterator[Tuple[SearchState, float, MotionPrimitive]]:
        """Finite-cost edges leaving `state`."""
        node, prev_curvature = state
        row = node.iy - self._iy[0]
        col = node.ix - self._ix[0]
        for k, prim in enumerate(self.primitives[node.heading]):
            base = self._base_table(node.heading, k)[row, col]
            if not math.isfinite(base):
                continue
            nxt = LatticeNode(node.ix + prim.di, node.iy + prim.dj, prim.end_heading)
            if not self._in_grid(nxt):
                continue
            cost = float(base) + self.weights.w2 * abs(prim.curvature - prev_curvature)
            yield (nxt, prim.curvature), cost, prim

    def _goal_distance(self, node: LatticeNode) -> float:
        x, y, _ = self.node_pose(node)
        return math.hypot(x - self.goal.x, y - self.goal.y)

    def is_goal(self, node: LatticeNode) -> bool:
        return self._goal_distance(node) <= self.goal.tolerance

    def heuristic(self, node: LatticeNode) -> float:
        return self.weights.w1 * max(0.0, self._goal_distance(node) - self.goal.tolerance)


@dataclass(frozen=True)
class SearchResult:
    states: List[SearchState]
    primitives: List[MotionPrimitive]
    cost: float
    expansions: int


def search(graph: LatticeGraph) -> SearchResult:
    """A* from the graph's start state to the first goal node popped.

    Ties on f go to the lower heuristic, then to the earlier insertion.
    """
    start = graph.start_state()
    counter = itertools.count()
    h0 = graph.heuristic(start[0])
    heap = [(h0, h0, next(counter), start)]
    g_cost: Dict[SearchState, float] = {start: 0.0}
    parent: Dict[SearchState, Tuple[Optional[SearchState], Optional[MotionPrimitive]]] = {start: (None, None)}
    closed = set()
    expansions = 0

    while heap:
        _, _, _, state = heapq.heappop(heap)
        if state in closed:
            continue
        if graph.is_goal(state[0]):
            states, prims = [], []
            cur: Optional[SearchState] = state
            while cur is not None:
                states.append(cur)
                prev, prim = parent[cur]
                if prim is not None:
                    prims.append(prim)
                cur = prev
            states.reverse()
            prims.reverse()
            return SearchResult(states, prims, g_cost[state], expansions)

        closed.add(state)
        expansions += 1
        if expansions > graph.settings.max_expansions:
            raise NoPathError(f"search gave up after {expansions - 1} expansions")

        for nxt, cost, prim in graph.successors(state):
            if nxt in closed:
                continue
            tentative = g_cost[state] + cost
            if tentative < g_cost.get(nxt, math.inf):
                g_cost[nxt] = tentative
                parent[nxt] = (state, prim)
                h = graph.heuristic(nxt[0])
                heapq.heappush(heap, (tentative + h, h, next(counter), nxt))

    raise NoPathError("goal unreachable under the current weights")


def _trace_poses(graph: LatticeGraph, result: SearchResult) -> List[Tuple[float, float, float]]:
    # only costed arc samples go into the path, never the snapped nodes between them
    poses = [graph.node_pose(result.states[0][0])]
    for (node, _), prim in zip(result.states[:-1], result.primitives):
        ox, oy, _ = graph.node_pose(node)
        for dx, dy, theta in prim.samples:
            poses.append((ox + dx, oy + dy, theta))

    # straight run from the last sample onto the goal point
    x, y, theta = poses[-1]
    gx, gy = graph.goal.x, graph.goal.y
    gap = math.hypot(gx - x, gy - y)
    ahead = (gx - x) * math.cos(theta) + (gy - y) * math.sin(theta) > 0
    if gap > 1e-6 and ahead:
        heading = math.atan2(gy - y, gx - x)
        n = max(1, int(math.ceil(gap / graph.settings.sample_spacing)))
        for f in np.linspace(1.0 / n, 1.0, n):
            poses.append((x + f * (gx - x), y + f * (gy - y), heading))
    return poses


def plan(start: VehicleState, goal: Goal, field: OccupancyField, primitives: PrimitiveSet,
         w: PlannerWeights, settings: Optional[LatticeSettings] = None,
         path_id: int = 0) -> ReferencePath:
    """Cheapest lattice path from `start` to within tolerance of `goal`, with a speed profile.

    Raises NoPathError when no finite-cost path exists.
    """
    settings = settings or LatticeSettings()
    road = field.road
    if not road.contains(start.x, start.y) or not road.contains(goal.x, goal.y):
        raise NoPathError("start and goal must lie on the road")
    graph = LatticeGraph(start, goal, field, primitives, w, settings)
    result = search(graph)
    poses = np.asarray(_trace_poses(graph, result), dtype=float)
    poses[:, 2] = wrap_angles(poses[:, 2])
    return ReferencePath.from_poses(path_id, poses, settings.v_max, settings.ramp_decel)


__all__ = [
    "PlannerWeights",
    "LatticeSettings",
    "LatticeNode",
    "SearchState",
    "SearchResult",
    "LatticeGraph",
    "placement_costs",
    "edge_cost",
    "search",
    "plan",
]
