import heapq
import itertools
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from reason_sim.errors import ConfigError, InfeasiblePrimitiveError, NoPathError
from reason_sim.planning.lattice import (
    LatticeGraph,
    LatticeSettings,
    PlannerWeights,
    edge_cost,
    plan,
    search,
)
from reason_sim.planning.occupancy import build_field, cyclist_field, field_from_mask, swept_mask
from reason_sim.planning.primitives import arc_offsets, generate_primitives
from reason_sim.world.types import BicycleParams, CyclistState, Goal, RoadGeometry, VehicleState

P = BicycleParams()
ROAD = RoadGeometry()
PRIMS = generate_primitives(P)
W = PlannerWeights()

SMALL_ROAD = RoadGeometry(lane_width=5.0, road_length=10.0)
SMALL_BIKE = BicycleParams(delta_max=1.0)
SMALL_SETTINGS = LatticeSettings(headings=8, curvatures=(0.0, 0.4, -0.4), road_margin=0.0)
SMALL_PRIMS = generate_primitives(SMALL_BIKE, curvatures=SMALL_SETTINGS.curvatures, headings=8)


def primitive(heading, curvature, prims=PRIMS):
    return next(p for p in prims[heading] if p.curvature == curvature)


def dijkstra_cost(graph):
    start = graph.start_state()
    best = {start: 0.0}
    counter = itertools.count()
    heap = [(0.0, next(counter), start)]
    done = set()
    while heap:
        cost, _, state = heapq.heappop(heap)
        if state in done:
            continue
        if graph.is_goal(state[0]):
            return cost
        done.add(state)
        for nxt, c, _ in graph.successors(state):
            if cost + c < best.get(nxt, math.inf):
                best[nxt] = cost + c
                heapq.heappush(heap, (cost + c, next(counter), nxt))
    return math.inf


def random_instance(rng, w4):
    discs = [(rng.uniform(2.0, 9.0), rng.uniform(-4.0, 4.0), rng.uniform(0.3, 1.0))
             for _ in range(int(rng.integers(0, 4)))]
    field = build_field(SMALL_ROAD, discs, resolution=0.25, road_margin=0.0)
    goal = Goal(rng.uniform(6.0, 9.5), rng.uniform(-4.5, 4.5), 1.0)
    weights = PlannerWeights(w1=1.0, w2=5.0, w3=10.0, w4=w4, replan_w4=0.5)
    start = VehicleState(1.0, -2.5, 0.0, 0.0)
    return LatticeGraph(start, goal, field, SMALL_PRIMS, weights, SMALL_SETTINGS)


class TestPrimitives:

    def test_straight_primitive(self):
        prim = primitive(0, 0.0)
        assert (prim.di, prim.dj, prim.end_heading) == (4, 0, 0)
        assert len(prim.samples) == 4
        assert_allclose(prim.samples[:, 0], [0.5, 1.0, 1.5, 2.0])
        assert prim.edge_length == pytest.approx(2.0)

    def test_arc_offsets(self):
        end = arc_offsets(0.0, 0.05, [2.0])[0]
        assert end[0] == pytest.approx(math.sin(0.1) / 0.05)
        assert end[1] == pytest.approx((1.0 - math.cos(0.1)) / 0.05)
        assert end[2] == pytest.approx(0.1)

    def test_mirror_symmetry(self):
        for kappa in (0.05, 0.1, 0.15):
            left, right = primitive(0, kappa), primitive(0, -kappa)
            assert_allclose(left.samples[:, 0], right.samples[:, 0])
            assert_allclose(left.samples[:, 1], -right.samples[:, 1])
            assert (left.di, left.dj) == (right.di, -right.dj)
            assert left.end_heading == (-right.end_heading) % PRIMS.headings

    def test_snap_error_within_half_cell(self):
        for prim in PRIMS:
            ex, ey = prim.snap_error
            assert ex <= 0.5 * PRIMS.resolution + 1e-9
            assert ey <= 0.5 * PRIMS.resolution + 1e-9

    def test_set_layout(self):
        assert len(PRIMS) == 16 * 7
        assert PRIMS.heading_index(math.pi) == 8
        assert PRIMS.heading_angle(4) == pytest.approx(math.pi / 2)

    def test_infeasible_curvature(self):
        with pytest.raises(InfeasiblePrimitiveError, match="curvature"):
            generate_primitives(P, curvatures=(0.0, 0.5))


class TestOccupancy:

    def test_cyclist_disc(self):
        field = cyclist_field(ROAD, CyclistState(25.0, -1.75))
        drivable, blocked, clearance, prohibited = field.query(np.array([25.0, 25.0, 10.0]),
                                                               np.array([-1.75, 1.75, -1.75]))
        assert list(blocked) == [True, False, False]
        assert clearance[0] == 0.0
        assert clearance[2] > 10.0
        assert list(prohibited) == [False, True, False]
        assert drivable.all()

    def test_prediction_sweeps_the_disc_forward(self):
        cyclist = CyclistState(25.0, -1.75, v=3.0)
        still = cyclist_field(ROAD, cyclist, horizon=0.0)
        np.testing.assert_array_equal(still.obstacle, build_field(ROAD, [(25.0, -1.75, 1.5)]).obstacle)

        swept = cyclist_field(ROAD, cyclist, horizon=5.0)
        _, blocked, _, _ = swept.query(np.array([25.0, 33.0, 40.0, 42.0, 33.0]),
                                       np.array([-1.75, -1.75, -1.75, -1.75, 1.75]))
        assert list(blocked) == [True, True, True, False, False]
        assert swept.obstacle.sum() > still.obstacle.sum()

    def test_prediction_is_clipped_to_the_road(self):
        field = cyclist_field(ROAD, CyclistState(145.0, -1.75, v=3.0), horizon=10.0)
        _, blocked, _, _ = field.query(np.array([149.9]), np.array([-1.75]))
        assert blocked[0]
        with pytest.raises(ValueError):
            cyclist_field(ROAD, CyclistState(25.0, -1.75), horizon=-1.0)

    def test_swept_mask_follows_a_diagonal_segment(self):
        mask = swept_mask(ROAD, (10.0, -1.75), (20.0, 1.75), 0.5)
        _, blocked, _, _ = field_from_mask(ROAD, mask, 0.25).query(np.array([15.0, 15.0, 10.0, 20.0]),
                                                                   np.array([0.0, -1.75, -1.75, 1.75]))
        assert list(blocked) == [True, False, True, True]

    def test_empty_road_has_infinite_clearance(self):
        field = cyclist_field(ROAD, None)
        assert not field.obstacle.any()
        assert np.isinf(field.distance).all()

    def test_margin_limits_drivable_band(self):
        field = build_field(ROAD)
        assert list(field.drivable([5.0, 5.0, 5.0, -1.0], [-2.5, -2.6, 2.5, 0.0])) == [True, False, True, False]

    def test_mask_shape_checked(self):
        with pytest.raises(ValueError):
            field_from_mask(ROAD, np.zeros((3, 3), dtype=bool), 0.25)


class TestEdgeCost:

    def setup_method(self):
        self.field = build_field(ROAD)
        self.straight = primitive(0, 0.0)

    def test_free_straight_edge(self):
        assert edge_cost(self.straight, (10.0, -1.75), self.field, W) == pytest.approx(2.0)

    def test_oncoming_lane_samples(self):
        assert edge_cost(self.straight, (10.0, 1.75), self.field, W) == pytest.approx(2.0 + 4 * 1000.0)
        assert edge_cost(self.straight, (10.0, 1.75), self.field, W.relax()) == pytest.approx(2.0 + 4 * 2.0)

    def test_obstacle_blocks(self):
        field = build_field(ROAD, [(11.0, -1.75, 0.5)])
        assert edge_cost(self.straight, (10.0, -1.75), field, W) == math.inf

    def test_clearance_penalty(self):
        field = build_field(ROAD, [(10.0, 1.25, 0.3)])
        assert edge_cost(self.straight, (10.0, -1.75), field, W) > 2.0

    def test_hard_traffic_rule(self):
        hard = PlannerWeights(w4=math.inf)
        assert edge_cost(self.straight, (10.0, 1.75), self.field, hard) == math.inf
        assert edge_cost(self.straight, (10.0, -1.75), self.field, hard) == pytest.approx(2.0)

    def test_curvature_change(self):
        cost = edge_cost(self.straight, (10.0, -1.75), self.field, W, prev_curvature=0.1)
        assert cost == pytest.approx(2.5)


class TestWeights:

    def test_relaxed_weights(self):
        relaxed = W.relax()
        assert relaxed.relaxed and not W.relaxed
        assert relaxed.traffic_weight == 2.0
        assert W.traffic_weight == 1000.0
        assert relaxed.w4 == W.w4

    def test_invariants(self):
        with pytest.raises(ConfigError, match="replan_w4 must be < w4"):
            PlannerWeights(w4=1.0, replan_w4=1.0)
        with pytest.raises(ConfigError, match="w1 must be >= 0"):
            PlannerWeights(w1=-1.0)
        with pytest.raises(ConfigError):
            LatticeSettings(headings=2)


class TestPlan:

    def test_straight_plan(self):
        start = VehicleState(0.0, -1.75, 0.0, 0.0)
        goal = Goal(20.0, -1.75, 1.0)
        graph = LatticeGraph(start, goal, build_field(ROAD), PRIMS, W)
        result = search(graph)
        assert result.cost == pytest.approx(20.0)
        assert graph.heuristic(graph.start_state()[0]) <= result.cost

        path = plan(start, goal, build_field(ROAD), PRIMS, W, path_id=3)
        assert path.id == 3
        assert path.total_length == pytest.approx(20.0)
        assert_allclose(path.samples[:, 1], -1.75)
        assert path.samples[0, 3] == pytest.approx(8.0)
        assert path.samples[-1, 3] == 0.0

    def test_speed_profile(self):
        path = plan(VehicleState(0.0, -1.75, 0.0, 0.0), Goal(40.0, -1.75, 1.0),
                    build_field(ROAD), PRIMS, W)
        remaining = path.total_length - path.s
        assert_allclose(path.samples[:, 3], np.minimum(8.0, np.sqrt(6.0 * remaining)))

    def test_cyclist_on_short_road(self):
        road = RoadGeometry(road_length=60.0)
        cyclist = CyclistState(25.0, -1.75)
        field = cyclist_field(road, cyclist)
        start = VehicleState(0.0, -1.75, 0.0, 0.0)
        goal = Goal(55.0, -1.75, 1.0)

        strict = search(LatticeGraph(start, goal, field, PRIMS, W))
        relaxed = search(LatticeGraph(start, goal, field, PRIMS, W.relax()))
        assert relaxed.cost <= strict.cost

        for weights in (W, W.relax()):
            path = plan(start, goal, field, PRIMS, weights)
            gap = np.hypot(path.samples[:, 0] - cyclist.x, path.samples[:, 1] - cyclist.y)
            assert gap.min() >= 1.3
            assert math.hypot(path.end[0] - goal.x, path.end[1] - goal.y) <= 1.5

    def test_left_lane_goal_unreachable_under_hard_rule(self):
        hard = PlannerWeights(w4=math.inf)
        with pytest.raises(NoPathError):
            plan(VehicleState(1.0, -2.5, 0.0, 0.0), Goal(8.0, 2.5, 1.0),
                 build_field(SMALL_ROAD, resolution=0.25, road_margin=0.0),
                 SMALL_PRIMS, hard, SMALL_SETTINGS)

    def test_off_road_start(self):
        with pytest.raises(NoPathError, match="on the road"):
            plan(VehicleState(-5.0, -1.75, 0.0, 0.0), Goal(20.0, -1.75, 1.0), build_field(ROAD), PRIMS, W)


class TestOptimality:

    def test_matches_dijkstra_on_random_instances(self, rng):
        for _ in range(100):
            graph = random_instance(rng, float(rng.choice([1000.0, 2.0])))
            expected = dijkstra_cost(graph)
            try:
                result = search(graph)
            except NoPathError:
                assert expected == math.inf
                continue
            assert result.cost == pytest.approx(expected, rel=1e-9, abs=1e-9)
            assert graph.heuristic(graph.start_state()[0]) <= result.cost + 1e-9

    def test_hard_rule_paths_stay_in_lane(self, rng):
        for _ in range(30):
            graph = random_instance(rng, 1000.0)
            goal = Goal(graph.goal.x, -abs(graph.goal.y), 1.0)
            try:
                path = plan(graph.start, goal, graph.field, SMALL_PRIMS,
                            PlannerWeights(w4=math.inf), SMALL_SETTINGS)
            except NoPathError:
                continue
            assert np.all(path.samples[:, 1] <= SMALL_ROAD.centerline_y)
