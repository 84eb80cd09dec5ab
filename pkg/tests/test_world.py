import math
from pathlib import Path

import numpy as np
import pytest

from reason_sim.config import load_config
from reason_sim.errors import ConfigError, OffRoadError
from reason_sim.world.geometry import ego_cyclist_distance, lane_of, signed_lateral_displacement
from reason_sim.world.scenario import Scenario, default_scenario, scenario_from_mapping
from reason_sim.world.types import (
    BicycleParams,
    ControlInput,
    CyclistState,
    Goal,
    Lane,
    RoadGeometry,
    VehicleState,
)


ROAD = RoadGeometry()


def ego_at(x, y, theta=0.0, v=0.0):
    return VehicleState(x, y, theta, v)


def test_lane_of_known_values():
    c = ROAD.centerline_y
    assert lane_of(c - 1.5, ROAD) is Lane.RIGHT
    assert lane_of(c, ROAD) is Lane.CENTERLINE
    assert lane_of(c + 0.2, ROAD) is Lane.LEFT


def test_lane_of_rejects_off_road():
    with pytest.raises(OffRoadError, match="off-road"):
        lane_of(ROAD.y_max + 0.1, ROAD)
    with pytest.raises(OffRoadError):
        lane_of(ROAD.y_min - 0.1, ROAD)


def test_signed_lateral_displacement_known_values():
    c = ROAD.centerline_y
    assert signed_lateral_displacement(ego_at(0.0, c - 2.0), ROAD) == pytest.approx(2.0)
    assert signed_lateral_displacement(ego_at(0.0, c), ROAD) == 0.0
    assert signed_lateral_displacement(ego_at(0.0, c + 1.0), ROAD) == pytest.approx(-1.0)


def test_signed_lateral_displacement_off_road():
    with pytest.raises(OffRoadError):
        signed_lateral_displacement(ego_at(0.0, 5.0), ROAD)


def test_lane_and_displacement_agree(rng):
    for y in rng.uniform(ROAD.y_min, ROAD.y_max, 2000):
        d = signed_lateral_displacement(ego_at(0.0, float(y)), ROAD)
        lane = lane_of(float(y), ROAD)
        if d > 0:
            assert lane is Lane.RIGHT
        elif d < 0:
            assert lane is Lane.LEFT
        else:
            assert lane is Lane.CENTERLINE


def test_ego_cyclist_distance_known_values():
    assert ego_cyclist_distance(ego_at(0.0, 0.0), CyclistState(3.0, 4.0)) == pytest.approx(5.0)
    assert ego_cyclist_distance(ego_at(1.0, -1.0), CyclistState(1.0, -1.0)) == 0.0
    assert ego_cyclist_distance(ego_at(10.0, 0.0), CyclistState(18.0, 0.0)) == pytest.approx(8.0)


def test_distance_symmetric_and_triangle(rng):
    pts = rng.uniform(-50.0, 50.0, size=(500, 3, 2))
    for a, b, c in pts:
        ab = ego_cyclist_distance(ego_at(*a), CyclistState(*b))
        ba = ego_cyclist_distance(ego_at(*b), CyclistState(*a))
        bc = ego_cyclist_distance(ego_at(*b), CyclistState(*c))
        ac = ego_cyclist_distance(ego_at(*a), CyclistState(*c))
        assert ab == pytest.approx(ba)
        assert ac <= ab + bc + 1e-9


def test_vehicle_state_invariants():
    with pytest.raises(ConfigError):
        VehicleState(0.0, 0.0, 4.0, 1.0)
    with pytest.raises(ConfigError):
        VehicleState(0.0, 0.0, 0.0, -0.1)
    with pytest.raises(ConfigError):
        VehicleState(0.0, math.nan, 0.0, 0.0)
    assert VehicleState(0.0, 0.0, math.pi, 0.0).theta == math.pi


def test_vehicle_state_from_array_wraps_and_clamps():
    s = VehicleState.from_array([1.0, 2.0, 1.5 * math.pi, -0.2])
    assert s.theta == pytest.approx(-0.5 * math.pi)
    assert s.v == 0.0
    np.testing.assert_allclose(s.as_array(), [1.0, 2.0, -0.5 * math.pi, 0.0])


@pytest.mark.parametrize("kwargs", [
    {"L": 0.0},
    {"l_r": 2.7},
    {"a_min": 0.5},
    {"a_max": -1.0},
    {"delta_max": 1.6},
    {"Ts": 0.0},
    {"model": "dynamic"},
])
def test_bicycle_params_rejects(kwargs):
    with pytest.raises(ConfigError):
        BicycleParams(**kwargs)


def test_bicycle_params_bounds_and_clamp():
    p = BicycleParams()
    assert p.delta_min == -p.delta_max
    assert p.max_curvature == pytest.approx(math.tan(0.5) / 2.7)
    u = p.clamp(ControlInput(10.0, -2.0))
    assert (u.a, u.delta) == (p.a_max, -p.delta_max)


def test_road_lanes():
    assert ROAD.right_lane == (-3.5, 0.0)
    assert ROAD.left_lane == (0.0, 3.5)
    assert ROAD.contains(0.0, -3.5)
    assert not ROAD.contains(151.0, 0.0)


def test_goal_reached():
    goal = Goal(140.0, -1.75, 1.0)
    assert goal.reached(139.2, -1.75)
    assert not goal.reached(138.5, -1.75)


def test_default_scenario_values(scenario):
    assert scenario.ego_start == VehicleState(0.0, -1.75, 0.0, 0.0)
    assert (scenario.goal.x, scenario.goal.y) == (140.0, -1.75)
    assert scenario.cyclist_start == CyclistState(25.0, -1.75, 3.0)
    assert scenario.cyclist_speed == 3.0
    assert scenario.Ts == 0.1
    assert scenario.sim_duration_max == 60.0
    assert scenario.lattice.v_max == 8.0


def test_scenario_rejects_goal_off_road():
    with pytest.raises(ConfigError, match="goal"):
        Scenario(goal=Goal(200.0, -1.75, 1.0))


def test_scenario_rejects_ego_ahead_of_cyclist():
    with pytest.raises(ConfigError, match="behind"):
        Scenario(cyclist_start=CyclistState(-5.0, -1.75))


def test_scenario_from_empty_mapping_is_default():
    sc = scenario_from_mapping({})
    ref = default_scenario()
    assert sc.road == ref.road
    assert sc.ego_start == ref.ego_start
    assert sc.reason_params == ref.reason_params
    assert sc.thresholds == ref.thresholds
    assert sc.planner_weights == ref.planner_weights
    assert sc.lattice == ref.lattice
    assert sc.bicycle == ref.bicycle
    np.testing.assert_allclose(sc.mpc_weights.Q_f, ref.mpc_weights.Q_f)
    np.testing.assert_allclose(sc.mpc_weights.R_d, ref.mpc_weights.R_d)


def test_scenario_from_mapping_table_values():
    sc = scenario_from_mapping({
        "reasons": {"d_th_vru": 8, "t_th_vru": 5, "d_th_driver": 12, "t_th_driver": 10},
        "thresholds": {"tau": 0.7},
        "cyclist": {"speed": 2.5},
        "planner": {"curvatures": [0, 0.1, -0.1]},
    })
    assert sc.reason_params.d_th_driver == 12.0
    assert sc.thresholds.tau_vru == 0.7
    assert sc.cyclist_speed == 2.5
    assert sc.lattice.curvatures == (0.0, 0.1, -0.1)


def test_scenario_from_mapping_tau_override():
    sc = scenario_from_mapping({"thresholds": {"tau": 0.5, "tau_driver": 0.6}})
    assert sc.thresholds.tau_policymaker == 0.5
    assert sc.thresholds.tau_driver == 0.6


def test_scenario_from_mapping_errors():
    with pytest.raises(ConfigError, match="k2 must be > 0"):
        scenario_from_mapping({"reasons": {"k2": -1}})
    with pytest.raises(ConfigError, match="unknown key 'foo' in \\[reasons\\]"):
        scenario_from_mapping({"reasons": {"foo": 1}})
    with pytest.raises(ConfigError, match="unknown section"):
        scenario_from_mapping({"weather": {}})
    with pytest.raises(ConfigError, match="number"):
        scenario_from_mapping({"road": {"lane_width": "wide"}})
    with pytest.raises(ConfigError, match="number"):
        scenario_from_mapping({"ego": {"v_max": True}})
    with pytest.raises(ConfigError, match="replan_w4"):
        scenario_from_mapping({"planner": {"w4": 1.0, "replan_w4": 2.0}})
    with pytest.raises(ConfigError, match="curvature"):
        scenario_from_mapping({"planner": {"curvatures": [0.0, 0.5]}})
    with pytest.raises(ConfigError, match="prediction_horizon"):
        scenario_from_mapping({"planner": {"prediction_horizon": -1.0}})


def test_bundled_default_file_matches_defaults():
    path = Path(__file__).resolve().parents[1] / "scenarios" / "default.toml"
    sc = scenario_from_mapping(load_config(path))
    ref = default_scenario()
    assert (sc.road, sc.ego_start, sc.goal, sc.cyclist_start) == (ref.road, ref.ego_start, ref.goal, ref.cyclist_start)
    assert (sc.reason_params, sc.thresholds, sc.planner_weights) == (ref.reason_params, ref.thresholds, ref.planner_weights)
    assert sc.sim_duration_max == ref.sim_duration_max
    assert sc.lattice == ref.lattice


def test_load_config_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_config(tmp_path / "missing.toml")
