import numpy as np
import pytest
from numpy.testing import assert_allclose

from reason_sim.cli import (
    EXIT_COLLISION, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_OK, compare_command, main, parse_scenario,
    write_artifacts,
)
from reason_sim.export.csv_log import LOG_HEADER, read_log_csv
from reason_sim.export.plots import scores_svg
from reason_sim.export.summary import format_value, read_summary
from reason_sim.sim.runner import SimConfig, SimMode
from reason_sim.supervision.reasons import ReasonAccumulators, TriggerThresholds, evaluate
from reason_sim.world.scenario import default_scenario
from reason_sim.world.types import CyclistState, VehicleState

SHORT = """\
[road]
road_length = 40.0

[ego]
goal_x = 30.0

[cyclist]
x = 35.0
speed = 8.0

[sim]
duration_max = 15.0
log_every = 10
"""


def write_config(tmp_path, text, name="scenario.toml"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def run_cli(*args):
    return main(["--quiet", *args])


@pytest.mark.parametrize("text, message", [
    ("[reasons]\nk2 = -1.0\n", "k2 must be > 0"),
    ("[reasons]\nfoo = 1.0\n", "unknown key 'foo' in [reasons]"),
    ("[road]\nlane_width = \"wide\"\n", "must be a number"),
    ("[road\n", "scenario.toml"),
])
def test_bad_config_exits_with_config_error(tmp_path, capsys, text, message):
    config = write_config(tmp_path, text)
    assert run_cli("run", "--config", config, "--out", str(tmp_path / "out")) == EXIT_CONFIG
    err = capsys.readouterr().err
    assert err.startswith("error: ")
    assert message in err


def test_parse_scenario(tmp_path):
    cfg = parse_scenario(write_config(tmp_path, SHORT), "replanner")
    assert cfg.mode is SimMode.REPLANNER
    assert cfg.log_every == 10
    assert cfg.scenario.road.road_length == 40.0
    assert cfg.scenario.cyclist_start.v == 8.0
    assert cfg.scenario.sim_duration_max == 15.0
    assert cfg.scenario.reason_params == default_scenario().reason_params


def test_missing_config_file(tmp_path, capsys):
    code = run_cli("run", "--config", str(tmp_path / "nope.toml"), "--out", str(tmp_path / "out"))
    assert code == EXIT_CONFIG
    assert "not found" in capsys.readouterr().err


def test_infeasible_scenario(tmp_path, capsys):
    config = write_config(tmp_path, """\
[road]
road_length = 30.0

[ego]
goal_x = 20.0
goal_y = 1.75

[planner]
w4 = inf
""")
    assert run_cli("run", "--config", config, "--out", str(tmp_path / "out")) == EXIT_INFEASIBLE
    assert "scenario infeasible" in capsys.readouterr().err


def test_collision_exit_code(tmp_path, capsys):
    config = write_config(tmp_path, """\
[mpc]
d_stop = 0.0
k_gap = 50.0

[sim]
duration_max = 20.0
""")
    out = tmp_path / "out"
    assert run_cli("run", "--config", config, "--mode", "baseline", "--out", str(out)) == EXIT_COLLISION
    assert "collision in baseline run" in capsys.readouterr().err
    assert read_summary(out / "summary.txt")["arrival_time"] == "none"


def test_short_run_writes_artifacts(tmp_path):
    config = write_config(tmp_path, SHORT)
    out = tmp_path / "run"
    assert run_cli("run", "--config", config, "--mode", "replanner", "--out", str(out)) == EXIT_OK

    for name in ("log.csv", "paths.csv", "summary.txt", "trajectory.svg", "scores.svg",
                 "speed.svg", "tracking.svg", "distance.svg"):
        assert (out / name).is_file(), name
    header = (out / "log.csv").read_text(encoding="utf-8").splitlines()[0]
    assert header == ",".join(LOG_HEADER)
    summary = read_summary(out / "summary.txt")
    assert summary["mode"] == "replanner"
    assert summary["num_replans"] == "0"
    assert summary["arrival_time"] != "none"
    assert 'id="tau_line"' in (out / "scores.svg").read_text(encoding="utf-8")
    assert (out / "paths.csv").read_text(encoding="utf-8").startswith("path_id,x,y,theta,v_ref\n")


def test_artifacts_round_trip(tmp_path, replanner_log):
    cfg = SimConfig(default_scenario(), SimMode.REPLANNER)
    artifacts = write_artifacts(replanner_log, cfg, tmp_path / "replanner")

    assert 'id="trigger_markers"' in artifacts.scores_svg.read_text(encoding="utf-8")
    summary = read_summary(artifacts.summary_txt)
    assert summary == {key: format_value(value) for key, value in artifacts.summary.items()}
    assert int(summary["num_replans"]) == replanner_log.num_replans

    columns = read_log_csv(artifacts.log_csv)
    recs = replanner_log.records
    assert len(columns["t"]) == len(recs)
    assert_allclose(columns["x"], [r.ego.x for r in recs], rtol=1e-5, atol=1e-12)
    assert_allclose(columns["v"], [r.ego.v for r in recs], rtol=1e-5, atol=1e-12)
    assert_allclose(columns["r_driver"], [r.report.r_driver for r in recs], rtol=1e-5, atol=1e-12)
    assert_allclose(columns["t_behind_driver"],
                    [r.report.accumulators.t_behind_driver for r in recs], rtol=1e-5, atol=1e-12)
    np.testing.assert_array_equal(columns["trigger"], [int(r.trigger) for r in recs])
    np.testing.assert_array_equal(columns["path_id"], [r.active_path_id for r in recs])


def test_compare_is_reproducible(tmp_path):
    config = write_config(tmp_path, SHORT)
    first = tmp_path / "first"
    assert run_cli("compare", "--config", config, "--out", str(first)) == EXIT_OK
    for name in ("baseline/log.csv", "replanner/log.csv", "comparison.txt", "comparison.csv"):
        assert (first / name).is_file(), name
    lines = (first / "comparison.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == "metric,baseline,replanner"
    assert lines[-1].startswith("arrival_ratio,1,1")

    base, rep, _, _ = compare_command(config, tmp_path / "second")
    assert base.summary.mode == "baseline" and rep.summary.mode == "replanner"
    for name in ("baseline/log.csv", "replanner/log.csv", "baseline/trajectory.svg"):
        assert (first / name).read_bytes() == (tmp_path / "second" / name).read_bytes()


def test_logged_scores_follow_from_logged_state(tmp_path, replanner_log):
    sc = default_scenario()
    params = sc.reason_params
    artifacts = write_artifacts(replanner_log, SimConfig(sc, SimMode.REPLANNER), tmp_path / "rep")
    columns = read_log_csv(artifacts.log_csv)

    checked = 0
    for i in range(len(columns["t"])):
        ego = VehicleState(columns["x"][i], columns["y"][i], columns["theta"][i], columns["v"][i])
        cyclist = CyclistState(columns["cyclist_x"][i], columns["cyclist_y"][i])
        acc = ReasonAccumulators(columns["t_close_vru"][i], columns["t_behind_driver"][i])
        report = evaluate(ego, cyclist, sc.road, acc, params, sc.thresholds)
        # the comfort and driver scores jump at their distance thresholds
        if min(abs(report.distance - params.d_th_vru), abs(report.distance - params.d_th_driver)) < 0.01:
            continue
        assert report.distance == pytest.approx(columns["d_veh_vru"][i], abs=1e-3)
        assert report.r_policymaker == pytest.approx(columns["r_policy"][i], abs=1e-3)
        assert report.r_vru == pytest.approx(columns["r_vru"][i], abs=1e-3)
        assert report.r_driver == pytest.approx(columns["r_driver"][i], abs=1e-3)
        checked += 1
    assert checked > 0.9 * len(columns["t"])


def test_scores_plot_draws_each_distinct_tau(tmp_path, baseline_log):
    thresholds = TriggerThresholds(tau_policymaker=0.5, tau_vru=0.7, tau_driver=0.7)
    text = scores_svg(baseline_log, thresholds, tmp_path / "scores.svg").read_text(encoding="utf-8")
    assert 'id="tau_line_policymaker"' in text
    assert 'id="tau_line_vru_driver"' in text
    assert 'id="tau_line"' not in text
