"""Command-line entry point: single runs and baseline-versus-replanner comparisons."""
from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import List, Optional, Tuple

from reason_sim.config import load_config
from reason_sim.errors import ConfigError, ScenarioInfeasibleError
from reason_sim.export.csv_log import write_log_csv, write_paths_csv
from reason_sim.export.plots import distance_svg, scores_svg, speed_svg, trajectory_svg, tracking_svg
from reason_sim.export.summary import write_comparison, write_summary
from reason_sim.sim.log import SimLog, SimSummary
from reason_sim.sim.runner import SimConfig, SimMode, run
from reason_sim.utils.logging import log, set_quiet, stage
from reason_sim.world.scenario import scenario_from_mapping, sim_options

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_COLLISION = 4


@dataclass(frozen=True)
class RunArtifacts:
    out_dir: Path
    log_csv: Path
    trajectory_svg: Path
    scores_svg: Path
    speed_svg: Path
    tracking_svg: Path
    distance_svg: Path
    paths_csv: Path
    summary_txt: Path
    summary: SimSummary


def parse_scenario(path, mode: SimMode = SimMode.BASELINE) -> SimConfig:
    log(f"loading scenario {path}")
    data = load_config(path)
    return SimConfig(scenario_from_mapping(data), SimMode(mode), **sim_options(data))


def write_artifacts(sim_log: SimLog, cfg: SimConfig, out_dir) -> RunArtifacts:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    sc = cfg.scenario
    summary = sim_log.summary()
    with stage(f"writing {cfg.mode.value} artifacts to {out}"):
        artifacts = RunArtifacts(
            out_dir=out,
            log_csv=write_log_csv(sim_log, out / "log.csv"),
            trajectory_svg=trajectory_svg(sim_log, sc.road, out / "trajectory.svg"),
            scores_svg=scores_svg(sim_log, sc.thresholds, out / "scores.svg"),
            speed_svg=speed_svg(sim_log, out / "speed.svg"),
            tracking_svg=tracking_svg(sim_log, out / "tracking.svg"),
            distance_svg=distance_svg(sim_log, sc.reason_params, out / "distance.svg"),
            paths_csv=write_paths_csv(sim_log.paths, out / "paths.csv"),
            summary_txt=write_summary(summary, out / "summary.txt"),
            summary=summary,
        )
    return artifacts


def _simulate(cfg: SimConfig) -> SimLog:
    with stage(f"{cfg.mode.value} run"):
        return run(cfg)


def run_command(config_path, mode, out_dir) -> RunArtifacts:
    cfg = parse_scenario(config_path, SimMode(mode))
    sim_log = _simulate(cfg)
    return write_artifacts(sim_log, cfg, out_dir)


def compare_command(config_path, out_dir) -> Tuple[RunArtifacts, RunArtifacts, Path, Path]:
    base_cfg = parse_scenario(config_path, SimMode.BASELINE)
    configs = (base_cfg, replace(base_cfg, mode=SimMode.REPLANNER))
    with ThreadPoolExecutor(max_workers=2) as pool:
        logs = list(pool.map(_simulate, configs))

    out = Path(out_dir)
    base, rep = (write_artifacts(sim_log, cfg, out / cfg.mode.value)
                 for sim_log, cfg in zip(logs, configs))
    txt, csv_path = write_comparison(base.summary, rep.summary,
                                     out / "comparison.txt", out / "comparison.csv")
    log(f"comparison written to {txt}")
    return base, rep, txt, csv_path


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reason_sim",
        description="Overtaking simulator with reason-triggered replanning.",
    )
    parser.add_argument("--quiet", action="store_true", help="suppress progress lines")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate one mode and write its artifacts")
    p_run.add_argument("--config", required=True, help="TOML scenario file")
    p_run.add_argument("--mode", choices=[m.value for m in SimMode], default=SimMode.BASELINE.value)
    p_run.add_argument("--out", required=True, help="output directory")

    p_cmp = sub.add_parser("compare", help="simulate both modes and compare them")
    p_cmp.add_argument("--config", required=True, help="TOML scenario file")
    p_cmp.add_argument("--out", required=True, help="output directory")
    return parser


def _error(message) -> None:
    sys.stderr.write(f"error: {message}\n")
    sys.stderr.flush()


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    set_quiet(args.quiet)
    try:
        if args.command == "run":
            results = [run_command(args.config, args.mode, args.out)]
        else:
            base, rep, _, _ = compare_command(args.config, args.out)
            results = [base, rep]
    except FileNotFoundError as exc:
        _error(f"config file not found: {exc.filename or exc}")
        return EXIT_CONFIG
    except ConfigError as exc:
        _error(exc)
        return EXIT_CONFIG
    except ScenarioInfeasibleError as exc:
        _error(exc)
        return EXIT_INFEASIBLE

    collided = [a.summary.mode for a in results if a.summary.collided]
    if collided:
        _error(f"collision in {', '.join(collided)} run")
        return EXIT_COLLISION
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
