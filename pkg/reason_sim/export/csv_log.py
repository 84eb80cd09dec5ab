"""CSV dumps of a simulation log and of the reference paths it followed."""
from __future__ import annotations

import csv
from pathlib import Path
from typing import Dict, Iterable, Iterator, List

import numpy as np

from reason_sim.planning.path import ReferencePath
from reason_sim.sim.log import SimLog, StepRecord

LOG_HEADER = (
    "t", "x", "y", "theta", "v", "a", "delta", "cyclist_x", "cyclist_y", "d_veh_vru",
    "r_policy", "r_vru_safety", "r_vru_comfort", "r_vru", "r_driver",
    "t_close_vru", "t_behind_driver", "trigger", "path_id", "qp_iters", "qp_residual",
)
PATHS_HEADER = ("path_id", "x", "y", "theta", "v_ref")


def fmt(value: float) -> str:
    return f"{value:.6g}"


def record_row(r: StepRecord) -> List[str]:
    rep = r.report
    acc = rep.accumulators
    floats = (
        r.t, r.ego.x, r.ego.y, r.ego.theta, r.ego.v, r.control.a, r.control.delta,
        r.cyclist.x, r.cyclist.y, rep.distance,
        rep.r_policymaker, rep.r_vru_safety, rep.r_vru_comfort, rep.r_vru, rep.r_driver,
        acc.t_close_vru, acc.t_behind_driver,
    )
    return [fmt(v) for v in floats] + [
        str(int(r.trigger)), str(r.active_path_id), str(r.qp_iters), fmt(r.qp_residual),
    ]


def _write(path, header: Iterable[str], rows: Iterable[List[str]]) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def write_log_csv(sim_log: SimLog, path) -> Path:
    return _write(path, LOG_HEADER, (record_row(r) for r in sim_log.records))


def _path_rows(paths: Iterable[ReferencePath]) -> Iterator[List[str]]:
    for ref in paths:
        for path_id, x, y, theta, v in ref.rows():
            yield [str(path_id), fmt(x), fmt(y), fmt(theta), fmt(v)]


def write_paths_csv(paths: Iterable[ReferencePath], path) -> Path:
    return _write(path, PATHS_HEADER, _path_rows(paths))


def read_log_csv(path) -> Dict[str, np.ndarray]:
    """Columns of a log file keyed by header name."""
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader)
        rows = [[float(v) for v in row] for row in reader]
    data = np.array(rows, dtype=float).reshape(-1, len(header))
    return {name: data[:, i] for i, name in enumerate(header)}


__all__ = [
    "LOG_HEADER",
    "PATHS_HEADER",
    "fmt",
    "record_row",
    "write_log_csv",
    "write_paths_csv",
    "read_log_csv",
]
