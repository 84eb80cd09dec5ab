"""SVG result panels: trajectory, reason scores, speed, tracking error, distance."""
from __future__ import annotations

from pathlib import Path
from typing import Dict, List

import numpy as np

from reason_sim._shared import Figure
from reason_sim.sim.log import SimLog
from reason_sim.supervision.reasons import ReasonParams, TriggerThresholds
from reason_sim.world.types import RoadGeometry

ANNOTATE_EVERY = 5.0      # s between timestamp labels on the trajectory
TAU_STYLES = ("--", ":", "-.")


def _save(fig: Figure, path) -> Path:
    path = Path(path)
    try:
        fig.tight_layout()
    except Exception:
        pass
    fig.savefig(path, format="svg", metadata={"Date": None})
    return path


def _series(sim_log: SimLog):
    recs = sim_log.records
    return {
        "t": np.array([r.t for r in recs]),
        "x": np.array([r.ego.x for r in recs]),
        "y": np.array([r.ego.y for r in recs]),
        "v": np.array([r.ego.v for r in recs]),
        "cx": np.array([r.cyclist.x for r in recs]),
        "cy": np.array([r.cyclist.y for r in recs]),
        "d": np.array([r.report.distance for r in recs]),
        "r_policy": np.array([r.report.r_policymaker for r in recs]),
        "r_vru": np.array([r.report.r_vru for r in recs]),
        "r_driver": np.array([r.report.r_driver for r in recs]),
        "e_perp": np.array([r.e_perp for r in recs]),
        "trigger": np.array([r.trigger for r in recs], dtype=bool),
    }


def tau_groups(thresholds: TriggerThresholds) -> Dict[float, List[str]]:
    """Stakeholder names keyed by threshold value, in policymaker, VRU, driver order."""
    groups: Dict[float, List[str]] = {}
    for name, tau in (("policymaker", thresholds.tau_policymaker), ("vru", thresholds.tau_vru),
                      ("driver", thresholds.tau_driver)):
        groups.setdefault(tau, []).append(name)
    return groups


def _title(sim_log: SimLog, what: str) -> str:
    return f"{what} ({sim_log.mode})"


def trajectory_svg(sim_log: SimLog, road: RoadGeometry, path) -> Path:
    s = _series(sim_log)
    fig = Figure(figsize=(10, 3))
    ax = fig.add_subplot(1, 1, 1)
    x_end = road.road_length
    ax.hlines([road.y_min, road.y_max], 0, x_end, colors="black", linewidth=1.0)
    ax.hlines(road.centerline_y, 0, x_end, colors="grey", linestyles="dashed", linewidth=1.0)
    for ref in sim_log.paths:
        ax.plot(ref.samples[:, 0], ref.samples[:, 1], ":", linewidth=0.8,
                label=f"reference {ref.id}")
    ax.plot(s["x"], s["y"], "-", color="tab:blue", label="ego")
    ax.plot(s["cx"], s["cy"], "-", color="tab:red", label="cyclist")

    stride = max(1, int(round(ANNOTATE_EVERY / sim_log.Ts)))
    for i in range(0, len(s["t"]), stride):
        label = f"{s['t'][i]:.0f}s"
        ax.plot(s["x"][i], s["y"][i], "o", color="tab:blue", markersize=3)
        ax.annotate(label, (s["x"][i], s["y"][i]), textcoords="offset points", xytext=(0, 5),
                    fontsize=6, color="tab:blue")
        ax.plot(s["cx"][i], s["cy"][i], "s", color="tab:red", markersize=3)
        ax.annotate(label, (s["cx"][i], s["cy"][i]), textcoords="offset points", xytext=(0, -9),
                    fontsize=6, color="tab:red")

    ax.set_xlim(0, x_end)
    ax.set_ylim(road.y_min - 0.5, road.y_max + 0.5)
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.set_title(_title(sim_log, "Trajectory"))
    ax.legend(loc="upper right", fontsize=6)
    return _save(fig, path)


def scores_svg(sim_log: SimLog, thresholds: TriggerThresholds, path) -> Path:
    s = _series(sim_log)
    fig = Figure(figsize=(8, 4))
    ax = fig.add_subplot(1, 1, 1)
    ax.plot(s["t"], s["r_policy"], label="policymaker")
    ax.plot(s["t"], s["r_vru"], label="VRU")
    ax.plot(s["t"], s["r_driver"], label="driver")
    groups = tau_groups(thresholds)
    for (tau, names), style in zip(groups.items(), TAU_STYLES):
        label = f"tau = {tau:g}" if len(groups) == 1 else f"tau = {tau:g} ({', '.join(names)})"
        line = ax.axhline(tau, color="black", linestyle=style, linewidth=1.0, label=label)
        line.set_gid("tau_line" if len(groups) == 1 else "tau_line_" + "_".join(names))

    hits = s["trigger"]
    low = np.minimum(np.minimum(s["r_policy"], s["r_vru"]), s["r_driver"])
    (markers,) = ax.plot(s["t"][hits], low[hits], "v", color="tab:purple", markersize=5,
                         label="trigger")
    markers.set_gid("trigger_markers")

    ax.set_ylim(-0.05, 1.05)
    ax.set_xlabel("t (s)")
    ax.set_ylabel("reason score")
    ax.set_title(_title(sim_log, "Reason scores"))
    ax.legend(loc="lower left", fontsize=7)
    return _save(fig, path)


def speed_svg(sim_log: SimLog, path) -> Path:
    s = _series(sim_log)
    fig = Figure(figsize=(8, 3))
    ax = fig.add_subplot(1, 1, 1)
    ax.plot(s["t"], s["v"], label="ego")
    if sim_log.records:
        ax.axhline(sim_log.records[0].cyclist.v, color="tab:red", linestyle=":", label="cyclist")
    if len(sim_log.paths):
        v_max = max(float(ref.samples[:, 3].max()) for ref in sim_log.paths)
        ax.axhline(v_max, color="grey", linestyle="--", linewidth=0.8, label="v_max")
    ax.set_xlabel("t (s)")
    ax.set_ylabel("v (m/s)")
    ax.set_title(_title(sim_log, "Speed"))
    ax.legend(loc="lower right", fontsize=7)
    return _save(fig, path)


def tracking_svg(sim_log: SimLog, path) -> Path:
    s = _series(sim_log)
    fig = Figure(figsize=(8, 3))
    ax = fig.add_subplot(1, 1, 1)
    ax.plot(s["t"], s["e_perp"])
    ax.axhline(0.0, color="grey", linewidth=0.8)
    replans = [r.t for r in sim_log.records if r.replan_event]
    if replans:
        ax.vlines(replans, *ax.get_ylim(), colors="tab:purple", linestyles="dotted", linewidth=0.8)
    ax.set_xlabel("t (s)")
    ax.set_ylabel("e_perp (m)")
    ax.set_title(_title(sim_log, "Lateral tracking error"))
    return _save(fig, path)


def distance_svg(sim_log: SimLog, params: ReasonParams, path) -> Path:
    s = _series(sim_log)
    fig = Figure(figsize=(8, 3))
    ax = fig.add_subplot(1, 1, 1)
    ax.plot(s["t"], s["d"], label="ego-cyclist distance")
    ax.axhline(params.d_th_vru, color="tab:orange", linestyle="--", label="d_th VRU")
    ax.axhline(params.d_th_driver, color="tab:green", linestyle="--", label="d_th driver")
    ax.set_xlabel("t (s)")
    ax.set_ylabel("distance (m)")
    ax.set_title(_title(sim_log, "Distance to cyclist"))
    ax.legend(loc="upper right", fontsize=7)
    return _save(fig, path)


__all__ = ["tau_groups", "trajectory_svg", "scores_svg", "speed_svg", "tracking_svg", "distance_svg"]
