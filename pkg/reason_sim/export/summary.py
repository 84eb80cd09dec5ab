"""Plain-text run summaries and the baseline-versus-replanner comparison."""
from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from reason_sim.sim.log import SimSummary

COMPARISON_KEYS = (
    "arrival_time", "num_replans", "min_distance",
    "min_r_policy", "min_r_vru", "min_r_driver", "first_trigger_time", "collided",
)


def format_value(value) -> str:
    """'none' for missing values, 6 significant digits for floats."""
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def write_summary(summary: SimSummary, path) -> Path:
    path = Path(path)
    lines = [f"{key} = {format_value(value)}" for key, value in summary.items()]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_summary(path) -> Dict[str, str]:
    out = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if "=" in line:
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def arrival_ratio(baseline: SimSummary, replanner: SimSummary) -> Optional[float]:
    """arrival(replanner) / arrival(baseline); None unless both arrived."""
    if baseline.arrival_time is None or replanner.arrival_time is None:
        return None
    if baseline.arrival_time <= 0:
        return math.nan
    return replanner.arrival_time / baseline.arrival_time


def comparison_rows(baseline: SimSummary, replanner: SimSummary) -> List[Tuple[str, str, str]]:
    rows = [(key, format_value(getattr(baseline, key)), format_value(getattr(replanner, key)))
            for key in COMPARISON_KEYS]
    ratio = format_value(arrival_ratio(baseline, replanner))
    rows.append(("arrival_ratio", ratio, ratio))
    return rows


def write_comparison(baseline: SimSummary, replanner: SimSummary, txt_path, csv_path) -> Tuple[Path, Path]:
    rows = comparison_rows(baseline, replanner)
    width = max(len(r[0]) for r in rows)
    lines = [f"{'metric':<{width}}  {'baseline':>12}  {'replanner':>12}"]
    lines += [f"{key:<{width}}  {b:>12}  {r:>12}" for key, b, r in rows[:-1]]
    lines.append(f"{'arrival_ratio':<{width}}  {rows[-1][1]:>12}")
    txt_path = Path(txt_path)
    txt_path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    csv_path = Path(csv_path)
    with open(csv_path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(("metric", "baseline", "replanner"))
        writer.writerows(rows)
    return txt_path, csv_path


__all__ = [
    "COMPARISON_KEYS",
    "format_value",
    "write_summary",
    "read_summary",
    "arrival_ratio",
    "comparison_rows",
    "write_comparison",
]
