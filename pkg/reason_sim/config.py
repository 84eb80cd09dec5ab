"""Default parameters and scenario-file loading for the overtaking simulator."""
from __future__ import annotations

import sys
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised on older interpreters only
    import tomli as tomllib

from .errors import ConfigError


# road
LANE_WIDTH = 3.5              # m
CENTERLINE_Y = 0.0            # m, dividing line between the two lanes
ROAD_LENGTH = 150.0           # m

# ego vehicle
EGO_START = (0.0, -1.75, 0.0, 0.0)   # x, y, theta, v
GOAL = (140.0, -1.75)         # m
GOAL_TOLERANCE = 1.0          # m
WHEELBASE = 2.7               # m
REAR_TO_CG = 1.35             # m, l_r
ACCEL_MIN = -4.0              # m/s^2
ACCEL_MAX = 2.5               # m/s^2
STEER_MAX = 0.5               # rad, symmetric
VEHICLE_MODEL = "rear_axle"   # or "slip_angle"

# cyclist
CYCLIST_START = (25.0, -1.75)
CYCLIST_SPEED = 3.0           # m/s

# reason models
K_POLICY = 0.2                # k1, 1/m
K_SAFETY = 0.2                # k2, 1/m
K_COMFORT = 0.2               # k3, 1/s
K_DRIVER = 0.2                # k4, 1/s
D_TH_VRU = 8.0                # m
T_TH_VRU = 5.0                # s
D_TH_DRIVER = 12.0            # m
T_TH_DRIVER = 10.0            # s
TAU = 0.7                     # same for every stakeholder
REPLAN_COOLDOWN = 1.0         # s between replans

# planner
GRID_RESOLUTION = 0.5         # m
HEADINGS = 16
PRIMITIVE_LENGTH = 2.0        # m
CURVATURES = (0.0, 0.05, -0.05, 0.1, -0.1, 0.15, -0.15)   # 1/m
SAMPLE_SPACING = 0.5          # m along each primitive
PLANNER_WEIGHTS = (1.0, 5.0, 10.0, 1000.0)   # length, smoothness, clearance, traffic rule
REPLAN_W4 = 2.0
D_SAFE = 3.0                  # m, clearance penalty horizon
CYCLIST_INFLATION = 1.5       # m
PREDICTION_HORIZON = 10.0     # s of constant-speed cyclist motion blocked out at replan time
FIELD_RESOLUTION = 0.25       # m, occupancy raster
ROAD_MARGIN = 1.0             # m kept from either road edge
V_MAX = 8.0                   # m/s
RAMP_DECEL = 3.0              # m/s^2, stopping ramp into the goal
MAX_EXPANSIONS = 400_000      # A* node expansions before giving up

# mpc
HORIZON = 20
Q_PERP = 10.0
Q_PAR = 1.0
Q_THETA = 5.0
Q_V = 2.0
R_ACCEL = 0.5
R_STEER = 5.0
RD_ACCEL = 0.5
RD_STEER = 10.0
TERMINAL_SCALE = 2.0
QP_REGULARIZATION = 1e-8
QP_TOL = 1e-6
QP_MAX_ITER = 100
GUARD_D_STOP = 6.0            # m
GUARD_K_GAP = 0.8             # 1/s

# simulation
TS = 0.1                      # s
SUBSTEPS = 10                 # RK4 substeps per control step
DURATION_MAX = 60.0           # s
COLLISION_DISTANCE = 0.5      # m
LOG_EVERY = 50                # steps between progress lines


def load_config(path) -> dict:
    """Read a TOML scenario file into a plain dictionary."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    try:
        return tomllib.loads(path.read_text(encoding="utf-8"))
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


__all__ = [
    "LANE_WIDTH", "CENTERLINE_Y", "ROAD_LENGTH",
    "EGO_START", "GOAL", "GOAL_TOLERANCE", "WHEELBASE", "REAR_TO_CG",
    "ACCEL_MIN", "ACCEL_MAX", "STEER_MAX", "VEHICLE_MODEL",
    "CYCLIST_START", "CYCLIST_SPEED",
    "K_POLICY", "K_SAFETY", "K_COMFORT", "K_DRIVER",
    "D_TH_VRU", "T_TH_VRU", "D_TH_DRIVER", "T_TH_DRIVER", "TAU", "REPLAN_COOLDOWN",
    "GRID_RESOLUTION", "HEADINGS", "PRIMITIVE_LENGTH", "CURVATURES", "SAMPLE_SPACING",
    "PLANNER_WEIGHTS", "REPLAN_W4", "D_SAFE", "CYCLIST_INFLATION", "PREDICTION_HORIZON", "FIELD_RESOLUTION",
    "ROAD_MARGIN", "V_MAX", "RAMP_DECEL", "MAX_EXPANSIONS",
    "HORIZON", "Q_PERP", "Q_PAR", "Q_THETA", "Q_V", "R_ACCEL", "R_STEER",
    "RD_ACCEL", "RD_STEER", "TERMINAL_SCALE", "QP_REGULARIZATION", "QP_TOL", "QP_MAX_ITER",
    "GUARD_D_STOP", "GUARD_K_GAP",
    "TS", "SUBSTEPS", "DURATION_MAX", "COLLISION_DISTANCE", "LOG_EVERY",
    "load_config",
]
