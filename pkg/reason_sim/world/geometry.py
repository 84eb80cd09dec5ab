"""Road geometry queries: lanes, centerline offset and ego-cyclist distance."""
from __future__ import annotations

import math

from reason_sim.errors import OffRoadError
from reason_sim.world.types import CyclistState, Lane, RoadGeometry, VehicleState


def _check_on_road(y: float, road: RoadGeometry):
    if not (road.y_min <= y <= road.y_max):
        raise OffRoadError()


def lane_of(y: float, road: RoadGeometry) -> Lane:
    """Classify a lateral position; only the exact centerline value is Centerline."""
    _check_on_road(y, road)
    if y < road.centerline_y:
        return Lane.RIGHT
    if y > road.centerline_y:
        return Lane.LEFT
    return Lane.CENTERLINE


def signed_lateral_displacement(state: VehicleState, road: RoadGeometry) -> float:
    """Distance to the centerline, positive while the ego is in its legal lane."""
    _check_on_road(state.y, road)
    return road.centerline_y - state.y


def ego_cyclist_distance(ego: VehicleState, cyclist: CyclistState) -> float:
    return math.hypot(cyclist.x - ego.x, cyclist.y - ego.y)


__all__ = ["lane_of", "signed_lateral_displacement", "ego_cyclist_distance"]
