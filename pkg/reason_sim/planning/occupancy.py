"""Rasterized road: obstacle cells, clearance distance and the prohibited lane."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Tuple

import numpy as np
from scipy import ndimage

from reason_sim import config
from reason_sim.world.types import CyclistState, RoadGeometry


@dataclass(frozen=True, eq=False)
class OccupancyField:
    """Grid over the road with cell (row j, column i) centred at
    x = (i + 0.5) * resolution, y = y_min + (j + 0.5) * resolution.
    """
    road: RoadGeometry
    resolution: float
    obstacle: np.ndarray      # bool, (ny, nx)
    distance: np.ndarray      # m to the nearest obstacle cell, 0 inside obstacles
    road_margin: float = config.ROAD_MARGIN

    @property
    def shape(self) -> Tuple[int, int]:
        return self.obstacle.shape

    def cell_centers(self) -> Tuple[np.ndarray, np.ndarray]:
        ny, nx = self.shape
        xs = (np.arange(nx) + 0.5) * self.resolution
        ys = self.road.y_min + (np.arange(ny) + 0.5) * self.resolution
        return xs, ys

    def _cells(self, xs: np.ndarray, ys: np.ndarray):
        ny, nx = self.shape
        i = np.clip(np.floor(xs / self.resolution).astype(int), 0, nx - 1)
        j = np.clip(np.floor((ys - self.road.y_min) / self.resolution).astype(int), 0, ny - 1)
        return j, i

    def drivable(self, xs, ys) -> np.ndarray:
        """Inside the road, at least road_margin away from both edges."""
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        return ((xs >= 0.0) & (xs <= self.road.road_length)
                & (ys >= self.road.y_min + self.road_margin)
                & (ys <= self.road.y_max - self.road_margin))

    def query(self, xs, ys):
        """(drivable, in_obstacle, clearance, prohibited) for each sample point."""
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        j, i = self._cells(xs, ys)
        return (
            self.drivable(xs, ys),
            self.obstacle[j, i],
            self.distance[j, i],
            ys > self.road.centerline_y,
        )


def _grid_shape(road: RoadGeometry, resolution: float) -> Tuple[int, int]:
    nx = int(math.ceil(road.road_length / resolution))
    ny = int(math.ceil((road.y_max - road.y_min) / resolution))
    return ny, nx


def field_from_mask(road: RoadGeometry, obstacle: np.ndarray, resolution: float,
                    road_margin: float = config.ROAD_MARGIN) -> OccupancyField:
    obstacle = np.asarray(obstacle, dtype=bool)
    if obstacle.shape != _grid_shape(road, resolution):
        raise ValueError("obstacle mask does not match the road grid")
    if obstacle.any():
        distance = ndimage.distance_transform_edt(~obstacle) * resolution
    else:
        distance = np.full(obstacle.shape, np.inf)
    return OccupancyField(road, resolution, obstacle, distance, road_margin)


def build_field(road: RoadGeometry, discs: Iterable[Tuple[float, float, float]] = (),
                resolution: float = config.FIELD_RESOLUTION,
                road_margin: float = config.ROAD_MARGIN) -> OccupancyField:
    """Field whose obstacles are the cells with centres inside any (x, y, radius) disc."""
    ny, nx = _grid_shape(road, resolution)
    xs = (np.arange(nx) + 0.5) * resolution
    ys = road.y_min + (np.arange(ny) + 0.5) * resolution
    gx, gy = np.meshgrid(xs, ys)
    obstacle = np.zeros((ny, nx), dtype=bool)
    for cx, cy, radius in discs:
        obstacle |= (gx - cx) ** 2 + (gy - cy) ** 2 <= radius ** 2
    return field_from_mask(road, obstacle, resolution, road_margin)


def swept_mask(road: RoadGeometry, start: Tuple[float, float], end: Tuple[float, float],
               radius: float, resolution: float = config.FIELD_RESOLUTION) -> np.ndarray:
    """Cells whose centres lie within `radius` of the segment start-end."""
    ny, nx = _grid_shape(road, resolution)
    xs = (np.arange(nx) + 0.5) * resolution
    ys = road.y_min + (np.arange(ny) + 0.5) * resolution
    gx, gy = np.meshgrid(xs, ys)
    (x0, y0), (x1, y1) = start, end
    dx, dy = x1 - x0, y1 - y0
    length2 = dx * dx + dy * dy
    if length2 > 0.0:
        f = np.clip(((gx - x0) * dx + (gy - y0) * dy) / length2, 0.0, 1.0)
    else:
        f = np.zeros_like(gx)
    return (gx - (x0 + f * dx)) ** 2 + (gy - (y0 + f * dy)) ** 2 <= radius ** 2


def cyclist_field(road: RoadGeometry, cyclist: Optional[CyclistState],
                  inflation: float = config.CYCLIST_INFLATION,
                  resolution: float = config.FIELD_RESOLUTION,
                  road_margin: float = config.ROAD_MARGIN,
                  horizon: float = 0.0) -> OccupancyField:
    """Field with the cyclist as an inflated disc swept along its constant-speed
    prediction over `horizon` seconds. None gives an empty road.
    """
    if cyclist is None:
        return build_field(road, (), resolution, road_margin)
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    end_x = min(cyclist.x + cyclist.v * horizon, road.road_length)
    mask = swept_mask(road, (cyclist.x, cyclist.y), (max(end_x, cyclist.x), cyclist.y),
                      inflation, resolution)
    return field_from_mask(road, mask, resolution, road_margin)


__all__ = ["OccupancyField", "field_from_mask", "build_field", "swept_mask", "cyclist_field"]
