"""Constant-curvature motion primitives on a (position, heading) lattice."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Tuple

import numpy as np

from reason_sim import config
from reason_sim.errors import InfeasiblePrimitiveError
from reason_sim.world.types import BicycleParams


@dataclass(frozen=True, eq=False)
class MotionPrimitive:
    """One arc leaving a lattice node with a given start heading.

    `samples` holds (dx, dy, theta) offsets from the start node, taken every
    sample spacing along the arc, start excluded and arc end included. The
    lattice edge ends at the snapped node (di, dj, end_heading).
    """
    curvature: float
    arc_length: float
    start_heading: int
    samples: np.ndarray
    di: int
    dj: int
    end_heading: int
    resolution: float

    @property
    def heading_change(self) -> float:
        return self.curvature * self.arc_length

    @property
    def chord(self) -> float:
        """Straight distance between the snapped start and end nodes."""
        return self.resolution * math.hypot(self.di, self.dj)

    @property
    def edge_length(self) -> float:
        return max(self.arc_length, self.chord)

    @property
    def snap_error(self) -> Tuple[float, float]:
        dx, dy = self.samples[-1, 0], self.samples[-1, 1]
        return abs(dx - self.di * self.resolution), abs(dy - self.dj * self.resolution)


class PrimitiveSet:
    """Primitives grouped by start heading index."""

    def __init__(self, by_heading: Dict[int, List[MotionPrimitive]], headings: int, resolution: float):
        self._by_heading = by_heading
        self.headings = headings
        self.resolution = resolution

    def __getitem__(self, heading_index: int) -> List[MotionPrimitive]:
        return self._by_heading[heading_index % self.headings]

    def __iter__(self):
        for h in range(self.headings):
            yield from self._by_heading[h]

    def __len__(self) -> int:
        return sum(len(v) for v in self._by_heading.values())

    def heading_angle(self, index: int) -> float:
        return (index % self.headings) * 2.0 * math.pi / self.headings

    def heading_index(self, theta: float) -> int:
        return int(round(theta / (2.0 * math.pi / self.headings))) % self.headings


def arc_offsets(theta0: float, curvature: float, s) -> np.ndarray:
    """(dx, dy, theta) along a constant-curvature arc starting at the origin."""
    s = np.asarray(s, dtype=float)
    if abs(curvature) < 1e-12:
        return np.column_stack([s * math.cos(theta0), s * math.sin(theta0), np.full_like(s, theta0)])
    theta = theta0 + curvature * s
    dx = (np.sin(theta) - math.sin(theta0)) / curvature
    dy = (math.cos(theta0) - np.cos(theta)) / curvature
    return np.column_stack([dx, dy, theta])


def generate_primitives(p: BicycleParams, arc_length: float = config.PRIMITIVE_LENGTH,
                        curvatures: Iterable[float] = config.CURVATURES,
                        headings: int = config.HEADINGS,
                        resolution: float = config.GRID_RESOLUTION,
                        sample_spacing: float = config.SAMPLE_SPACING) -> PrimitiveSet:
    if arc_length <= 0:
        raise InfeasiblePrimitiveError("arc_length must be > 0")
    curvatures = tuple(curvatures)
    limit = p.max_curvature
    for kappa in curvatures:
        if abs(kappa) > limit:
            raise InfeasiblePrimitiveError(
                f"curvature {kappa} exceeds the steering limit {limit:.4f} 1/m"
            )
    n_samples = max(1, int(math.ceil(arc_length / sample_spacing - 1e-9)))
    s = np.linspace(arc_length / n_samples, arc_length, n_samples)
    step = 2.0 * math.pi / headings

    by_heading: Dict[int, List[MotionPrimitive]] = {}
    for h in range(headings):
        theta0 = h * step
        prims = []
        for kappa in curvatures:
            samples = arc_offsets(theta0, kappa, s)
            dx, dy, theta_end = samples[-1]
            prims.append(MotionPrimitive(
                curvature=float(kappa),
                arc_length=float(arc_length),
                start_heading=h,
                samples=samples,
                di=int(round(dx / resolution)),
                dj=int(round(dy / resolution)),
                end_heading=int(round(theta_end / step)) % headings,
                resolution=resolution,
            ))
        by_heading[h] = prims
    return PrimitiveSet(by_heading, headings, resolution)


__all__ = ["MotionPrimitive", "PrimitiveSet", "arc_offsets", "generate_primitives"]
