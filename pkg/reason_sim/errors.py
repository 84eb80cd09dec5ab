"""Exception types raised across the simulator."""
from __future__ import annotations


class ReasonSimError(Exception):
    """Base class for every error raised by reason_sim."""


class ConfigError(ReasonSimError, ValueError):
    """Invalid scenario configuration or violated parameter invariant."""


class OffRoadError(ReasonSimError, ValueError):
    def __init__(self, message: str = "off-road"):
        super().__init__(message)


class SteeringSingularityError(ReasonSimError, ValueError):
    def __init__(self, message: str = "steering singularity"):
        super().__init__(message)


class InfeasiblePrimitiveError(ReasonSimError, ValueError):
    """Requested curvature cannot be driven with the vehicle's steering limit."""


class ReferenceExhaustedError(ReasonSimError, IndexError):
    def __init__(self, message: str = "reference exhausted"):
        super().__init__(message)


class NoPathError(ReasonSimError, RuntimeError):
    """The lattice search could not reach the goal under the given weights."""


class ScenarioInfeasibleError(ReasonSimError, RuntimeError):
    def __init__(self, message: str = "scenario infeasible"):
        super().__init__(message)


__all__ = [
    "ReasonSimError",
    "ConfigError",
    "OffRoadError",
    "SteeringSingularityError",
    "InfeasiblePrimitiveError",
    "ReferenceExhaustedError",
    "NoPathError",
    "ScenarioInfeasibleError",
]
