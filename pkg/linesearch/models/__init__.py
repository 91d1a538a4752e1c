"""Domain types shared by all services."""

from .params import SearchParams, StrategyKind, StrategySpec, validate_params
from .trajectory import Direction, Leg, PassEvent, RoundPlan, Segment, SpeedClass, Trajectory, side

__all__ = [
    "SearchParams",
    "StrategyKind",
    "StrategySpec",
    "validate_params",
    "Direction",
    "Leg",
    "PassEvent",
    "RoundPlan",
    "Segment",
    "SpeedClass",
    "Trajectory",
    "side",
]
