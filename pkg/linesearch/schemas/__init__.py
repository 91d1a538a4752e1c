"""Result schemas."""

from .results import (
    CheckResult,
    ClosedFormCR,
    DetectionDistribution,
    Expectation,
    HeatmapGrid,
    HeatmapQuantity,
    LowerBoundParams,
    RecurrenceSolution,
    Region,
    SimulationResult,
    SupResult,
    TunedHybrid,
    WeightedPass,
)

__all__ = [
    "CheckResult",
    "ClosedFormCR",
    "DetectionDistribution",
    "Expectation",
    "HeatmapGrid",
    "HeatmapQuantity",
    "LowerBoundParams",
    "RecurrenceSolution",
    "Region",
    "SimulationResult",
    "SupResult",
    "TunedHybrid",
    "WeightedPass",
]
