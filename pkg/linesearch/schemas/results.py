"""Result schemas returned by the services and serialized by the CLI."""

from enum import Enum, IntEnum
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..core.exceptions import InvalidBeta, InvalidGrid


class ClosedFormCR(BaseModel):
    """A competitive ratio from one of the closed-form results."""

    model_config = ConfigDict(frozen=True)

    value: float = Field(..., description="Dimensionless ratio, >= 1 (may be +inf)")
    formula_id: str = Field(..., description="Which closed form produced the value")

    def __float__(self) -> float:
        return self.value


class WeightedPass(BaseModel):
    """A pass time together with the probability that detection happens exactly there."""

    model_config = ConfigDict(frozen=True)

    time: float
    probability: float
    speed_class: str
    round_index: int


class DetectionDistribution(BaseModel):
    """Distribution of the detection time over the passes of one target."""

    model_config = ConfigDict(frozen=True)

    target: float
    passes: List[WeightedPass]
    absorbed: bool = Field(..., description="True when a slow pass ends the list")
    residual: float = Field(..., description="Probability mass not assigned to any listed pass")
    tail_bound: float = Field(..., description="Upper bound on the expectation contributed by omitted passes")
    remainder: float = Field(0.0, description="Exact expectation of the passes past the listed ones, summed in closed form")

    @property
    def expectation(self) -> float:
        return sum(entry.probability * entry.time for entry in self.passes) + self.remainder

    @property
    def total_probability(self) -> float:
        return sum(entry.probability for entry in self.passes) + self.residual


class Expectation(BaseModel):
    """An expected detection time and the certified bound on its truncation error."""

    model_config = ConfigDict(frozen=True)

    value: float
    tail_bound: float


class SupResult(BaseModel):
    """Worst sampled expected competitive ratio over targets."""

    model_config = ConfigDict(frozen=True)

    sup_cr: float
    argmax_d: float
    argmax_round: int
    per_round_profile: List[Tuple[int, float]]


class SimulationResult(BaseModel):
    """Monte Carlo estimate of the expected detection time."""

    model_config = ConfigDict(frozen=True)

    mean: float
    standard_error: float
    trials: int
    seed: int


class TunedHybrid(BaseModel):
    """Numerically optimized hybrid parameters for one (p, v)."""

    model_config = ConfigDict(frozen=True)

    p: float
    v: float
    a_star: float
    b_star: float
    cr_star: float
    cr1: float
    cr2: float
    iterations: int
    converged: bool


class Region(IntEnum):
    """Which approach wins at a (p, v) cell; the integer is the raster code."""

    FAST_BEST = 0
    SLOW_BEATS_FAST = 1
    HYBRID_BEATS_FAST_SLOW_DOES_NOT = 2
    DEGENERATE = 3


class HeatmapQuantity(str, Enum):
    """Quantities a heatmap cell can hold."""

    CR_BEST = "cr_best"
    CR_FAST = "cr_fast"
    CR_SLOW = "cr_slow"
    CR_HYBRID = "cr_hybrid"
    A_STAR = "a_star"
    B_STAR = "b_star"
    IMPROVEMENT = "improvement"
    REGION = "region"


class HeatmapGrid(BaseModel):
    """A (p, v)-indexed grid of scalar results; values are rows of v, columns of p."""

    model_config = ConfigDict(frozen=True)

    quantity: HeatmapQuantity
    p_axis: List[float]
    v_axis: List[float]
    values: List[List[float]]
    meta: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_shape(self) -> "HeatmapGrid":
        if len(self.values) != len(self.v_axis):
            raise InvalidGrid("values", f"expected {len(self.v_axis)} rows, got {len(self.values)}")
        for row in self.values:
            if len(row) != len(self.p_axis):
                raise InvalidGrid("values", f"expected {len(self.p_axis)} columns, got {len(row)}")
        return self

    def cells(self) -> List[Tuple[float, float, float]]:
        """(p, v, value) triples, v outer and p inner."""
        return [(p, v, self.values[row][col]) for row, v in enumerate(self.v_axis) for col, p in enumerate(self.p_axis)]


class LowerBoundParams(BaseModel):
    """Slow speed and exploration rate of the p = 0 lower bound."""

    model_config = ConfigDict(frozen=True)

    v: float
    beta: float

    @model_validator(mode="after")
    def _check_beta(self) -> "LowerBoundParams":
        if not (0.0 < self.v <= 1.0) or not self.beta * self.v > 1.0:
            raise InvalidBeta(self.v, self.beta)
        return self


class RecurrenceSolution(BaseModel):
    """Discriminant-like scalar x and the exploration times t_0..t_n."""

    model_config = ConfigDict(frozen=True)

    x: float
    t: List[float]


class CheckResult(BaseModel):
    """Outcome of one acceptance check."""

    model_config = ConfigDict(frozen=True)

    name: str
    group: str
    expected: str
    actual: str
    tolerance: str
    passed: bool
    note: Optional[str] = None
