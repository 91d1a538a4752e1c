"""Environment and strategy parameters."""

import math
from enum import Enum
from typing import Tuple

from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from ..core.exceptions import (
    DivergentFastRatio,
    InvalidProbability,
    InvalidScoutRatio,
    InvalidSpeed,
    RatioNotAboveOne,
    UnsolvableInstance,
)


class StrategyKind(str, Enum):
    """The three search algorithms."""

    FAST = "fast"
    SLOW = "slow"
    HYBRID = "hybrid"


class SearchParams(BaseModel):
    """The environment: detection probability per fast pass and the slow speed."""

    model_config = ConfigDict(frozen=True)

    p: float
    v: float

    @field_validator("p")
    @classmethod
    def _check_p(cls, p: float) -> float:
        if math.isnan(p) or not 0.0 <= p <= 1.0:
            raise InvalidProbability(p)
        return p

    @field_validator("v")
    @classmethod
    def _check_v(cls, v: float) -> float:
        if math.isnan(v) or not 0.0 <= v <= 1.0:
            raise InvalidSpeed(v)
        return v

    @property
    def solvable(self) -> bool:
        """False only when neither speed can ever detect the target."""
        return not (self.p == 0.0 and self.v == 0.0)


class StrategySpec(BaseModel):
    """Which algorithm to run, with its expansion ratio a and scout-ahead ratio b."""

    model_config = ConfigDict(frozen=True)

    kind: StrategyKind
    a: float
    b: float = 0.0

    @field_validator("a")
    @classmethod
    def _check_a(cls, a: float) -> float:
        if math.isnan(a) or not a > 1.0:
            raise RatioNotAboveOne(a)
        return a

    @field_validator("b")
    @classmethod
    def _check_b(cls, b: float) -> float:
        if math.isnan(b) or not 0.0 <= b <= 1.0:
            raise InvalidScoutRatio(b)
        return b

    @model_validator(mode="after")
    def _check_b_kind(self) -> "StrategySpec":
        if self.kind is not StrategyKind.HYBRID and self.b != 0.0:
            raise InvalidScoutRatio(self.b, reason=f"must be 0 for the {self.kind.value} strategy")
        return self


def validate_params(params: SearchParams, spec: StrategySpec) -> Tuple[SearchParams, StrategySpec]:
    """Check the cross-field invariants of an (environment, strategy) pair and return it unchanged."""
    if not params.solvable:
        raise UnsolvableInstance(params.p, params.v)
    if spec.kind is StrategyKind.FAST:
        if params.p == 0.0:
            raise DivergentFastRatio(params.p, spec.a)
        if params.p < 1.0 and spec.a >= 1.0 / (1.0 - params.p):
            raise DivergentFastRatio(params.p, spec.a)
    return params, spec
