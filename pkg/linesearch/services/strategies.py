"""Search strategies: trajectory generators and closed-form competitive ratios.

Three algorithms are covered:

* Fast: every move at speed 1; round i visits (-1)^(i+1) a^i and returns.
* Slow: re-traverse the explored part fast, explore new ground at speed v, return fast.
* Hybrid: Slow plus a fast "scout ahead" leg covering a fraction b of the gap to the next
  same-side turnaround point.

The hybrid kernels accept numpy arrays so the tuner can evaluate whole grids at once; the
public scalar functions validate their inputs and wrap the value in a ClosedFormCR.
"""

import math
from typing import Any, Callable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from ..config import settings
from ..core.exceptions import DivergentFastRatio, InvalidProbability, InvalidScoutRatio, InvalidSpeed, RatioNotAboveOne, SlowSpeedZero
from ..core.logging import get_logger
from ..models import Leg, SearchParams, SpeedClass, StrategyKind, StrategySpec, Trajectory, side
from ..schemas import ClosedFormCR

logger = get_logger(__name__)

FAST = SpeedClass.FAST
SLOW = SpeedClass.SLOW
INF = float("inf")


def _require_ratio(a: float) -> None:
    if math.isnan(a) or not a > 1.0:
        raise RatioNotAboveOne(a)


def _require_probability(p: float) -> None:
    if math.isnan(p) or not 0.0 <= p <= 1.0:
        raise InvalidProbability(p)


def _require_slow_speed(v: float, operation: str) -> None:
    if math.isnan(v) or not 0.0 <= v <= 1.0:
        raise InvalidSpeed(v)
    if v == 0.0:
        raise SlowSpeedZero(operation)


def _require_scout(b: float) -> None:
    if math.isnan(b) or not 0.0 <= b <= 1.0:
        raise InvalidScoutRatio(b)


# Trajectories


def fast_trajectory(params: SearchParams, a: float) -> Trajectory:
    """Round i: 0 -> (-1)^(i+1) a^i -> 0, all at speed 1."""
    spec = StrategySpec(kind=StrategyKind.FAST, a=a)

    def plan(i: int) -> Sequence[Leg]:
        return ((side(i) * a**i, FAST), (0.0, FAST))

    return Trajectory(params, spec, plan)


def slow_trajectory(params: SearchParams, a: float) -> Trajectory:
    """Round i: fast to s a^(i-2), slow to s a^i, fast back to 0 (s = (-1)^(i+1)).

    For rounds 0 and 1 the fast prefix still ends at a^-2 and a^-1.
    """
    if params.v == 0.0:
        raise SlowSpeedZero("slow_trajectory")
    spec = StrategySpec(kind=StrategyKind.SLOW, a=a)

    def plan(i: int) -> Sequence[Leg]:
        s = side(i)
        return ((s * a ** (i - 2), FAST), (s * a**i, SLOW), (0.0, FAST))

    return Trajectory(params, spec, plan)


def hybrid_trajectory(params: SearchParams, a: float, b: float) -> Trajectory:
    """Slow rounds with a fast scout leg to s (a^i + b (a^(i+2) - a^i)) before returning."""
    if params.v == 0.0:
        raise SlowSpeedZero("hybrid_trajectory")
    spec = StrategySpec(kind=StrategyKind.HYBRID, a=a, b=b)

    def plan(i: int) -> Sequence[Leg]:
        s = side(i)
        turn = a**i
        return (
            (s * a ** (i - 2), FAST),
            (s * turn, SLOW),
            (s * (turn + b * (a ** (i + 2) - turn)), FAST),
            (0.0, FAST),
        )

    return Trajectory(params, spec, plan)


def build_trajectory(params: SearchParams, spec: StrategySpec) -> Trajectory:
    """Trajectory for any strategy spec."""
    if spec.kind is StrategyKind.FAST:
        return fast_trajectory(params, spec.a)
    if spec.kind is StrategyKind.SLOW:
        return slow_trajectory(params, spec.a)
    return hybrid_trajectory(params, spec.a, spec.b)


def round_duration(spec: StrategySpec, v: float, i: int, simplified: bool = False) -> float:
    """Closed-form duration T_i of round i.

    With simplified=True, Slow rounds 0 and 1 last T_0 = 2 and T_1 = 2a as in the worst-case
    argument rather than their literal durations.
    """
    a, b = spec.a, spec.b
    if spec.kind is StrategyKind.FAST:
        return 2.0 * a**i
    if simplified and spec.kind is StrategyKind.SLOW and i < 2:
        return 2.0 * a**i
    _require_slow_speed(v, "round_duration")
    duration = a ** (i - 2) + (a**i - a ** (i - 2)) / v + a**i
    if spec.kind is StrategyKind.HYBRID:
        duration += 2.0 * b * (a ** (i + 2) - a**i)
    return duration


# Fast approach


def fast_ratio(p: float) -> float:
    """Expansion ratio 2/(2-p) of the Fast algorithm."""
    _require_probability(p)
    if p == 0.0:
        raise DivergentFastRatio(p)
    return 2.0 / (2.0 - p)


def fast_cr(p: float) -> ClosedFormCR:
    """Expected competitive ratio 8/p + p/(2-p) of the Fast algorithm; +inf at p = 0."""
    _require_probability(p)
    if p == 0.0:
        return ClosedFormCR(value=INF, formula_id="fast_cr")
    return ClosedFormCR(value=8.0 / p + p / (2.0 - p), formula_id="fast_cr")


def _require_convergent(p: float, a: float) -> None:
    _require_probability(p)
    _require_ratio(a)
    if p == 0.0 or (p < 1.0 and a * (1.0 - p) >= 1.0):
        raise DivergentFastRatio(p, a)


def fast_cr_general(p: float, a: float) -> ClosedFormCR:
    """Expected CR of the fast-only strategy with any convergent expansion ratio a < 1/(1-p)."""
    _require_convergent(p, a)
    value = 2.0 * a * a * p / ((a - 1.0) * (1.0 + a * (p - 1.0))) + p / (2.0 - p)
    return ClosedFormCR(value=value, formula_id="fast_cr_general")


def fast_cr_at(p: float, a: float, i: int, d: float) -> float:
    """Expected CR for a target at distance d in (a^i, a^(i+2)], first passed in round i+2."""
    _require_convergent(p, a)
    return (2.0 * a ** (i + 2) * p / (1.0 + a * (p - 1.0)) + p * d * (a - 1.0) / (2.0 - p) - 2.0) / (d * (a - 1.0))


def fast_cr_round(p: float, a: float, i: int) -> float:
    """Worst expected CR among targets first passed in round i+2 (d -> a^i); increases to fast_cr_general."""
    _require_convergent(p, a)
    return 2.0 * a * a * p / ((a - 1.0) * (1.0 + a * (p - 1.0))) - 2.0 / (a**i * (a - 1.0)) + p / (2.0 - p)


# Slow approach


def slow_ratio(v: float) -> float:
    """Expansion ratio 1 + sqrt(2v/(1+v)) of the Slow algorithm."""
    _require_slow_speed(v, "slow_ratio")
    return 1.0 + math.sqrt(2.0 * v / (1.0 + v))


def slow_cr(v: float) -> ClosedFormCR:
    """Competitive ratio 3 + 2 sqrt(2 + 2/v) + 2/v of the Slow algorithm; +inf at v = 0."""
    if math.isnan(v) or not 0.0 <= v <= 1.0:
        raise InvalidSpeed(v)
    if v == 0.0:
        return ClosedFormCR(value=INF, formula_id="slow_cr")
    return ClosedFormCR(value=3.0 + 2.0 * math.sqrt(2.0 + 2.0 / v) + 2.0 / v, formula_id="slow_cr")


def slow_cr_general(v: float, a: float) -> ClosedFormCR:
    """CR of the Slow strategy with any a > 1: 1 + (a^2 (1+v) + v - 1)/((a-1) v)."""
    _require_slow_speed(v, "slow_cr_general")
    _require_ratio(a)
    return ClosedFormCR(value=1.0 + (a * a * (1.0 + v) + v - 1.0) / ((a - 1.0) * v), formula_id="slow_cr_general")


# Hybrid approach: array kernels


def hybrid_cr1_kernel(a: Any, b: Any, v: Any) -> Any:
    """Case 1 (target just beyond the scout end), any broadcastable inputs."""
    gap = (a * a - 1.0) * b
    return (gap / v + (a * a * (2.0 * gap * v + v + 1.0) + v - 1.0) / ((a - 1.0) * v) + 1.0) / (gap + 1.0)


def hybrid_cr1_kform_kernel(a: Any, b: Any, v: Any) -> Any:
    """Case 1 through the per-round time constant K = T_i / a^i."""
    gap = (a * a - 1.0) * b
    k = a**-2.0 + (1.0 - a**-2.0) / v + 2.0 * gap + 1.0
    return (k * a * a / (a - 1.0) + 1.0 + gap / v) / (1.0 + gap)


def hybrid_cr2_kernel(a: Any, b: Any, p: Any, v: Any) -> Any:
    """Case 2 (target just beyond the turnaround point a^i)."""
    q = p - 1.0
    return (a + 1.0) * (
        2.0 * a * a * b * q * q
        + a * (1.0 / (a - 1.0) - 2.0 * b * q * p)
        + (p - 2.0) * p * (v - 1.0) / (a * v)
        + p * (2.0 * b + p - 2.0)
        + q * q / v
    )


def hybrid_cr2_mixture_kernel(a: Any, b: Any, p: Any, v: Any) -> Any:
    """Case 2 as the mixture of detection while scouting out, scouting back, or two rounds later."""
    w = a**-2.0 + (1.0 - a**-2.0) / v
    scout = 2.0 * b * (a * a - 1.0)
    k = w + scout + 1.0
    return p * (k / (a - 1.0) + w) + p * (1.0 - p) * (k / (a - 1.0) + w + scout) + (1.0 - p) ** 2 * (k * a * a / (a - 1.0) + 1.0)


def hybrid_cr_kernel(a: Any, b: Any, p: Any, v: Any) -> Any:
    return np.maximum(hybrid_cr1_kernel(a, b, v), hybrid_cr2_kernel(a, b, p, v))


# Hybrid approach: validated scalar forms


def _require_hybrid(a: float, b: float, v: float, operation: str, p: Optional[float] = None) -> None:
    _require_ratio(a)
    _require_scout(b)
    _require_slow_speed(v, operation)
    if p is not None:
        _require_probability(p)


def hybrid_cr1(a: float, b: float, v: float) -> ClosedFormCR:
    _require_hybrid(a, b, v, "hybrid_cr1")
    return ClosedFormCR(value=float(hybrid_cr1_kernel(a, b, v)), formula_id="hybrid_cr1")


def hybrid_cr1_kform(a: float, b: float, v: float) -> ClosedFormCR:
    _require_hybrid(a, b, v, "hybrid_cr1_kform")
    return ClosedFormCR(value=float(hybrid_cr1_kform_kernel(a, b, v)), formula_id="hybrid_cr1_kform")


def hybrid_cr2(a: float, b: float, p: float, v: float) -> ClosedFormCR:
    _require_hybrid(a, b, v, "hybrid_cr2", p)
    return ClosedFormCR(value=float(hybrid_cr2_kernel(a, b, p, v)), formula_id="hybrid_cr2")


def hybrid_cr2_mixture(a: float, b: float, p: float, v: float) -> ClosedFormCR:
    _require_hybrid(a, b, v, "hybrid_cr2_mixture", p)
    return ClosedFormCR(value=float(hybrid_cr2_mixture_kernel(a, b, p, v)), formula_id="hybrid_cr2_mixture")


def hybrid_cr(a: float, b: float, p: float, v: float) -> ClosedFormCR:
    """Expected CR of the Hybrid algorithm: the worse of the two worst-case branches."""
    cr1 = hybrid_cr1(a, b, v).value
    cr2 = hybrid_cr2(a, b, p, v).value
    return ClosedFormCR(value=max(cr1, cr2), formula_id="hybrid_cr1" if cr1 >= cr2 else "hybrid_cr2")


# Numeric checks that the published ratios are optimal


def _minimize_ratio(objective: Callable[[float], float], low: float, high: float) -> float:
    result = minimize_scalar(objective, bounds=(low, high), method="bounded", options={"xatol": 1e-12, "maxiter": 500})
    logger.debug("ratio minimization finished", extra={"x": result.x, "fun": result.fun, "nfev": result.nfev})
    return float(result.x)


def numeric_fast_ratio(p: float) -> float:
    """Minimize fast_cr_general over a in (1, 1/(1-p)) numerically."""
    _require_probability(p)
    if p == 0.0:
        raise DivergentFastRatio(p)
    high = 1.0 / (1.0 - p) if p < 1.0 else settings.a_max
    margin = 1e-9 * high
    return _minimize_ratio(lambda a: fast_cr_general(p, a).value, 1.0 + margin, high - margin)


def numeric_slow_ratio(v: float) -> float:
    """Minimize slow_cr_general over a in (1, 3) numerically."""
    _require_slow_speed(v, "numeric_slow_ratio")
    return _minimize_ratio(lambda a: slow_cr_general(v, a).value, 1.0 + 1e-9, 3.0)
