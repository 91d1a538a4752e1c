"""Lower bound on the competitive ratio when fast passes never detect (p = 0).

An algorithm that explores new ground at speed v and spends time at most beta per unit of
explored length has exploration times t_i following the second-order recurrence

    (beta v - 1) t_i = v (1 + beta) t_(i-1) - (1 - v) t_(i-2),    t_0 = 0, t_1 = 1,

whose dominant characteristic root gives the ratio 1 + (1 + beta) r_plus. Minimizing over beta
lands at beta = 1 + 2/v, where the bound meets the Slow algorithm's ratio.
"""

import math
from typing import List, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from ..core.exceptions import InvalidBeta, InvalidSpeed, SlowSpeedZero
from ..core.logging import get_logger
from ..schemas import ClosedFormCR, LowerBoundParams, RecurrenceSolution

logger = get_logger(__name__)


def _discriminant(v: float, beta: float) -> float:
    LowerBoundParams(v=v, beta=beta)
    x_squared = 4.0 + v * (6.0 * beta * v + (1.0 + beta * beta) * v - 4.0 * (1.0 + beta))
    if x_squared <= 0.0:
        raise InvalidBeta(v, beta)
    return math.sqrt(x_squared)


def _roots(v: float, beta: float) -> Tuple[float, float, float]:
    x = _discriminant(v, beta)
    denominator = 2.0 * (beta * v - 1.0)
    return x, (v * (1.0 + beta) + x) / denominator, (v * (1.0 + beta) - x) / denominator


def closed_form_t(v: float, beta: float, i: int) -> float:
    """t_i = ((beta v - 1)/x) (r_plus^i - r_minus^i)."""
    x, r_plus, r_minus = _roots(v, beta)
    return (beta * v - 1.0) / x * (r_plus**i - r_minus**i)


def recurrence_t(v: float, beta: float, i_max: int) -> List[float]:
    """t_0..t_(i_max) by direct iteration of the recurrence."""
    _discriminant(v, beta)
    lead = beta * v - 1.0
    times = [0.0, 1.0]
    for _ in range(2, i_max + 1):
        times.append((v * (1.0 + beta) * times[-1] - (1.0 - v) * times[-2]) / lead)
    return times[: i_max + 1]


def recurrence_solution(v: float, beta: float, i_max: int) -> RecurrenceSolution:
    return RecurrenceSolution(x=_discriminant(v, beta), t=recurrence_t(v, beta, i_max))


def lower_bound_cr(v: float, beta: float) -> ClosedFormCR:
    """1 + (1 + beta)(v (1 + beta) + x) / (2 (beta v - 1))."""
    x = _discriminant(v, beta)
    value = 1.0 + (1.0 + beta) * (v * (1.0 + beta) + x) / (2.0 * (beta * v - 1.0))
    return ClosedFormCR(value=value, formula_id="lower_bound_cr")


def lower_bound_cr_sequence(v: float, beta: float, i_max: int) -> List[float]:
    """Finite-round ratios 1 + (1 + beta) t_i / t_(i-1) for i = 2..i_max; they approach lower_bound_cr."""
    times = recurrence_t(v, beta, i_max)
    return [1.0 + (1.0 + beta) * times[i] / times[i - 1] for i in range(2, i_max + 1)]


def _beta_interval(v: float) -> Tuple[float, float]:
    if math.isnan(v) or not 0.0 < v <= 1.0:
        if v == 0.0:
            raise SlowSpeedZero("optimal_beta")
        raise InvalidSpeed(v)
    return (1.0 / v) * (1.0 + 1e-6), 100.0 / v


def optimal_beta(v: float) -> Tuple[float, float]:
    """Minimize lower_bound_cr over beta in (1/v, 100/v); returns (beta*, cr*).

    Golden-section search inside the bracket around the best point of a geometric scan.
    """
    scan = scan_beta(v)
    best = min(range(1, len(scan) - 1), key=lambda k: scan[k][1])
    bracket = (scan[best - 1][0], scan[best][0], scan[best + 1][0])
    result = minimize_scalar(lambda beta: lower_bound_cr(v, beta).value, bracket=bracket, method="golden", tol=1e-10)
    logger.debug("beta minimization finished", extra={"v": v, "beta": result.x, "cr": result.fun, "nfev": result.nfev})
    return float(result.x), float(result.fun)


def scan_beta(v: float, points: int = 64) -> List[Tuple[float, float]]:
    """lower_bound_cr on a geometric grid of beta over the search interval."""
    low, high = _beta_interval(v)
    return [(float(beta), lower_bound_cr(v, float(beta)).value) for beta in np.geomspace(low, high, points)]


def is_unimodal(values: List[float]) -> bool:
    """True when the discrete slope changes sign at most once, from negative to positive."""
    slopes = np.sign(np.diff(np.asarray(values, dtype=float)))
    slopes = slopes[slopes != 0]
    if slopes.size == 0:
        return True
    return int(np.count_nonzero(np.diff(slopes))) <= 1 and not (slopes[0] > 0 and slopes[-1] < 0)
