"""Hybrid parameter tuning, fast-vs-slow decisions, region classification and heatmap grids."""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq, minimize, minimize_scalar

from ..config import settings
from ..core.exceptions import ConfigurationError, InvalidGrid, InvalidProbability, InvalidSpeed, SlowSpeedZero
from ..core.logging import get_logger
from ..core.parallel import ordered_map
from ..models import StrategyKind, StrategySpec
from ..schemas import HeatmapGrid, HeatmapQuantity, Region, TunedHybrid
from .strategies import fast_cr, fast_ratio, hybrid_cr1_kernel, hybrid_cr2_kernel, hybrid_cr_kernel, slow_cr, slow_cr_general, slow_ratio

logger = get_logger(__name__)

INF = float("inf")


@dataclass(frozen=True)
class OptimizerBudget:
    """Coarse grid resolution and local refinement limits for optimize_hybrid."""

    coarse_grid: int = field(default_factory=lambda: settings.coarse_grid)
    refine_iterations: int = field(default_factory=lambda: settings.refine_iterations)
    ftol: float = field(default_factory=lambda: settings.refine_ftol)
    a_max: float = field(default_factory=lambda: settings.a_max)

    @property
    def a_min(self) -> float:
        return 1.0 + settings.a_min_offset


def _check_environment(p: float, v: float, operation: str) -> None:
    if math.isnan(p) or not 0.0 <= p <= 1.0:
        raise InvalidProbability(p)
    if math.isnan(v) or not 0.0 <= v <= 1.0:
        raise InvalidSpeed(v)
    if v == 0.0:
        raise SlowSpeedZero(operation)


def best_scout_ratio(a: float, p: float, v: float) -> float:
    """The b in [0, 1] minimizing max(CR1, CR2) at fixed a.

    CR2 is increasing and linear in b, CR1 is monotone in b, so the optimum is an endpoint or
    the crossing of the two branches.
    """
    cr1_0, cr2_0 = float(hybrid_cr1_kernel(a, 0.0, v)), float(hybrid_cr2_kernel(a, 0.0, p, v))
    if cr2_0 >= cr1_0 * (1.0 - 1e-12):
        return 0.0
    cr1_1, cr2_1 = float(hybrid_cr1_kernel(a, 1.0, v)), float(hybrid_cr2_kernel(a, 1.0, p, v))
    if cr1_1 >= cr1_0:
        return 0.0
    if cr2_1 <= cr1_1:
        return 1.0
    return float(brentq(lambda b: hybrid_cr1_kernel(a, b, v) - hybrid_cr2_kernel(a, b, p, v), 0.0, 1.0, xtol=1e-14))


def _profile(a: float, p: float, v: float, budget: OptimizerBudget) -> float:
    if not budget.a_min <= a <= budget.a_max:
        return INF
    return float(hybrid_cr_kernel(a, best_scout_ratio(a, p, v), p, v))


def _coarse_grid(p: float, v: float, budget: OptimizerBudget) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    if budget.coarse_grid < 2:
        raise ConfigurationError("coarse_grid", f"must be >= 2, got {budget.coarse_grid}")
    a_axis = np.geomspace(budget.a_min, budget.a_max, budget.coarse_grid)
    b_axis = np.linspace(0.0, 1.0, budget.coarse_grid)
    values = hybrid_cr_kernel(a_axis[:, None], b_axis[None, :], p, v)
    return a_axis, b_axis, values


def _tuned(p: float, v: float, a: float, b: float, iterations: int, converged: bool) -> TunedHybrid:
    cr1 = float(hybrid_cr1_kernel(a, b, v))
    cr2 = float(hybrid_cr2_kernel(a, b, p, v))
    return TunedHybrid(p=p, v=v, a_star=a, b_star=b, cr_star=max(cr1, cr2), cr1=cr1, cr2=cr2, iterations=iterations, converged=converged)


def _refine(p: float, v: float, a0: float, budget: OptimizerBudget) -> TunedHybrid:
    """Nelder-Mead on the profile a -> min_b max(CR1, CR2) from a0."""
    result = minimize(
        lambda x: _profile(float(x[0]), p, v, budget),
        x0=np.array([a0]),
        method="Nelder-Mead",
        options={"maxiter": budget.refine_iterations, "xatol": 1e-10, "fatol": budget.ftol},
    )
    a_star = float(result.x[0])
    return _tuned(p, v, a_star, best_scout_ratio(a_star, p, v), int(result.nit), bool(result.success))


def _slow_slice(p: float, v: float, budget: OptimizerBudget) -> TunedHybrid:
    """Best strategy with b = 0, where the hybrid CR is slow_cr_general."""
    result = minimize_scalar(lambda a: slow_cr_general(v, a).value, bounds=(budget.a_min, budget.a_max), method="bounded", options={"xatol": 1e-12})
    a_star = float(result.x)
    return _tuned(p, v, a_star, 0.0, int(result.nit), bool(result.success))


def optimize_hybrid(p: float, v: float, budget: Optional[OptimizerBudget] = None) -> TunedHybrid:
    """Minimize the hybrid CR over a in (1, a_max] and b in [0, 1].

    A coarse (a, b) grid picks the starting expansion ratio, which is refined on the profile
    over b. The b = 0 slice is always a candidate and wins ties.
    """
    _check_environment(p, v, "optimize_hybrid")
    budget = budget or OptimizerBudget()
    a_axis, b_axis, values = _coarse_grid(p, v, budget)
    row, col = np.unravel_index(int(np.argmin(values)), values.shape)

    refined = _refine(p, v, float(a_axis[row]), budget)
    sliced = _slow_slice(p, v, budget)
    best = sliced if sliced.cr_star <= refined.cr_star * (1.0 + 1e-12) else refined

    if best.a_star >= budget.a_max * (1.0 - 1e-6) or best.a_star <= budget.a_min * (1.0 + 1e-9):
        logger.warning("Optimal expansion ratio sits on the search box edge", extra={"p": p, "v": v, "a_star": best.a_star})
    logger.debug(
        "hybrid optimization finished",
        extra={"p": p, "v": v, "a_star": best.a_star, "b_star": best.b_star, "cr_star": best.cr_star, "coarse_best": float(values[row, col])},
    )
    return best


def optimize_hybrid_restarts(p: float, v: float, starts: int = 4, budget: Optional[OptimizerBudget] = None) -> List[TunedHybrid]:
    """Refine from the best `starts` distinct coarse-grid expansion ratios."""
    _check_environment(p, v, "optimize_hybrid_restarts")
    budget = budget or OptimizerBudget()
    a_axis, _, values = _coarse_grid(p, v, budget)
    order = np.argsort(values.min(axis=1), kind="stable")[:starts]
    return [_refine(p, v, float(a_axis[index]), budget) for index in order]


def fast_slow_threshold(p: float) -> float:
    """Slow speed at which the Fast and Slow ratios are equal; below it Fast is better."""
    if math.isnan(p) or not 0.0 <= p <= 1.0:
        raise InvalidProbability(p)
    if p == 0.0:
        return 0.0
    root = math.sqrt(p * (2.0 - p))
    return p * (2.0 - p) / ((p * p - 5.0 * p + 8.0) - (4.0 - p) * root)


def fast_slow_threshold_printed(p: float) -> float:
    """The looser published variant 2p / (8 - p(1-p)^2 - 2 sqrt(p(8 + p^2(2-p)))), kept for comparison."""
    if math.isnan(p) or not 0.0 <= p <= 1.0:
        raise InvalidProbability(p)
    return 2.0 * p / (8.0 - p * (1.0 - p) ** 2 - 2.0 * math.sqrt(p * (8.0 + p * p * (2.0 - p))))


def recommend_strategy(p: float, v: float, printed: bool = False) -> StrategyKind:
    """Fast when v is at or below the threshold speed, Slow otherwise."""
    threshold = fast_slow_threshold_printed(p) if printed else fast_slow_threshold(p)
    if p > 0.0 and v <= threshold:
        return StrategyKind.FAST
    return StrategyKind.SLOW


def classify_region(p: float, v: float, tuned: Optional[TunedHybrid]) -> Region:
    """Which approach wins at (p, v); ties go to Fast."""
    if p == 0.0 and v == 0.0:
        return Region.DEGENERATE
    fast = fast_cr(p).value
    slow = slow_cr(v).value
    hybrid = tuned.cr_star if tuned is not None else INF
    if fast <= min(slow, hybrid) + settings.tie_tolerance:
        return Region.FAST_BEST
    if slow < fast:
        return Region.SLOW_BEATS_FAST
    return Region.HYBRID_BEATS_FAST_SLOW_DOES_NOT


def published_spec(kind: StrategyKind, p: float, v: float, budget: Optional[OptimizerBudget] = None) -> StrategySpec:
    """Strategy parameters a reader would pick by default: the closed-form ratios, or the tuned hybrid."""
    if kind is StrategyKind.FAST:
        return StrategySpec(kind=kind, a=fast_ratio(p))
    if kind is StrategyKind.SLOW:
        return StrategySpec(kind=kind, a=slow_ratio(v))
    tuned = optimize_hybrid(p, v, budget)
    return StrategySpec(kind=kind, a=tuned.a_star, b=tuned.b_star)


def compare_strategies(p: float, v: float, budget: Optional[OptimizerBudget] = None) -> Dict[str, Any]:
    """Side-by-side closed-form ratios, both threshold variants and the winning region."""
    tuned = optimize_hybrid(p, v, budget) if v > 0.0 else None
    fast = fast_cr(p).value
    hybrid = tuned.cr_star if tuned is not None else INF
    return {
        "p": p,
        "v": v,
        "cr_fast": fast,
        "cr_slow": slow_cr(v).value,
        "cr_hybrid": hybrid,
        "cr_best": min(fast, hybrid),
        "threshold": fast_slow_threshold(p),
        "threshold_printed": fast_slow_threshold_printed(p),
        "recommended": recommend_strategy(p, v).value,
        "region": classify_region(p, v, tuned).name,
    }


_HYBRID_QUANTITIES = {
    HeatmapQuantity.CR_BEST,
    HeatmapQuantity.CR_HYBRID,
    HeatmapQuantity.A_STAR,
    HeatmapQuantity.B_STAR,
    HeatmapQuantity.IMPROVEMENT,
    HeatmapQuantity.REGION,
}


def heatmap_cell(quantity: HeatmapQuantity, p: float, v: float, budget: OptimizerBudget) -> float:
    """One heatmap value; slow and hybrid quantities at v = 0 are +inf."""
    if quantity is HeatmapQuantity.CR_FAST:
        return fast_cr(p).value
    if quantity is HeatmapQuantity.CR_SLOW:
        return slow_cr(v).value
    tuned = optimize_hybrid(p, v, budget) if v > 0.0 else None
    if quantity is HeatmapQuantity.REGION:
        return float(classify_region(p, v, tuned).value)
    if quantity is HeatmapQuantity.CR_BEST:
        return min(fast_cr(p).value, tuned.cr_star if tuned is not None else INF)
    if tuned is None:
        return INF
    if quantity is HeatmapQuantity.CR_HYBRID:
        return tuned.cr_star
    if quantity is HeatmapQuantity.A_STAR:
        return tuned.a_star
    if quantity is HeatmapQuantity.B_STAR:
        return tuned.b_star
    return slow_cr(v).value - tuned.cr_star


def _axis(bounds: Tuple[float, float], n: int, name: str) -> List[float]:
    low, high = bounds
    if not 0.0 <= low <= high <= 1.0:
        raise InvalidGrid(name, f"range must lie within [0, 1], got {bounds}")
    return [float(x) for x in np.linspace(low, high, n)]


def build_heatmap(
    quantity: HeatmapQuantity,
    grid_n: int,
    p_range: Tuple[float, float] = (0.05, 1.0),
    v_range: Tuple[float, float] = (0.05, 1.0),
    budget: Optional[OptimizerBudget] = None,
    jobs: int = 1,
    seed: int = 0,
) -> HeatmapGrid:
    """Evaluate a quantity on a grid_n x grid_n (p, v) grid, rows of v and columns of p."""
    if grid_n < 2:
        raise InvalidGrid("grid_n", f"must be >= 2, got {grid_n}")
    budget = budget or OptimizerBudget()
    p_axis = _axis(p_range, grid_n, "p_range")
    v_axis = _axis(v_range, grid_n, "v_range")

    logger.info("Building heatmap", extra={"quantity": quantity.value, "grid": grid_n, "jobs": jobs, "hybrid": quantity in _HYBRID_QUANTITIES})
    flat = ordered_map(heatmap_cell, [(quantity, p, v, budget) for v in v_axis for p in p_axis], jobs)
    values = [flat[row * grid_n : (row + 1) * grid_n] for row in range(grid_n)]
    meta = {
        "grid": grid_n,
        "seed": seed,
        "version": settings.app_version,
        "p_range": list(p_range),
        "v_range": list(v_range),
        "coarse_grid": budget.coarse_grid,
        "refine_iterations": budget.refine_iterations,
    }
    return HeatmapGrid(quantity=quantity, p_axis=p_axis, v_axis=v_axis, values=values, meta=meta)
