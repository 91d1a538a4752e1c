"""Ground-truth evaluation of strategies against a fixed target.

The oracle walks a trajectory round by round, records every crossing of the target, and
weights each crossing by the probability that detection happens exactly there: a fast pass
detects with probability p, a slow pass always detects. Fast-only trajectories never end
with certainty, so their series is truncated once a certified bound on the omitted part of
the expectation falls below the requested tolerance.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from ..config import settings
from ..core.exceptions import (
    ConfigurationError,
    DivergentSeries,
    InvalidProbability,
    InvalidTarget,
    NeverPassed,
    NoDetection,
    PassTimeOverflow,
    UncertifiedExpectation,
)
from ..core.logging import get_logger
from ..core.parallel import block_rng, ordered_map
from ..models import PassEvent, SpeedClass, StrategyKind, Trajectory, side
from ..schemas import DetectionDistribution, Expectation, SimulationResult, SupResult, WeightedPass

logger = get_logger(__name__)


@dataclass(frozen=True)
class TruncationPolicy:
    """When to stop listing passes for a target that is never detected with certainty."""

    max_rounds: int = field(default_factory=lambda: settings.max_rounds)
    tol: float = field(default_factory=lambda: settings.expectation_tol)
    residual_threshold: float = 0.0


def _check_target(d: float) -> None:
    if not math.isfinite(d) or d == 0.0:
        raise InvalidTarget(d, "must be finite and nonzero")


def _check_probability(p: float) -> None:
    if math.isnan(p) or not 0.0 <= p <= 1.0:
        raise InvalidProbability(p)


def _check_convergence(trajectory: Trajectory, d: float, p: float) -> None:
    """A target with no certain pass needs p > 0 and a (1 - p) < 1."""
    if trajectory.has_slow_segments:
        return
    if p == 0.0:
        raise NoDetection(d)
    if trajectory.a * (1.0 - p) >= 1.0:
        raise DivergentSeries(trajectory.a, p)


# Pass times are kept below this so that sums of them stay finite
_TIME_CEILING = 1e280


def round_horizon(trajectory: Trajectory) -> int:
    """Last round whose end time stays below the floating-point ceiling."""
    a = trajectory.a
    growth = max(trajectory.round_scale / (a - 1.0), 1.0)
    return max(int((math.log(_TIME_CEILING) - math.log(growth)) / math.log(a)) - 2, 1)


def iter_passes(trajectory: Trajectory, d: float, max_rounds: Optional[int] = None) -> Iterator[PassEvent]:
    """Every crossing of position d, in time order, round by round, up to the round horizon."""
    _check_target(d)
    limit = min(settings.max_rounds if max_rounds is None else max_rounds, round_horizon(trajectory))
    target_side = 1 if d > 0 else -1
    distance = abs(d)
    for i in range(limit + 1):
        if side(i) != target_side or trajectory.round_reach(i) < distance:
            continue
        for segment in trajectory.round_segments(i):
            if segment.covers(d):
                yield PassEvent(segment.time_at(d), segment.speed_class, i, segment.direction)


def _time_offset(trajectory: Trajectory) -> float:
    """The constant in E_i = offset + c a^(i+1), valid for i >= 1."""
    a = trajectory.a
    return trajectory.round_end_time(1) - trajectory.round_scale * a * a / (a - 1.0)


def _tail_bound(trajectory: Trajectory, residual: float, last_round: int, p: float) -> float:
    """Bound on the expectation still owed after the passes of round last_round.

    A fast-only trajectory passes the target at most twice per visit, once every two rounds,
    and no later than the end of the visiting round, so detection in round j + 2m happens with
    probability at most residual (1-p)^(2(m-1)) at a time at most
    E_(j+2m) = offset + (E_j - offset) a^(2m). The geometric sums are finite exactly when
    a (1-p) < 1.
    """
    if residual == 0.0:
        return 0.0
    a, q = trajectory.a, 1.0 - p
    offset = _time_offset(trajectory)
    growth = trajectory.round_end_time(max(last_round, 1)) - offset
    return residual * (max(offset, 0.0) / (1.0 - q * q) + growth * a * a / (1.0 - a * a * q * q))


def _closed_form_remainder(trajectory: Trajectory, d: float, residual: float, p: float, next_round: int) -> float:
    """Exact expectation owed by the fast passes of rounds next_round, next_round + 2, ...

    Each of those rounds reaches past |d|, so it crosses d outbound at E_(i-1) + |d| and
    inbound at E_i - |d|. With E_i = offset + (E_(next_round-1) - offset) a^(i-next_round+1)
    both sums over the visits are geometric.
    """
    a, q = trajectory.a, 1.0 - p
    distance = abs(d)
    offset = _time_offset(trajectory)
    growth = trajectory.round_end_time(next_round - 1) - offset
    linear = (offset + distance + q * (offset - distance)) / (1.0 - q * q)
    geometric = growth * (1.0 + q * a) / (1.0 - a * a * q * q)
    return residual * p * (linear + geometric)


def _walk(trajectory: Trajectory, d: float, p: float, policy: TruncationPolicy) -> DetectionDistribution:
    _check_target(d)
    _check_probability(p)
    _check_convergence(trajectory, d, p)

    entries: List[WeightedPass] = []
    residual, partial = 1.0, 0.0
    tail, remainder = 0.0, 0.0
    absorbed = False
    current_round: Optional[int] = None
    horizon = min(policy.max_rounds, round_horizon(trajectory))

    def certified(round_index: int) -> bool:
        nonlocal tail
        if trajectory.has_slow_segments:
            return False
        tail = _tail_bound(trajectory, residual, round_index, p)
        return tail <= policy.tol * partial or residual <= policy.residual_threshold

    for event in iter_passes(trajectory, d, horizon):
        if current_round is not None and event.round_index != current_round and certified(current_round):
            break
        current_round = event.round_index
        weight = residual if event.certain else residual * p
        entries.append(WeightedPass(time=event.time, probability=weight, speed_class=event.speed_class.value, round_index=event.round_index))
        partial += weight * event.time
        residual -= weight
        if event.certain:
            absorbed = True
            residual = 0.0
            tail = 0.0
            break
        if residual == 0.0:
            tail = 0.0
            break
    else:
        if not entries:
            raise NeverPassed(d, horizon)
        last_round = entries[-1].round_index
        if residual > 0.0 and not certified(last_round):
            if trajectory.spec.kind is not StrategyKind.FAST:
                raise UncertifiedExpectation(d, horizon, tail)
            remainder = _closed_form_remainder(trajectory, d, residual, p, last_round + 2)
            tail = 0.0
            logger.debug(
                "Summed the passes past the round limit in closed form",
                extra={"d": d, "rounds": horizon, "residual": residual, "remainder": remainder},
            )

    return DetectionDistribution(target=d, passes=entries, absorbed=absorbed, residual=residual, tail_bound=tail, remainder=remainder)


def enumerate_passes(trajectory: Trajectory, d: float, stop: Optional[TruncationPolicy] = None) -> List[PassEvent]:
    """Crossings of d in time order, ending at the first slow pass or the truncation point.

    Detection weights use the trajectory's own p.
    """
    distribution = _walk(trajectory, d, trajectory.params.p, stop or TruncationPolicy())
    return [
        PassEvent(entry.time, SpeedClass(entry.speed_class), entry.round_index, event.direction)
        for entry, event in zip(distribution.passes, iter_passes(trajectory, d))
    ]


def detection_distribution(trajectory: Trajectory, d: float, p: Optional[float] = None, tol: Optional[float] = None) -> DetectionDistribution:
    """Weighted pass list for target d; p defaults to the trajectory's own."""
    policy = TruncationPolicy(tol=settings.expectation_tol if tol is None else tol)
    return _walk(trajectory, d, trajectory.params.p if p is None else p, policy)


def expected_detection_time(trajectory: Trajectory, d: float, p: Optional[float] = None, tol: Optional[float] = None) -> Expectation:
    """Exact expected detection time, with a certified bound on the truncated tail."""
    distribution = detection_distribution(trajectory, d, p, tol)
    return Expectation(value=distribution.expectation, tail_bound=distribution.tail_bound)


def expected_cr(trajectory: Trajectory, d: float, p: Optional[float] = None, tol: Optional[float] = None) -> float:
    """Expected competitive ratio at target d: expected detection time over |d|."""
    return expected_detection_time(trajectory, d, p, tol).value / abs(d)


def breakpoints(trajectory: Trajectory, i: int) -> List[float]:
    """Distances where the worst case of round i is approached from above."""
    a = trajectory.a
    points = [a**i]
    b = trajectory.spec.b
    if trajectory.spec.kind is StrategyKind.HYBRID and b > 0.0:
        points.append(a**i + b * (a ** (i + 2) - a**i))
    return points


def sup_cr(
    trajectory: Trajectory,
    p: Optional[float] = None,
    rounds: int = 40,
    samples_per_round: Optional[int] = None,
    epsilon: Optional[float] = None,
    tol: Optional[float] = None,
) -> SupResult:
    """Largest expected CR over breakpoint and interior targets of rounds 0..rounds, both sides."""
    if rounds < 4:
        raise ConfigurationError("rounds", f"must be >= 4, got {rounds}")
    # Targets of round i are first passed by round i + 4 at the latest
    horizon = round_horizon(trajectory) - 4
    if rounds > horizon:
        raise ConfigurationError("rounds", f"must be <= {horizon} for a = {trajectory.a}, got {rounds}")
    samples = settings.samples_per_round if samples_per_round is None else samples_per_round
    eps = settings.sup_epsilon if epsilon is None else epsilon
    a = trajectory.a

    best = (-math.inf, 0.0, 0)
    profile: List[Tuple[int, float]] = []
    for i in range(rounds + 1):
        distances = [point * (1.0 + eps) for point in breakpoints(trajectory, i)]
        distances += [a**i * a ** (k / (samples + 1)) for k in range(1, samples + 1)]
        local = -math.inf
        for sign in (-1.0, 1.0):
            for distance in distances:
                d = sign * distance
                ratio = expected_cr(trajectory, d, p, tol)
                local = max(local, ratio)
                if ratio > best[0]:
                    best = (ratio, d, i)
        profile.append((i, local))

    logger.debug("sup search finished", extra={"rounds": rounds, "sup_cr": best[0], "argmax_d": best[1]})
    return SupResult(sup_cr=best[0], argmax_d=best[1], argmax_round=best[2], per_round_profile=profile)


def round_time_discrepancy(trajectory: Trajectory) -> List[Dict[str, float]]:
    """Literal durations of rounds 0 and 1 next to the simplified T_0 = 2, T_1 = 2a of the worst-case argument."""
    rows = []
    for i in (0, 1):
        literal = trajectory.round_duration(i)
        simplified = 2.0 * trajectory.a**i
        rows.append({"round": i, "literal": literal, "simplified": simplified, "difference": literal - simplified})
    return rows


def _draw_misses(p: float, size: int, seed: int, block: int) -> np.ndarray:
    """Number of fast passes missed before the first fast detection, per trial."""
    rng = block_rng(seed, block)
    if p >= 1.0:
        return np.zeros(size, dtype=np.int64)
    if p <= 0.0:
        return np.full(size, np.iinfo(np.int64).max, dtype=np.int64)
    return rng.geometric(p, size=size).astype(np.int64) - 1


def simulate_detection(
    trajectory: Trajectory,
    d: float,
    p: Optional[float] = None,
    trials: int = 100_000,
    seed: int = 0,
    jobs: int = 1,
    block_size: Optional[int] = None,
) -> SimulationResult:
    """Monte Carlo estimate of the expected detection time.

    Trials are split into fixed-size blocks, each with its own generator keyed on (seed, block),
    so the result does not depend on how many workers draw the blocks.
    """
    if trials < 1:
        raise ConfigurationError("trials", f"must be >= 1, got {trials}")
    if not 0 <= seed < 2**64:
        raise ConfigurationError("seed", "must be a 64-bit unsigned integer")
    _check_target(d)
    prob = trajectory.params.p if p is None else p
    _check_probability(prob)
    if prob == 0.0 and not trajectory.has_slow_segments:
        raise NoDetection(d)
    size = settings.mc_block_size if block_size is None else block_size

    blocks = [(prob, min(size, trials - start), seed, index) for index, start in enumerate(range(0, trials, size))]
    misses = np.concatenate(ordered_map(_draw_misses, blocks, jobs))

    # Pass times, extended until every trial's detecting pass is known
    times: List[float] = []
    certain_at: Optional[int] = None
    needed = int(misses.min()) if prob == 0.0 else int(misses.max())
    rounds = settings.max_rounds
    if not trajectory.has_slow_segments:
        # Visits come every other round from the first one reaching |d|, two passes each
        first_visit = max(0, math.ceil(math.log(abs(d)) / math.log(trajectory.a))) + 2
        rounds = max(rounds, first_visit + needed + 4)
    for event in iter_passes(trajectory, d, rounds):
        times.append(event.time)
        if event.certain:
            certain_at = len(times) - 1
            break
        if len(times) > needed:
            break
    horizon = min(rounds, round_horizon(trajectory))
    if not times:
        raise NeverPassed(d, horizon)
    if certain_at is not None:
        misses = np.minimum(misses, certain_at)
    if int(misses.max()) >= len(times):
        if horizon < rounds:
            raise PassTimeOverflow(d, int(misses.max()) + 1, horizon)
        raise NeverPassed(d, horizon)

    samples = np.asarray(times)[misses]
    mean = float(samples.mean())
    standard_error = float(samples.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    logger.debug("simulation finished", extra={"d": d, "trials": trials, "seed": seed, "mean": mean})
    return SimulationResult(mean=mean, standard_error=standard_error, trials=trials, seed=seed)


def simulate_cr(trajectory: Trajectory, d: float, p: Optional[float] = None, trials: int = 100_000, seed: int = 0, jobs: int = 1) -> SimulationResult:
    """Monte Carlo estimate of the expected competitive ratio at d."""
    result = simulate_detection(trajectory, d, p, trials, seed, jobs)
    return SimulationResult(mean=result.mean / abs(d), standard_error=result.standard_error / abs(d), trials=trials, seed=seed)
