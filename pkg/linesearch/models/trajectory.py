"""Piecewise-constant-speed robot trajectories and the pass events they produce."""

from dataclasses import asdict, dataclass
from enum import Enum
from itertools import count, islice
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from ..core.exceptions import SlowSpeedZero
from .params import SearchParams, StrategySpec


class SpeedClass(str, Enum):
    """Fast moves at speed 1 and detect with probability p; slow moves at speed v and always detect."""

    FAST = "fast"
    SLOW = "slow"


class Direction(str, Enum):
    """Direction of travel relative to the origin at a pass."""

    AWAY = "away"
    TOWARD = "toward"


# One leg of a round: (destination, speed class); every round starts at the origin
Leg = Tuple[float, SpeedClass]
RoundPlan = Callable[[int], Sequence[Leg]]


@dataclass(frozen=True, slots=True)
class Segment:
    """A constant-speed move between two positions."""

    start_pos: float
    end_pos: float
    speed_class: SpeedClass
    speed: float
    start_time: float
    end_time: float
    round_index: int

    @property
    def length(self) -> float:
        return abs(self.end_pos - self.start_pos)

    def covers(self, d: float) -> bool:
        """True if the robot is at d at some instant of this segment, excluding its starting instant.

        Excluding the start makes a turnaround count as one pass: the arriving segment owns it.
        """
        if self.end_pos == self.start_pos:
            return False
        low, high = sorted((self.start_pos, self.end_pos))
        return low <= d <= high and d != self.start_pos

    def time_at(self, d: float) -> float:
        return self.start_time + abs(d - self.start_pos) / self.speed

    @property
    def direction(self) -> Direction:
        return Direction.AWAY if abs(self.end_pos) > abs(self.start_pos) else Direction.TOWARD

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        data = asdict(self)
        data["speed_class"] = self.speed_class.value
        return data


@dataclass(frozen=True, slots=True)
class PassEvent:
    """One crossing of the target position."""

    time: float
    speed_class: SpeedClass
    round_index: int
    direction: Direction

    @property
    def certain(self) -> bool:
        """Slow passes detect with certainty."""
        return self.speed_class is SpeedClass.SLOW

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            "time": self.time,
            "speed_class": self.speed_class.value,
            "round_index": self.round_index,
            "direction": self.direction.value,
        }


def side(i: int) -> int:
    """Round i visits the negative side for even i: (-1)^(i+1)."""
    return -1 if i % 2 == 0 else 1


class Trajectory:
    """An unbounded sequence of rounds, each leaving the origin and returning to it.

    Rounds are described by a plan mapping the round index to its legs. All plans used here
    have round durations that scale exactly as a^i from round 2 on, which gives round end
    times in closed form.
    """

    def __init__(self, params: SearchParams, spec: StrategySpec, plan: RoundPlan):
        self.params = params
        self.spec = spec
        self._plan = plan
        self.has_slow_segments = any(speed is SpeedClass.SLOW for _, speed in plan(2))
        if self.has_slow_segments and params.v == 0.0:
            raise SlowSpeedZero(f"{spec.kind.value} trajectory")
        self._prefix = (self.round_duration(0), self.round_duration(1))
        self.round_scale = self.round_duration(2) / spec.a**2

    @property
    def a(self) -> float:
        return self.spec.a

    def speed_of(self, speed_class: SpeedClass) -> float:
        return 1.0 if speed_class is SpeedClass.FAST else self.params.v

    def legs(self, i: int) -> Sequence[Leg]:
        return self._plan(i)

    def round_duration(self, i: int) -> float:
        """Time to complete round i, summed over its legs."""
        position, total = 0.0, 0.0
        for destination, speed_class in self._plan(i):
            total += abs(destination - position) / self.speed_of(speed_class)
            position = destination
        return total

    def round_end_time(self, i: int) -> float:
        """Cumulative time at the end of round i."""
        if i < 0:
            return 0.0
        if i == 0:
            return self._prefix[0]
        head = self._prefix[0] + self._prefix[1]
        if i == 1:
            return head
        a = self.a
        return head + self.round_scale * (a ** (i + 1) - a**2) / (a - 1.0)

    def round_reach(self, i: int) -> float:
        """Farthest distance from the origin reached in round i."""
        return max(abs(destination) for destination, _ in self._plan(i))

    def round_segments(self, i: int, start_time: Optional[float] = None) -> List[Segment]:
        """The segments of round i, starting at the closed-form round start unless given."""
        time = self.round_end_time(i - 1) if start_time is None else start_time
        position = 0.0
        segments = []
        for destination, speed_class in self._plan(i):
            speed = self.speed_of(speed_class)
            end_time = time + abs(destination - position) / speed
            segments.append(Segment(position, destination, speed_class, speed, time, end_time, i))
            position, time = destination, end_time
        return segments

    def segments(self) -> Iterator[Segment]:
        """All segments in order; each starts exactly when and where the previous one ends."""
        time = 0.0
        for i in count():
            for segment in self.round_segments(i, start_time=time):
                yield segment
                time = segment.end_time

    def segment(self, k: int) -> Segment:
        """Segment k of the unbounded sequence."""
        return next(islice(self.segments(), k, None))

    def take(self, n: int) -> List[Segment]:
        return list(islice(self.segments(), n))
