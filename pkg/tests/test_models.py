"""Tests for linesearch.models - parameters, segments and trajectories."""

import math

import pytest

from linesearch.core.exceptions import (
    DivergentFastRatio,
    InvalidProbability,
    InvalidScoutRatio,
    InvalidSpeed,
    RatioNotAboveOne,
    SlowSpeedZero,
    UnsolvableInstance,
)
from linesearch.models import Direction, SearchParams, Segment, SpeedClass, StrategyKind, StrategySpec, side, validate_params
from linesearch.services import strategies

from .base_test import BaseTest


class TestSearchParams(BaseTest):
    """Tests for SearchParams."""

    def test_valid_params(self):
        """Test creating valid parameters."""
        params = SearchParams(p=0.5, v=0.25)
        assert params.p == 0.5
        assert params.v == 0.25
        assert params.solvable

    @pytest.mark.parametrize("p", [-0.1, 1.5, math.nan])
    def test_invalid_probability(self, p):
        """Test probability outside [0, 1] is rejected."""
        with pytest.raises(InvalidProbability):
            SearchParams(p=p, v=0.5)

    @pytest.mark.parametrize("v", [-1.0, 1.01])
    def test_invalid_speed(self, v):
        """Test speed outside [0, 1] is rejected."""
        with pytest.raises(InvalidSpeed):
            SearchParams(p=0.5, v=v)

    def test_unsolvable_flag(self):
        """Test p = 0 and v = 0 is flagged unsolvable."""
        assert not SearchParams(p=0.0, v=0.0).solvable
        assert SearchParams(p=0.0, v=0.1).solvable
        assert SearchParams(p=0.1, v=0.0).solvable


class TestStrategySpec(BaseTest):
    """Tests for StrategySpec and validate_params."""

    def test_ratio_must_exceed_one(self):
        """Test a <= 1 is rejected."""
        with pytest.raises(RatioNotAboveOne):
            StrategySpec(kind=StrategyKind.SLOW, a=1.0)

    def test_scout_ratio_range(self):
        """Test b outside [0, 1] is rejected."""
        with pytest.raises(InvalidScoutRatio):
            StrategySpec(kind=StrategyKind.HYBRID, a=2.0, b=1.5)

    def test_scout_ratio_only_for_hybrid(self):
        """Test non-hybrid strategies must have b = 0."""
        with pytest.raises(InvalidScoutRatio):
            StrategySpec(kind=StrategyKind.FAST, a=2.0, b=0.5)

    def test_validate_published_fast(self):
        """Test the published fast ratio passes validation."""
        params, spec = self.make_params(0.5, 0.5), StrategySpec(kind=StrategyKind.FAST, a=4.0 / 3.0)
        assert validate_params(params, spec) == (params, spec)

    def test_validate_unsolvable(self):
        """Test p = 0 and v = 0 is rejected for any strategy."""
        with pytest.raises(UnsolvableInstance):
            validate_params(SearchParams(p=0.0, v=0.0), StrategySpec(kind=StrategyKind.SLOW, a=2.0))

    def test_validate_divergent_fast(self):
        """Test a fast ratio at or above 1/(1-p) is rejected."""
        with pytest.raises(DivergentFastRatio) as exc_info:
            validate_params(self.make_params(0.5, 0.5), StrategySpec(kind=StrategyKind.FAST, a=2.5))
        assert exc_info.value.error_code == "DIVERGENT_FAST_RATIO"

    def test_validate_fast_p_one_any_ratio(self):
        """Test every a > 1 converges when p = 1."""
        params, spec = SearchParams(p=1.0, v=0.0), StrategySpec(kind=StrategyKind.FAST, a=5.0)
        assert validate_params(params, spec) == (params, spec)


class TestSegment(BaseTest):
    """Tests for Segment and PassEvent geometry."""

    def test_covers_excludes_start(self):
        """Test a segment owns its end point but not its start point."""
        segment = Segment(-1.0, 0.0, SpeedClass.FAST, 1.0, 1.0, 2.0, 0)
        assert segment.covers(0.0)
        assert segment.covers(-0.5)
        assert not segment.covers(-1.0)

    def test_zero_length_covers_nothing(self):
        """Test a degenerate segment never produces a pass."""
        segment = Segment(2.0, 2.0, SpeedClass.FAST, 1.0, 3.0, 3.0, 0)
        assert not segment.covers(2.0)

    def test_time_and_direction(self):
        """Test pass time and travel direction."""
        segment = Segment(-0.5, -2.5, SpeedClass.SLOW, 0.5, 1.0, 5.0, 0)
        assert segment.time_at(-1.5) == pytest.approx(3.0)
        assert segment.direction is Direction.AWAY
        assert segment.to_dict()["speed_class"] == "slow"

    def test_side_alternation(self):
        """Test round 0 goes negative and sides alternate."""
        assert [side(i) for i in range(4)] == [-1, 1, -1, 1]


class TestTrajectory(BaseTest):
    """Tests for trajectory structure."""

    def test_fast_round_zero(self):
        """Test fast round 0 is 0 -> -1 -> 0 with duration 2."""
        first, second = self.fast(a=2.0).take(2)
        assert (first.start_pos, first.end_pos, second.end_pos) == (0.0, -1.0, 0.0)
        assert second.end_time == pytest.approx(2.0)

    def test_fast_round_end_time(self):
        """Test cumulative time at the end of round 2."""
        trajectory = self.fast(p=0.5)
        assert trajectory.round_end_time(2) == pytest.approx(74.0 / 9.0)

    def test_fast_round_parity(self):
        """Test round 1 visits +a and round 2 visits -a^2."""
        trajectory = self.fast(a=2.0)
        assert trajectory.round_segments(1)[0].end_pos == 2.0
        assert trajectory.round_segments(2)[0].end_pos == -4.0

    def test_contiguity_and_speed_identity(self):
        """Test segments chain in place and time for every strategy."""
        for trajectory in (self.fast(), self.slow(v=0.3), self.hybrid(1.7, 0.4, v=0.6)):
            segments = trajectory.take(40)
            for previous, current in zip(segments, segments[1:]):
                assert current.start_pos == previous.end_pos
                assert current.start_time == pytest.approx(previous.end_time, rel=1e-12)
            for segment in segments:
                assert segment.end_time - segment.start_time == pytest.approx(segment.length / segment.speed, rel=1e-12)
                assert segment.speed in (1.0, trajectory.params.v)

    def test_closed_form_round_times_match_walk(self):
        """Test round_end_time agrees with the accumulated segment walk."""
        trajectory = self.hybrid(1.8, 0.3)
        segments = trajectory.take(4 * 12)
        for i in range(12):
            assert segments[4 * i + 3].end_time == pytest.approx(trajectory.round_end_time(i), rel=1e-12)

    def test_rounds_return_to_origin(self):
        """Test every round ends at the origin."""
        trajectory = self.slow()
        for i in range(6):
            assert trajectory.round_segments(i)[-1].end_pos == 0.0

    def test_slow_round_zero_literal(self):
        """Test slow round 0 uses the literal a^-2 fast prefix."""
        trajectory = self.slow(v=0.5)
        prefix, slow, back = trajectory.round_segments(0)
        assert prefix.end_pos == pytest.approx(-0.30307, abs=1e-5)
        assert slow.speed_class is SpeedClass.SLOW
        assert back.end_time == pytest.approx(2.69693, abs=1e-5)

    def test_slow_equals_fast_at_unit_speed(self):
        """Test v = 1 slow rounds last 2a^i like fast rounds."""
        trajectory = self.slow(v=1.0, a=2.0)
        for i in range(2, 8):
            assert trajectory.round_duration(i) == pytest.approx(2.0 * 2.0**i)

    def test_hybrid_scout_endpoint(self):
        """Test the round 0 scout leg ends at -(1 + b(a^2 - 1))."""
        trajectory = self.hybrid(2.0, 0.5)
        assert trajectory.round_segments(0)[2].end_pos == pytest.approx(-2.5)

    def test_hybrid_b_zero_matches_slow(self):
        """Test b = 0 gives the slow trajectory's nonzero-length segments."""
        hybrid = [s for s in self.hybrid(1.8, 0.0, p=0.2, v=0.5).take(40) if s.length > 0]
        slow = self.slow(v=0.5, a=1.8, p=0.2).take(len(hybrid))
        assert [(s.start_pos, s.end_pos, s.speed_class, s.end_time) for s in hybrid] == [(s.start_pos, s.end_pos, s.speed_class, s.end_time) for s in slow]

    def test_slow_requires_speed(self):
        """Test slow segments are refused when v = 0."""
        with pytest.raises(SlowSpeedZero):
            strategies.slow_trajectory(SearchParams(p=0.5, v=0.0), 2.0)

    def test_segment_index(self):
        """Test segment(k) matches take."""
        trajectory = self.slow()
        assert trajectory.segment(7) == trajectory.take(8)[7]
