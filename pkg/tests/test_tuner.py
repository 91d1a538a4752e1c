"""Tests for linesearch.services.tuner."""

import math

import numpy as np
import pytest

from linesearch.core.exceptions import InvalidGrid, SlowSpeedZero
from linesearch.models import StrategyKind
from linesearch.schemas import HeatmapQuantity, Region
from linesearch.services import strategies, tuner

from .base_test import BaseTest


class TestOptimizeHybrid(BaseTest):
    """Tests for optimize_hybrid."""

    def test_zero_probability_is_slow(self):
        """Test p = 0 tunes to the slow strategy."""
        tuned = tuner.optimize_hybrid(0.0, 0.5)
        assert tuned.b_star == 0.0
        assert tuned.a_star == pytest.approx(strategies.slow_ratio(0.5), abs=1e-4)
        assert tuned.cr_star == pytest.approx(strategies.slow_cr(0.5).value, abs=1e-6)

    def test_classic_corner(self):
        """Test p = 1, v = 1 gives 9."""
        assert tuner.optimize_hybrid(1.0, 1.0).cr_star == pytest.approx(9.0, abs=1e-6)

    def test_never_worse_than_slow(self):
        """Test the tuned CR is at most the slow CR."""
        tuned = tuner.optimize_hybrid(0.5, 0.5)
        assert tuned.cr_star <= strategies.slow_cr(0.5).value + 1e-6
        assert tuned.cr_star == pytest.approx(max(tuned.cr1, tuned.cr2))

    def test_not_worse_than_probed_cells(self, small_budget):
        """Test the optimum beats every coarse grid cell."""
        tuned = tuner.optimize_hybrid(0.4, 0.3, small_budget)
        a_axis = np.geomspace(small_budget.a_min, small_budget.a_max, small_budget.coarse_grid)
        b_axis = np.linspace(0.0, 1.0, small_budget.coarse_grid)
        probed = strategies.hybrid_cr_kernel(a_axis[:, None], b_axis[None, :], 0.4, 0.3)
        assert tuned.cr_star <= probed.min() * (1.0 + 1e-9)

    def test_restarts_agree(self):
        """Test refinements from several coarse seeds reach the same value."""
        values = [t.cr_star for t in tuner.optimize_hybrid_restarts(0.5, 0.5)]
        assert len(values) == 4
        assert max(values) - min(values) <= 1e-6

    def test_zero_speed_rejected(self):
        """Test v = 0 cannot be tuned."""
        with pytest.raises(SlowSpeedZero):
            tuner.optimize_hybrid(0.5, 0.0)

    def test_best_scout_ratio_zero_at_p_zero(self):
        """Test scouting is useless when fast passes never detect."""
        assert tuner.best_scout_ratio(1.8, 0.0, 0.5) == 0.0


class TestThreshold(BaseTest):
    """Tests for the fast/slow threshold and recommendation."""

    def test_threshold_values(self):
        """Test the threshold at p = 1, 0.5 and 0."""
        assert tuner.fast_slow_threshold(1.0) == pytest.approx(1.0, abs=1e-12)
        assert tuner.fast_slow_threshold(0.5) == pytest.approx(0.275846, abs=1e-6)
        assert tuner.fast_slow_threshold(0.0) == 0.0

    def test_threshold_identity(self):
        """Test slow_cr(threshold(p)) = fast_cr(p)."""
        for p in np.linspace(0.1, 1.0, 10):
            assert strategies.slow_cr(tuner.fast_slow_threshold(p)).value == pytest.approx(strategies.fast_cr(p).value, rel=1e-9)

    def test_printed_variant_differs(self):
        """Test the printed variant is reported separately and is smaller at p = 0.5."""
        printed = tuner.fast_slow_threshold_printed(0.5)
        assert printed == pytest.approx(0.2644, abs=1e-3)
        assert printed < tuner.fast_slow_threshold(0.5)

    def test_threshold_sign_consistency(self):
        """Test fast beats slow exactly below the threshold."""
        for p in np.linspace(0.05, 1.0, 12):
            threshold = tuner.fast_slow_threshold(p)
            for v in np.linspace(0.05, 1.0, 12):
                difference = strategies.fast_cr(p).value - strategies.slow_cr(v).value
                if abs(difference) > 1e-9:
                    assert (difference < 0) == (v < threshold)

    def test_recommendation(self):
        """Test the recommendation follows the threshold."""
        assert tuner.recommend_strategy(1.0, 0.2) is StrategyKind.FAST
        assert tuner.recommend_strategy(0.05, 0.9) is StrategyKind.SLOW
        assert tuner.recommend_strategy(0.0, 0.5) is StrategyKind.SLOW


class TestRegions(BaseTest):
    """Tests for classify_region."""

    def test_fast_best(self):
        """Test p = 1, v = 0.2 is fast territory."""
        assert tuner.classify_region(1.0, 0.2, tuner.optimize_hybrid(1.0, 0.2)) is Region.FAST_BEST

    def test_not_fast_best(self):
        """Test p = 0.05, v = 0.9 is not fast territory."""
        assert tuner.classify_region(0.05, 0.9, tuner.optimize_hybrid(0.05, 0.9)) is not Region.FAST_BEST

    def test_zero_probability(self):
        """Test p = 0 favours slow."""
        assert tuner.classify_region(0.0, 0.5, tuner.optimize_hybrid(0.0, 0.5)) is Region.SLOW_BEATS_FAST

    def test_tie_goes_to_fast(self):
        """Test the classic corner is a tie resolved toward fast."""
        assert tuner.classify_region(1.0, 1.0, tuner.optimize_hybrid(1.0, 1.0)) is Region.FAST_BEST

    def test_degenerate(self):
        """Test p = 0, v = 0 is degenerate."""
        assert tuner.classify_region(0.0, 0.0, None) is Region.DEGENERATE


class TestHeatmap(BaseTest):
    """Tests for build_heatmap."""

    def test_slow_row_at_unit_speed(self):
        """Test the v = 1 row of cr_slow is all 9."""
        grid = tuner.build_heatmap(HeatmapQuantity.CR_SLOW, 5)
        assert len(grid.cells()) == 25
        assert grid.v_axis[-1] == 1.0
        assert all(value == pytest.approx(9.0, abs=1e-12) for value in grid.values[-1])

    def test_zero_speed_sentinel(self):
        """Test v = 0 hybrid cells are +inf."""
        grid = tuner.build_heatmap(HeatmapQuantity.CR_HYBRID, 2, p_range=(0.5, 1.0), v_range=(0.0, 1.0), budget=tuner.OptimizerBudget(coarse_grid=16))
        assert all(math.isinf(value) for value in grid.values[0])

    def test_meta(self):
        """Test the metadata records grid, seed and version."""
        grid = tuner.build_heatmap(HeatmapQuantity.CR_FAST, 3, seed=11)
        assert grid.meta["grid"] == 3
        assert grid.meta["seed"] == 11
        assert "version" in grid.meta

    def test_invalid_grid(self):
        """Test grids need two points per axis inside [0, 1]."""
        with pytest.raises(InvalidGrid):
            tuner.build_heatmap(HeatmapQuantity.CR_FAST, 1)
        with pytest.raises(InvalidGrid):
            tuner.build_heatmap(HeatmapQuantity.CR_FAST, 3, p_range=(0.5, 1.5))

    def test_region_codes(self, small_budget):
        """Test region rasters only use the three non-degenerate codes inside (0, 1]."""
        grid = tuner.build_heatmap(HeatmapQuantity.REGION, 6, budget=small_budget)
        assert {value for row in grid.values for value in row} <= {0.0, 1.0, 2.0}

    @pytest.mark.slow
    def test_dominance_and_region_growth(self):
        """Test hybrid never loses to slow and wins wherever slow wins."""
        axis = np.linspace(0.05, 0.95, 20)
        for v in axis:
            slow = strategies.slow_cr(v).value
            for p in axis:
                tuned = tuner.optimize_hybrid(p, v)
                assert tuned.cr_star <= slow + 1e-6
                if slow < strategies.fast_cr(p).value - 1e-9:
                    assert tuned.cr_star < strategies.fast_cr(p).value

    @pytest.mark.slow
    def test_improvement_grid_deterministic_across_jobs(self):
        """Test the improvement grid is identical for one and several workers."""
        serial = tuner.build_heatmap(HeatmapQuantity.IMPROVEMENT, 20, seed=1, jobs=1)
        parallel = tuner.build_heatmap(HeatmapQuantity.IMPROVEMENT, 20, seed=1, jobs=4)
        assert serial == parallel
        assert min(min(row) for row in serial.values) >= -1e-6
