"""Tests for linesearch.services.heatmap_io - CSV and JSON grid files."""

import math

import orjson
import pytest

from linesearch.core.exceptions import InvalidGrid, OutputError
from linesearch.schemas import HeatmapGrid, HeatmapQuantity
from linesearch.services import heatmap_io

from .base_test import BaseTest


@pytest.fixture
def grid():
    return HeatmapGrid(
        quantity=HeatmapQuantity.CR_HYBRID,
        p_axis=[0.1, 0.55, 1.0],
        v_axis=[0.0, 1.0],
        values=[[math.inf, math.inf, math.inf], [9.000000000000002, 8.75, 9.0]],
        meta={"grid": 3, "seed": 0, "version": "1.0.0"},
    )


class TestCsv(BaseTest):
    """Tests for the CSV encoding."""

    def test_header_and_rows(self, grid):
        """Test one header line and one row per cell, v outer."""
        lines = heatmap_io.grid_to_csv(grid).split("\n")
        assert lines[0] == "p,v,value"
        assert lines[1] == "0.1,0.0,inf"
        assert lines[4] == "0.1,1.0,9.000000000000002"
        assert lines[-1] == ""
        assert len(lines) == 8

    def test_round_trip(self, grid):
        """Test axes and values are recovered exactly."""
        restored = heatmap_io.grid_from_csv(heatmap_io.grid_to_csv(grid), grid.quantity, grid.meta)
        assert restored == grid

    def test_region_codes_are_integers(self):
        """Test region rasters are written without a decimal point."""
        regions = HeatmapGrid(quantity=HeatmapQuantity.REGION, p_axis=[0.5, 1.0], v_axis=[0.5, 1.0], values=[[1.0, 0.0], [2.0, 0.0]])
        assert heatmap_io.grid_to_csv(regions).split("\n")[1] == "0.5,0.5,1"

    def test_bad_header(self):
        """Test files without the expected header are rejected."""
        with pytest.raises(InvalidGrid):
            heatmap_io.grid_from_csv("a,b,c\n1,2,3\n", HeatmapQuantity.CR_FAST)


class TestJson(BaseTest):
    """Tests for the JSON encoding."""

    def test_infinity_spelled_out(self, grid):
        """Test infinite cells are the string inf."""
        payload = orjson.loads(heatmap_io.grid_to_json(grid))
        assert payload["values"][0] == ["inf", "inf", "inf"]
        assert sorted(payload) == ["meta", "p_axis", "quantity", "v_axis", "values"]

    def test_round_trip(self, grid):
        """Test JSON decodes back to the same grid."""
        assert heatmap_io.grid_from_json(heatmap_io.grid_to_json(grid)) == grid

    def test_byte_stable(self, grid):
        """Test two encodings of the same grid are identical bytes."""
        assert heatmap_io.grid_to_json(grid) == heatmap_io.grid_to_json(grid.model_copy())

    def test_encode_nonfinite_nested(self):
        """Test infinities are replaced at any depth."""
        assert heatmap_io.encode_nonfinite({"a": [1.0, -math.inf], "b": {"c": math.inf}}) == {"a": [1.0, "-inf"], "b": {"c": "inf"}}


class TestFiles(BaseTest):
    """Tests for write_grid and read_grid."""

    def test_write_and_read(self, grid, tmp_path):
        """Test both formats survive a trip through the filesystem."""
        csv_path = heatmap_io.write_grid(grid, tmp_path / "out" / "grid.csv", "csv")
        json_path = heatmap_io.write_grid(grid, tmp_path / "grid.json", "json")
        assert heatmap_io.read_grid(csv_path, HeatmapQuantity.CR_HYBRID).values == grid.values
        assert heatmap_io.read_grid(json_path) == grid

    def test_unknown_format(self, grid, tmp_path):
        """Test unknown formats are output errors."""
        with pytest.raises(OutputError):
            heatmap_io.write_grid(grid, tmp_path / "grid.xml", "xml")

    def test_unwritable_path(self, grid, tmp_path):
        """Test an existing file in place of a directory is an output error."""
        blocker = tmp_path / "blocker"
        blocker.write_text("")
        with pytest.raises(OutputError):
            heatmap_io.write_grid(grid, blocker / "grid.csv")

    def test_missing_file(self, tmp_path):
        """Test reading a missing file is an output error."""
        with pytest.raises(OutputError):
            heatmap_io.read_grid(tmp_path / "missing.csv")
