"""CSV and JSON encodings of HeatmapGrid.

Floats are written with repr, the shortest text that parses back to the same double, and
infinite values as the literal string "inf". Both encodings are byte-stable for a given grid.
"""

import csv
import io
import math
from pathlib import Path
from typing import Any, List, Union

import orjson

from ..core.exceptions import InvalidGrid, OutputError
from ..core.logging import get_logger
from ..schemas import HeatmapGrid, HeatmapQuantity

logger = get_logger(__name__)

CSV_HEADER = ("p", "v", "value")


def format_float(value: float, integral: bool = False) -> str:
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if integral:
        return str(int(value))
    return repr(float(value))


def encode_nonfinite(obj: Any) -> Any:
    """Replace infinite floats, at any depth, with their "inf" spelling."""
    if isinstance(obj, float) and math.isinf(obj):
        return format_float(obj)
    if isinstance(obj, dict):
        return {key: encode_nonfinite(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode_nonfinite(value) for value in obj]
    return obj


def grid_to_csv(grid: HeatmapGrid) -> str:
    """Header line then one `p,v,value` row per cell, v outer, LF line endings."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    integral = grid.quantity is HeatmapQuantity.REGION
    for p, v, value in grid.cells():
        writer.writerow((format_float(p), format_float(v), format_float(value, integral)))
    return buffer.getvalue()


def grid_from_csv(text: str, quantity: HeatmapQuantity, meta: Any = None) -> HeatmapGrid:
    """Rebuild a grid from its CSV rows; axes are recovered from the row order."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise InvalidGrid("csv", f"expected header {','.join(CSV_HEADER)}")
    cells = [(float(p), float(v), float(value)) for p, v, value in rows[1:]]
    p_axis: List[float] = []
    v_axis: List[float] = []
    for p, v, _ in cells:
        if not v_axis or v_axis[-1] != v:
            v_axis.append(v)
        if len(v_axis) == 1:
            p_axis.append(p)
    width = len(p_axis)
    values = [[value for _, _, value in cells[row * width : (row + 1) * width]] for row in range(len(v_axis))]
    return HeatmapGrid(quantity=quantity, p_axis=p_axis, v_axis=v_axis, values=values, meta=meta or {})


def grid_to_json(grid: HeatmapGrid) -> bytes:
    payload = {
        "quantity": grid.quantity.value,
        "p_axis": grid.p_axis,
        "v_axis": grid.v_axis,
        "values": encode_nonfinite(grid.values),
        "meta": grid.meta,
    }
    return orjson.dumps(payload, option=orjson.OPT_SORT_KEYS | orjson.OPT_APPEND_NEWLINE)


def grid_from_json(data: Union[bytes, str]) -> HeatmapGrid:
    payload = orjson.loads(data)
    return HeatmapGrid(
        quantity=HeatmapQuantity(payload["quantity"]),
        p_axis=[float(x) for x in payload["p_axis"]],
        v_axis=[float(x) for x in payload["v_axis"]],
        values=[[float(value) for value in row] for row in payload["values"]],
        meta=payload.get("meta", {}),
    )


def write_grid(grid: HeatmapGrid, path: Union[str, Path], output_format: str = "csv") -> Path:
    """Write the grid to path in the given format ("csv" or "json")."""
    target = Path(path)
    if output_format == "csv":
        data = grid_to_csv(grid).encode("utf-8")
    elif output_format == "json":
        data = grid_to_json(grid)
    else:
        raise OutputError(str(target), f"unknown format {output_format!r}")
    try:
        if target.parent and not target.parent.exists():
            target.parent.mkdir(parents=True, exist_ok=True)
        target.write_bytes(data)
    except OSError as exc:
        raise OutputError(str(target), str(exc)) from exc
    logger.info("Heatmap written", extra={"path": str(target), "format": output_format, "quantity": grid.quantity.value})
    return target


def read_grid(path: Union[str, Path], quantity: HeatmapQuantity = HeatmapQuantity.CR_BEST) -> HeatmapGrid:
    """Read a grid written by write_grid; CSV files carry no quantity, so pass it in."""
    source = Path(path)
    try:
        data = source.read_bytes()
    except OSError as exc:
        raise OutputError(str(source), str(exc)) from exc
    if source.suffix == ".json":
        return grid_from_json(data)
    return grid_from_csv(data.decode("utf-8"), quantity)
