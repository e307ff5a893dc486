"""On-disk formats. Every file starts with the line ``# tempnet-tradeoff format v1``.

Series CSV
    header line, then ``step,node_id,activity`` rows, step-major.
Series binary (``.bin``)
    header line, one JSON line (``n_nodes``, ``n_times``, ``seed``, ...),
    then ``n_times`` little-endian int64 steps followed by the
    ``n_nodes x n_times`` float64 activity matrix in C order, little-endian.
Grid CSV
    header line, then ``x,y,value`` rows; ``inf``/``nan`` are sentinels.
JSON documents carry the version string under ``"format"``.

CSV files are UTF-8 with LF line endings and ``.`` as decimal point.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .analysis import PhaseGrid
from .errors import DomainError
from .model import ScenarioKind
from .simulator import ActivitySeries

FORMAT_VERSION = "tempnet-tradeoff format v1"
FORMAT_HEADER = f"# {FORMAT_VERSION}"
DEFAULT_BINARY_THRESHOLD = 10**7


def format_value(value) -> str:
    if isinstance(value, ScenarioKind):
        return value.value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return repr(value)


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def _check_header(line: str, path) -> None:
    if line.rstrip("\n") != FORMAT_HEADER:
        raise DomainError(f"{path}: missing or unsupported format header {line!r}")


def series_rows(series: ActivitySeries, limit=None):
    count = 0
    for col, step in enumerate(series.times):
        for node in range(series.n_nodes):
            if limit is not None and count >= limit:
                return
            yield int(step), node, series.per_node[node, col]
            count += 1


def write_series_csv(series: ActivitySeries, path, limit=None) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(FORMAT_HEADER + "\n")
        w = _writer(fh)
        w.writerow(["step", "node_id", "activity"])
        for step, node, activity in series_rows(series, limit):
            w.writerow([step, node, format_value(activity)])
    return path


def read_series_csv(path):
    """Return ``(times, per_node)`` from a series CSV."""
    with open(path, encoding="utf-8", newline="") as fh:
        _check_header(fh.readline(), path)
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["step", "node_id", "activity"]:
            raise DomainError(f"{path}: unexpected columns {header}")
        rows = [(int(s), int(n), float(a)) for s, n, a in reader]
    steps = sorted({r[0] for r in rows})
    n_nodes = max(r[1] for r in rows) + 1
    index = {s: i for i, s in enumerate(steps)}
    per_node = np.empty((n_nodes, len(steps)))
    for s, n, a in rows:
        per_node[n, index[s]] = a
    return np.array(steps, dtype=np.int64), per_node


def write_series_binary(series: ActivitySeries, path) -> Path:
    path = Path(path)
    meta = {
        "n_nodes": int(series.n_nodes),
        "n_times": int(len(series.times)),
        "seed": int(series.seed),
        "run_index": int(series.run_index),
        "times_dtype": "<i8",
        "values_dtype": "<f8",
        "layout": "times then per_node[n_nodes, n_times] C-order",
    }
    with open(path, "wb") as fh:
        fh.write((FORMAT_HEADER + "\n").encode("utf-8"))
        fh.write((json.dumps(meta, sort_keys=True) + "\n").encode("utf-8"))
        fh.write(np.ascontiguousarray(series.times, dtype="<i8").tobytes())
        fh.write(np.ascontiguousarray(series.per_node, dtype="<f8").tobytes())
    return path


def read_series_binary(path):
    """Return ``(meta, times, per_node)`` from a binary series dump."""
    with open(path, "rb") as fh:
        _check_header(fh.readline().decode("utf-8"), path)
        meta = json.loads(fh.readline().decode("utf-8"))
        n, t = meta["n_nodes"], meta["n_times"]
        times = np.frombuffer(fh.read(8 * t), dtype="<i8").astype(np.int64)
        per_node = np.frombuffer(fh.read(8 * n * t), dtype="<f8").reshape(n, t).astype(float)
    return meta, times, per_node


def write_grid_csv(grid: PhaseGrid, path) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(FORMAT_HEADER + "\n")
        w = _writer(fh)
        w.writerow(["x", "y", "value"])
        for x, y, value in grid.cells():
            w.writerow([format_value(x), format_value(y), format_value(value)])
    return path


def read_grid_csv(path):
    """Return ``(x, y, values)`` with values as floats, or strings for scenario grids."""
    with open(path, encoding="utf-8", newline="") as fh:
        _check_header(fh.readline(), path)
        reader = csv.reader(fh)
        next(reader)
        rows = list(reader)
    xs = sorted({float(r[0]) for r in rows})
    ys = sorted({float(r[1]) for r in rows})
    xi = {v: i for i, v in enumerate(xs)}
    yi = {v: i for i, v in enumerate(ys)}
    try:
        [float(r[2]) for r in rows]
        values = np.empty((len(ys), len(xs)))
        convert = float
    except ValueError:
        values = np.empty((len(ys), len(xs)), dtype=object)
        convert = str
    for x, y, v in rows:
        values[yi[float(y)], xi[float(x)]] = convert(v)
    return np.array(xs), np.array(ys), values


def _json_value(value):
    if isinstance(value, ScenarioKind):
        return value.value
    value = float(value)
    return value if math.isfinite(value) else None


def grid_to_json(grid: PhaseGrid, tool_version: str) -> dict:
    """Structured document; non-finite numeric cells become ``null`` (see ``sentinel``)."""
    return {
        "format": FORMAT_VERSION,
        "tool_version": tool_version,
        "quantity": grid.quantity,
        "x_label": grid.x_label,
        "y_label": grid.y_label,
        "x": grid.x.tolist(),
        "y": grid.y.tolist(),
        "values": [[_json_value(v) for v in row] for row in grid.values],
        "metadata": grid.metadata,
    }


def write_contours_csv(contours: dict, path, x_label="m", y_label="k0") -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(FORMAT_HEADER + "\n")
        w = _writer(fh)
        w.writerow(["level", "segment", x_label, y_label])
        for level, segments in contours.items():
            for s, seg in enumerate(segments):
                for x, y in seg:
                    w.writerow([format_value(level), s, format_value(x), format_value(y)])
    return path


def write_json(document: dict, path) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(json.dumps(document, indent=2, sort_keys=True, allow_nan=False))
        fh.write("\n")
    return path
