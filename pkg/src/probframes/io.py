"""Reading and writing measures, plus deterministic JSON serialization.

Measure JSON::

    {"dim": N, "type": "discrete", "points": [[...], ...], "weights": [...]}
    {"dim": N, "type": "mixture",
     "components": [{"weight": w, "mean": [...], "cov": [[...], ...]}, ...]}

CSV holds one point per row; with ``weight_column=True`` the last column
is the weight, otherwise weights are uniform.
"""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .errors import InvalidMeasureError
from .measures import DiscreteMeasure, GaussianMixtureMeasure, Measure


def format_float(x: float) -> str:
    """17 significant digits, which round-trips every double."""
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    if x == 0.0:
        return "0.0"
    s = format(x, ".17g")
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, (int, np.integer)) and not isinstance(obj, bool):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), indent, level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(obj[k], indent, level + 1)}"
                 for k in sorted(obj, key=str)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """Canonical JSON: sorted keys, fixed layout, 17-digit floats."""
    return _encode(obj, indent, 0) + "\n"


def measure_to_dict(m: Measure) -> dict:
    if isinstance(m, DiscreteMeasure):
        return {"dim": m.dim, "type": "discrete",
                "points": m.points.tolist(), "weights": m.weights.tolist()}
    if isinstance(m, GaussianMixtureMeasure):
        return {"dim": m.dim, "type": "mixture",
                "components": [{"weight": float(w), "mean": mu.tolist(), "cov": c.tolist()}
                               for w, mu, c in m.components]}
    raise TypeError(f"expected a measure, got {type(m).__name__}")


def measure_from_dict(d: dict) -> Measure:
    try:
        dim = int(d["dim"])
        kind = d.get("type", "discrete")
        if kind == "discrete":
            pts = np.asarray(d["points"], dtype=float).reshape(-1, dim)
            m = DiscreteMeasure(pts, d.get("weights"))
        elif kind == "mixture":
            comps = d["components"]
            if not comps:
                raise InvalidMeasureError("mixture has no components")
            m = GaussianMixtureMeasure(
                [c["weight"] for c in comps],
                np.asarray([c["mean"] for c in comps], dtype=float).reshape(-1, dim),
                np.asarray([c["cov"] for c in comps], dtype=float).reshape(-1, dim, dim))
        else:
            raise InvalidMeasureError(f"unknown measure type {kind!r}")
    except InvalidMeasureError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidMeasureError(f"malformed measure document: {exc}") from exc
    if m.dim != dim:
        raise InvalidMeasureError(f"declared dim {dim} but data has dim {m.dim}")
    return m


def dumps_measure(m: Measure) -> str:
    return dumps(measure_to_dict(m))


def loads_measure(text: str) -> Measure:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidMeasureError(f"invalid JSON: {exc}") from exc
    if not isinstance(d, dict):
        raise InvalidMeasureError("measure document must be a JSON object")
    return measure_from_dict(d)


def read_points_csv(path, weight_column: bool = False):
    """Rows of floats from a CSV file; returns ``(points, weights or None)``.

    Blank lines and lines starting with ``#`` are skipped, as is a single
    non-numeric header row.
    """
    text = Path(path).read_text()
    rows = []
    header_allowed = True
    for k, row in enumerate(csv.reader(io.StringIO(text))):
        if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
            continue
        try:
            rows.append([float(v) for v in row])
        except ValueError:
            if header_allowed:
                header_allowed = False
                continue
            raise InvalidMeasureError(f"{path}: non-numeric value on line {k + 1}") from None
        header_allowed = False
    if not rows:
        raise InvalidMeasureError(f"{path}: no data rows")
    if len({len(r) for r in rows}) != 1:
        raise InvalidMeasureError(f"{path}: rows have different lengths")
    arr = np.asarray(rows)
    if weight_column:
        if arr.shape[1] < 2:
            raise InvalidMeasureError(f"{path}: weight column needs at least two columns")
        return arr[:, :-1], arr[:, -1]
    return arr, None


def read_measure(path, weight_column: bool = False) -> Measure:
    """Load a measure from ``.json`` or ``.csv``."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        pts, w = read_points_csv(path, weight_column)
        return DiscreteMeasure(pts, w)
    return loads_measure(path.read_text())


def write_measure(m: Measure, path) -> None:
    Path(path).write_text(dumps_measure(m))
