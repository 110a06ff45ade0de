"""CSV and JSON output with fixed formatting, plus the matching reader.

Floats are written with 12 significant digits so that identical runs give
byte-identical files.  The ``reentry_intervals`` column holds a JSON list of
``[t_on, t_off]`` pairs.
"""
from __future__ import annotations

import csv
import json
import os
import platform
from pathlib import Path

BORDER_COLUMNS = ("delta", "t_limit", "k_at_limit", "reentry_intervals")
PROFILE_COLUMNS = ("t", "negativity", "k")
RAW_NAMES = {"delta": "v_z", "t_limit": "T_limit", "t": "T"}
_INT_COLUMNS = {"k", "k_at_limit"}
_JSON_COLUMNS = {"reentry_intervals"}


def fmt(x: float) -> str:
    return f"{float(x):.12g}"


def fmt_intervals(intervals) -> str:
    return "[" + ",".join(f"[{fmt(a)},{fmt(b)}]" for a, b in intervals) + "]"


def _cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    return fmt(value)


def write_table(path, columns, rows) -> Path:
    """Write ``rows`` (sequences aligned with ``columns``) as CSV."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_cell(v) for v in row])
    return path


def read_table(path) -> tuple[list[str], list[dict]]:
    """Read a CSV written by :func:`write_table` back into typed rows."""
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        rows = []
        for raw in r:
            row = {}
            for key, cell in zip(header, raw):
                if key in _JSON_COLUMNS:
                    row[key] = [tuple(p) for p in json.loads(cell)]
                elif key in _INT_COLUMNS:
                    row[key] = int(cell)
                else:
                    row[key] = float(cell)
            rows.append(row)
    return header, rows


def rewrite_rows(header, rows) -> list[list]:
    """Inverse of :func:`read_table`, for round-trip checks."""
    out = []
    for row in rows:
        out.append([fmt_intervals(row[k]) if k in _JSON_COLUMNS else row[k] for k in header])
    return out


def write_json(path, obj) -> Path:
    path = Path(path)
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def versions() -> dict:
    import numpy
    import scipy

    from . import __version__

    return {"xxzent": __version__, "numpy": numpy.__version__, "scipy": scipy.__version__,
            "python": platform.python_version()}


def ensure_dir(path) -> Path:
    path = Path(path)
    os.makedirs(path, exist_ok=True)
    return path
