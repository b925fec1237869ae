"""CSV and JSON artifacts.

JSON records have the shape::

    {"schema_version": 1, "artifact": "singseries", "version": ...,
     "backend": ..., "command": ..., "parameters": {...}, "result": {...}}

``parameters`` holds every option of the run (defaults included), which is
enough to replay it. Histogram CSVs have the columns ``bin_lo, bin_hi,
count``; empirical histograms add a first row with ``bin_lo = bin_hi = 0``
holding the atom at zero.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from . import __version__, kernels

SCHEMA_VERSION = 1


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        obj = float(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def make_record(command, parameters, result):
    return {
        "schema_version": SCHEMA_VERSION,
        "artifact": "singseries",
        "version": __version__,
        "backend": kernels.BACKEND,
        "command": command,
        "parameters": _plain(parameters),
        "result": _plain(result),
    }


def write_json(path, record):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(record, indent=2, sort_keys=True) + "\n")
    return path


def read_json(path):
    record = json.loads(Path(path).read_text())
    if record.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema version {record.get('schema_version')!r}")
    return record


def histogram_rows(edges, counts, zero_count=None):
    rows = []
    if zero_count is not None:
        rows.append((0.0, 0.0, zero_count))
    for lo, hi, c in zip(edges[:-1], edges[1:], counts):
        rows.append((float(lo), float(hi), c))
    return rows


def write_csv(path, rows, header=("bin_lo", "bin_hi", "count")):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])
    return path


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return repr(int(x)) if x.is_integer() and abs(x) < 1 << 53 else repr(x)
    return str(_plain(x))
