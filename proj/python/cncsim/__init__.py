"""Python access to the cnc routing simulator.

Scenarios and sweeps are passed as JSON text or as plain dicts.
"""

import csv
import io
import json
import os

from ._cncsim import CSV_HEADER, CncError
from . import _cncsim

__all__ = ["CSV_HEADER", "CncError", "validate", "normalize", "run", "plan", "sweep", "read_results", "COLUMNS"]

COLUMNS = tuple(CSV_HEADER.split(","))

_INT_COLUMNS = {"submitted", "completed", "rejected", "missed"}
_TEXT_COLUMNS = {"scheme", "load", "seed", "status"}


def _text(obj):
    if isinstance(obj, (dict, list)):
        return json.dumps(obj)
    if isinstance(obj, os.PathLike):
        with open(obj) as f:
            return f.read()
    return obj


def validate(scenario):
    """List of (code, message) diagnostics; empty when the scenario is usable."""
    return _cncsim.validate(_text(scenario))


def normalize(scenario):
    """Scenario as a dict with every default filled in."""
    return json.loads(_cncsim.normalize(_text(scenario)))


def run(scenario, scheme=None, seed=None, trace=False):
    return _cncsim.run(_text(scenario), scheme, seed, trace)


def plan(scenario, request_id, scheme=None):
    return _cncsim.plan(_text(scenario), request_id, scheme)


def sweep(scenario, sweep_spec, jobs=1):
    """Results CSV text for a sweep grid."""
    return _cncsim.sweep(_text(scenario), _text(sweep_spec), jobs)


def _convert(column, value):
    if column in _TEXT_COLUMNS:
        return value
    if value == "":
        return None
    if column in _INT_COLUMNS:
        return int(float(value))
    return float(value)


def read_results(source):
    """Rows of a results CSV as dicts.

    `source` is a path or the CSV text itself. Raises ValueError when the
    header does not match the expected column set.
    """
    if isinstance(source, os.PathLike) or (isinstance(source, str) and "\n" not in source):
        with open(source, newline="") as f:
            text = f.read()
    else:
        text = source
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ValueError("results CSV is empty") from None
    missing = [c for c in COLUMNS if c not in header]
    extra = [c for c in header if c not in COLUMNS]
    if missing or extra or tuple(header) != COLUMNS:
        parts = []
        if missing:
            parts.append("missing columns: " + ", ".join(missing))
        if extra:
            parts.append("unexpected columns: " + ", ".join(extra))
        if not parts:
            parts.append("columns out of order")
        raise ValueError("results CSV schema mismatch; " + "; ".join(parts))
    rows = []
    for n, record in enumerate(reader, start=2):
        if not record:
            continue
        if len(record) != len(COLUMNS):
            raise ValueError(f"line {n}: expected {len(COLUMNS)} fields, got {len(record)}")
        rows.append({c: _convert(c, v) for c, v in zip(COLUMNS, record)})
    return rows
