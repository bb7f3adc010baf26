"""CSV and JSON serialization of branches, paths and source paths.

CSV files carry a header row and one row per grid point:

* branch:       ``t,re,im``
* phase space:  ``t,q,p``
* sources:      ``t,xi,chi``

JSON files hold a single object ``{"kind": ..., "t": [...], <col>: [...], ...}``
with the same column names.  Times must be uniformly spaced.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .core import BranchHistory, PhaseSpacePath, SourcePath, TimeGrid
from .errors import PreconditionError

COLUMNS = {
    "branch": ("re", "im"),
    "phase_space": ("q", "p"),
    "sources": ("xi", "chi"),
}


def grid_from_times(t) -> TimeGrid:
    t = np.asarray(t, dtype=float)
    if t.size == 1:
        return TimeGrid(float(t[0]), 1.0, 1)
    steps = np.diff(t)
    dt = float(steps.mean())
    if dt <= 0 or np.max(np.abs(steps - dt)) > 1e-9 * max(1.0, abs(dt)):
        raise PreconditionError("times must be strictly increasing and uniformly spaced")
    return TimeGrid(float(t[0]), dt, int(t.size))


def _columns(obj):
    if isinstance(obj, BranchHistory):
        return "branch", (obj.alphas.real, obj.alphas.imag)
    if isinstance(obj, PhaseSpacePath):
        return "phase_space", (obj.q, obj.p)
    if isinstance(obj, SourcePath):
        return "sources", (obj.xi, obj.chi)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _build(kind, grid, a, b):
    if kind == "branch":
        return BranchHistory(grid, np.asarray(a) + 1j * np.asarray(b))
    if kind == "phase_space":
        return PhaseSpacePath(grid, a, b)
    if kind == "sources":
        return SourcePath(grid, a, b)
    raise PreconditionError(f"unknown record kind {kind!r}")


def write_csv(obj, path) -> None:
    kind, (a, b) = _columns(obj)
    names = COLUMNS[kind]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("t",) + names)
        for row in zip(obj.grid.times, a, b):
            writer.writerow([repr(float(x)) for x in row])


def read_csv(path, kind: str | None = None):
    """Read a CSV file; the kind is inferred from the header when not given."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise PreconditionError(f"{path}: empty file")
    header = tuple(h.strip() for h in rows[0])
    if kind is None:
        for k, cols in COLUMNS.items():
            if header == ("t",) + cols:
                kind = k
                break
        else:
            raise PreconditionError(f"{path}: unrecognised header {header}")
    elif header != ("t",) + COLUMNS[kind]:
        raise PreconditionError(f"{path}: expected header t,{','.join(COLUMNS[kind])}")
    try:
        data = np.array([[float(x) for x in r] for r in rows[1:] if r], dtype=float)
    except ValueError as exc:
        raise PreconditionError(f"{path}: {exc}") from exc
    if data.ndim != 2 or data.shape[0] == 0 or data.shape[1] != 3:
        raise PreconditionError(f"{path}: expected three numeric columns")
    return _build(kind, grid_from_times(data[:, 0]), data[:, 1], data[:, 2])


def to_record(obj) -> dict:
    kind, (a, b) = _columns(obj)
    names = COLUMNS[kind]
    return {
        "kind": kind,
        "t": [float(x) for x in obj.grid.times],
        names[0]: [float(x) for x in a],
        names[1]: [float(x) for x in b],
    }


def from_record(rec: dict):
    kind = rec.get("kind")
    if kind not in COLUMNS:
        raise PreconditionError(f"unknown record kind {kind!r}")
    c0, c1 = COLUMNS[kind]
    try:
        return _build(kind, grid_from_times(rec["t"]), rec[c0], rec[c1])
    except KeyError as exc:
        raise PreconditionError(f"record is missing field {exc}") from exc


def write_json(obj, path) -> None:
    Path(path).write_text(json.dumps(to_record(obj)))


def read_json(path):
    try:
        rec = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise PreconditionError(f"{path}: {exc}") from exc
    return from_record(rec)


def read_any(path, kind: str | None = None):
    """Dispatch on file extension (``.json`` or anything else as CSV)."""
    if str(path).endswith(".json"):
        obj = read_json(path)
        if kind is not None and _columns(obj)[0] != kind:
            raise PreconditionError(f"{path}: expected a {kind} record")
        return obj
    return read_csv(path, kind)


def complex_result(value: complex) -> dict:
    """JSON form of a complex result, including its logarithm."""
    value = complex(value)
    out = {"re": value.real, "im": value.imag}
    if value != 0:
        lg = np.log(value)
        out.update(log_re=float(lg.real), log_im=float(lg.imag))
    return out


def complex_from_log(log_value: complex) -> dict:
    log_value = complex(log_value)
    value = np.exp(log_value)
    return {
        "re": float(value.real),
        "im": float(value.imag),
        "log_re": log_value.real,
        "log_im": log_value.imag,
    }
