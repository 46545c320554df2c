"""CSV/JSON output with atomic staging, and path CSV input."""

from __future__ import annotations

import contextlib
import csv
import io
import json
import os
import shutil
import tempfile
from pathlib import Path

import numpy as np

from .core import FouqvError, GridError, grid_from_points

FLOAT_FMT = "%.17g"


class InputDataError(FouqvError, ValueError):
    """Malformed or unusable input data (exit code 3)."""


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return FLOAT_FMT % float(x)
    return str(x)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def json_text(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


@contextlib.contextmanager
def staged_output(out_dir):
    """Yield a staging directory; on success its files replace those in ``out_dir``.

    Nothing lands in ``out_dir`` if the block raises.
    """
    out = Path(out_dir)
    out.parent.mkdir(parents=True, exist_ok=True)
    stage = Path(tempfile.mkdtemp(prefix=".fouqv-stage-", dir=out.parent))
    try:
        yield stage
        out.mkdir(parents=True, exist_ok=True)
        for f in sorted(stage.iterdir()):
            os.replace(f, out / f.name)
    finally:
        shutil.rmtree(stage, ignore_errors=True)


def write_text(directory, name: str, text: str) -> Path:
    path = Path(directory) / name
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(text)
    return path


def write_path_csv(directory, name: str, times, values) -> Path:
    return write_text(directory, name, csv_text(["t", "value"], zip(times, values)))


def read_path_csv(path):
    """Read a ``t,value`` CSV into a grid and values; the grid must be uniform."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise InputDataError(f"cannot read {path}: {exc}") from exc
    if not rows or [c.strip() for c in rows[0]] != ["t", "value"]:
        raise InputDataError(f"{path}: expected header 't,value'")
    try:
        data = np.array([[float(a), float(b)] for a, b in rows[1:]], dtype=float)
    except ValueError as exc:
        raise InputDataError(f"{path}: non-numeric or malformed row ({exc})") from exc
    if data.shape[0] < 2:
        raise InputDataError(f"{path}: need at least two rows")
    if not np.all(np.isfinite(data)):
        raise InputDataError(f"{path}: non-finite values")
    try:
        grid = grid_from_points(data[:, 0])
    except (GridError, ValueError) as exc:
        raise InputDataError(f"{path}: {exc}") from exc
    if not grid.uniform:
        raise InputDataError(f"{path}: sample times are not uniformly spaced")
    return grid, data[:, 1]
