"""Readers for the shearchem file contracts.

Sweep CSV: '#' comment lines, then a header row containing at least the
SWEEP_COLUMNS below (unknown extra columns are ignored), then data rows
serialized with 17 significant digits.

Binary grid, little-endian: uint32 n_side, float64 L, then n_side^2
float64 values in row-major order (x index outer, y index inner).
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

SWEEP_COLUMNS = ("swept_param_name", "swept_param_value", "A", "shear_rate",
                 "L", "chi", "v_max", "nu", "dt", "n_runs", "n_hits",
                 "n_timeouts", "mean", "std", "stderr", "master_seed")


class SchemaError(ValueError):
    pass


def _data_lines(path):
    with open(path, newline="") as fh:
        for line in fh:
            if not line.startswith("#") and line.strip():
                yield line


def read_csv_table(path: str | Path, required: tuple[str, ...] = ()) -> dict:
    """Columns as float arrays (non-numeric columns as string lists)."""
    reader = csv.reader(_data_lines(path))
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError(f"{path}: empty file")
    missing = [c for c in required if c not in header]
    if missing:
        extra = [c for c in header if c not in required]
        raise SchemaError(
            f"{path}: missing columns {missing} (found extra/other columns "
            f"{extra})")
    rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    out: dict = {}
    for j, name in enumerate(header):
        col = [r[j] for r in rows]
        try:
            out[name] = np.array([float(v) for v in col])
        except ValueError:
            out[name] = col
    return out


def read_sweep_csv(path: str | Path) -> dict:
    return read_csv_table(path, required=SWEEP_COLUMNS)


def read_grid(path: str | Path) -> tuple[int, float, np.ndarray]:
    raw = Path(path).read_bytes()
    if len(raw) < 12:
        raise SchemaError(f"{path}: truncated grid header")
    n_side = int(np.frombuffer(raw, dtype="<u4", count=1)[0])
    L = float(np.frombuffer(raw, dtype="<f8", count=1, offset=4)[0])
    expected = 12 + 8 * n_side * n_side
    if len(raw) != expected or n_side == 0 or not np.isfinite(L) or L <= 0:
        raise SchemaError(
            f"{path}: header mismatch (n_side={n_side}, L={L}, "
            f"size {len(raw)} vs expected {expected})")
    values = np.frombuffer(raw, dtype="<f8", offset=12).reshape(n_side, n_side)
    return n_side, L, values
