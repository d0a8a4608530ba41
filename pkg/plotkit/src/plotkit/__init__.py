"""Render shearchem CSV and binary-grid outputs into the standard figures."""

__version__ = "0.1.0"

from .figures import KINDS, STYLE, FigureSpec, build_figure, render
from .schema import (SWEEP_COLUMNS, SchemaError, read_csv_table, read_grid,
                     read_sweep_csv)

__all__ = ["KINDS", "STYLE", "FigureSpec", "build_figure", "render",
           "SWEEP_COLUMNS", "SchemaError", "read_csv_table", "read_grid",
           "read_sweep_csv"]
