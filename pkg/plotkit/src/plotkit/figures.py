"""Figure builders: one per figure kind, deterministic output.

Rendering is read-only: heatmaps and curves show file contents as-is (the
vector-field kind derives its arrows from the stored grid by periodic
centered differences, a display transform). SVG output is byte-stable
under the pinned style: fixed hashsalt, no date metadata, text kept as
text.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .schema import SchemaError, read_csv_table, read_grid, read_sweep_csv

KINDS = ("sweep_curve", "field_heatmap", "vector_field", "success_fraction",
         "convergence")

STYLE = {
    "figure.figsize": (6.4, 4.4),
    "figure.dpi": 100,
    "savefig.dpi": 100,
    "font.family": "DejaVu Sans",
    "font.size": 10.0,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "svg.hashsalt": "plotkit",
    "svg.fonttype": "none",
    "path.simplify": False,
}


@dataclass
class FigureSpec:
    kind: str
    inputs: list[str]
    log_x: bool = True
    reference: float | None = None
    title: str = ""
    target_radius: float = 1.0
    quiver_step: int = 8

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}")


def _finite_rows(cols, *names):
    mask = np.ones(len(cols[names[0]]), dtype=bool)
    for n in names:
        mask &= np.isfinite(cols[n])
    if not mask.any():
        raise SchemaError("no usable (finite) data rows")
    return mask


def _sweep_curve(spec: FigureSpec, ax) -> None:
    cols = read_sweep_csv(spec.inputs[0])
    m = _finite_rows(cols, "swept_param_value", "mean", "std")
    x, y, s = (cols[k][m] for k in ("swept_param_value", "mean", "std"))
    ax.errorbar(x, y, yerr=2 * s, fmt="o-", ms=4, lw=1, capsize=2,
                color="#1f77b4", ecolor="#1f77b4")
    if spec.reference is not None:
        ax.axhline(spec.reference, color="#d62728", lw=1.2)
    if spec.log_x:
        ax.set_xscale("symlog" if (x == 0).any() else "log")
    name = cols["swept_param_name"]
    ax.set_xlabel(name[0] if isinstance(name, list) else "swept parameter")
    ax.set_ylabel("expected hitting time")


def _field_heatmap(spec: FigureSpec, ax) -> None:
    _, L, values = read_grid(spec.inputs[0])
    im = ax.imshow(values.T, origin="lower", extent=(0, L, 0, L),
                   cmap="viridis", interpolation="nearest")
    ax.figure.colorbar(im, ax=ax)
    _target_circle(spec, ax, L)
    ax.set_xlabel("x")
    ax.set_ylabel("y")


def _vector_field(spec: FigureSpec, ax) -> None:
    n, L, values = read_grid(spec.inputs[0])
    h = L / n
    gx = (np.roll(values, -1, axis=0) - np.roll(values, 1, axis=0)) / (2 * h)
    gy = (np.roll(values, -1, axis=1) - np.roll(values, 1, axis=1)) / (2 * h)
    k = max(1, spec.quiver_step)
    ax_pts = np.arange(n) * h
    xs, ys = np.meshgrid(ax_pts[::k], ax_pts[::k], indexing="ij")
    ax.quiver(xs, ys, gx[::k, ::k], gy[::k, ::k], color="#1f77b4", width=0.003)
    _target_circle(spec, ax, L)
    ax.set_xlim(0, L)
    ax.set_ylim(0, L)
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")


def _target_circle(spec: FigureSpec, ax, L: float) -> None:
    circle = plt.Circle((L / 2, L / 2), spec.target_radius, fill=False,
                        color="#d62728", lw=1.2)
    ax.add_patch(circle)


def _success_fraction(spec: FigureSpec, ax) -> None:
    cols = read_csv_table(spec.inputs[0], required=("shear_rate", "fraction"))
    m = _finite_rows(cols, "shear_rate", "fraction")
    x, y = cols["shear_rate"][m], cols["fraction"][m]
    ax.plot(x, y, "o-", ms=4, lw=1, color="#2ca02c")
    if spec.log_x:
        ax.set_xscale("symlog" if (x == 0).any() else "log")
    ax.set_ylim(0, 1)
    ax.set_xlabel("shear rate (1/s)")
    ax.set_ylabel("success fraction")


def _convergence(spec: FigureSpec, ax) -> None:
    cols = read_csv_table(spec.inputs[0],
                          required=("A", "mean", "stderr", "reference"))
    m = _finite_rows(cols, "A", "mean", "stderr")
    x, y, s = cols["A"][m], cols["mean"][m], cols["stderr"][m]
    ax.errorbar(x, y, yerr=3 * s, fmt="o-", ms=4, lw=1, capsize=2,
                color="#1f77b4", label="2D ensemble")
    ax.plot(x, cols["reference"][m], "--", color="#d62728", lw=1.2,
            label="1D reference")
    if spec.log_x and (x > 0).all():
        ax.set_xscale("log")
    ax.legend()
    ax.set_xlabel("shear amplitude A")
    ax.set_ylabel("expected hitting time")


_BUILDERS = {
    "sweep_curve": _sweep_curve,
    "field_heatmap": _field_heatmap,
    "vector_field": _vector_field,
    "success_fraction": _success_fraction,
    "convergence": _convergence,
}


def build_figure(spec: FigureSpec):
    """Build the matplotlib Figure for a spec (not yet written to disk)."""
    with matplotlib.rc_context(STYLE):
        fig, ax = plt.subplots()
        _BUILDERS[spec.kind](spec, ax)
        if spec.title:
            ax.set_title(spec.title)
        fig.tight_layout()
    return fig


def render(spec: FigureSpec, out_path: str | Path) -> Path:
    """Render a spec to SVG (default) or PNG, deterministically."""
    out_path = Path(out_path)
    fig = build_figure(spec)
    try:
        with matplotlib.rc_context(STYLE):
            fig.savefig(out_path, format=out_path.suffix.lstrip(".") or "svg",
                        metadata={"Date": None})
    finally:
        plt.close(fig)
    return out_path
