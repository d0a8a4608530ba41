"""Parameter sweeps, optimal-shear search, and convergence studies.

CSV contract (consumed by plotkit): comment lines starting '#' carry the
resolved base parameters and version; then one header row

  swept_param_name,swept_param_value,A,shear_rate,L,chi,v_max,nu,dt,
  n_runs,n_hits,n_timeouts,mean,std,stderr,master_seed

and one data row per parameter point. shear_rate is in 1/s (figure axis
units, = A/L/4); A, chi, v_max, L and all times are internal units; values
are serialized with 17 significant digits. Rows of failed points carry nan
statistics. Files are written incrementally, one row per completed point.
"""

from __future__ import annotations

import math
import subprocess
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import __version__
from .dynamics import VelocitySampler
from .effective1d import (domain_from_torus, effective_drift,
                          expected_hitting_time_ode, hitting_time_1d_closed_form,
                          shifted_from_torus, solve_avg_chemical_1d)
from .ensemble import HittingTimeStats, run_ensemble
from .errors import AllTimedOut, InsufficientRows, SolverDiverged
from .field import build_target_density, solve_chemical, x_average
from .params import TIME_UNIT_S, SimParams, validate_params
from .rng import derive_seed

AXES = ("shear_rate", "chi", "v_max", "L")

CSV_COLUMNS = ("swept_param_name", "swept_param_value", "A", "shear_rate",
               "L", "chi", "v_max", "nu", "dt", "n_runs", "n_hits",
               "n_timeouts", "mean", "std", "stderr", "master_seed")

#: rows with more than this fraction of timeouts are unusable for argmin
TIMEOUT_BUDGET = 0.01

#: default shear-rate grid: 0 plus 13 log-spaced points over 1e-3..1e2 (4s)^-1,
#: reported in 1/s on the CLI axis
DEFAULT_SHEAR_RATES_PER_S = [0.0] + [
    10.0 ** (-3.0 + 5.0 * k / 12.0) / TIME_UNIT_S for k in range(13)]


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: base parameters, axis, ordered values, run budget.

    shear_rate values are in 1/s; chi, v_max, L are internal units.
    """

    base: SimParams
    axis: str
    values: tuple[float, ...]
    n_runs: int
    master_seed: int

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}, got {self.axis!r}")
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise ValueError("values must be non-empty")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError("values must be strictly increasing")
        object.__setattr__(self, "values", vals)

    def row_params(self, value: float) -> SimParams:
        if self.axis == "shear_rate":
            return self.base.with_shear_rate_per_s(value)
        if self.axis == "chi":
            return replace(self.base, chi=value)
        if self.axis == "v_max":
            return replace(self.base, v_max=value)
        # L changes the resolution and timeout defaults with it
        raw = self.base.resolved()
        for k in ("start_x", "start_y", "shear_rate_per_s"):
            raw.pop(k)
        raw.update(L=value, grid_n=0, t_max=0.0)
        return replace(validate_params(raw), start=self.base.start,
                       substep=self.base.substep)


@dataclass
class SweepRow:
    value: float
    params: SimParams
    stats: HittingTimeStats | None = None
    error: str = ""

    @property
    def usable(self) -> bool:
        return (self.stats is not None
                and self.stats.n_timeouts <= TIMEOUT_BUDGET * self.stats.n_runs)


@dataclass
class SweepResult:
    spec: SweepSpec
    rows: list[SweepRow] = field(default_factory=list)

    @property
    def usable_rows(self) -> list[SweepRow]:
        return [r for r in self.rows if r.usable]

    @property
    def argmin_row(self) -> SweepRow | None:
        usable = self.usable_rows
        if not usable:
            return None
        return min(usable, key=lambda r: r.stats.mean)

    @property
    def argmin_value(self) -> float:
        row = self.argmin_row
        return row.value if row is not None else math.nan

    @property
    def argmin_mean(self) -> float:
        row = self.argmin_row
        return row.stats.mean if row is not None else math.nan


def _git_describe() -> str:
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty"],
                             capture_output=True, text=True, timeout=5,
                             cwd=Path(__file__).parent)
        if out.returncode == 0:
            return out.stdout.strip()
    except OSError:
        pass
    return "unknown"


def csv_header(params: SimParams, extra: dict | None = None) -> str:
    lines = [f"shearchem {__version__} ({_git_describe()})"]
    for k, v in params.resolved().items():
        lines.append(f"{k} = {v!r}")
    for k, v in (extra or {}).items():
        lines.append(f"{k} = {v!r}")
    return "\n".join(lines)


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def format_row(spec: SweepSpec, row: SweepRow) -> str:
    p = row.params
    s = row.stats
    vals = {
        "swept_param_name": spec.axis,
        "swept_param_value": row.value,
        "A": p.A,
        "shear_rate": p.shear_rate_per_s,
        "L": p.L,
        "chi": p.chi,
        "v_max": p.v_max,
        "nu": p.nu,
        "dt": p.dt,
        "n_runs": spec.n_runs,
        "n_hits": s.n_hits if s else 0,
        "n_timeouts": s.n_timeouts if s else spec.n_runs,
        "mean": s.mean if s else math.nan,
        "std": s.std if s else math.nan,
        "stderr": s.stderr if s else math.nan,
        "master_seed": s.master_seed if s else derive_seed(spec.master_seed, 0),
    }
    return ",".join(_fmt(vals[c]) for c in CSV_COLUMNS)


def _open_csv(path, params: SimParams, extra: dict):
    fh = open(path, "w")
    for line in csv_header(params, extra).splitlines():
        fh.write(f"# {line}\n")
    fh.write(",".join(CSV_COLUMNS) + "\n")
    fh.flush()
    return fh


def sweep(spec: SweepSpec, csv_path: str | Path | None = None,
          progress=None) -> SweepResult:
    """Run the sweep, emitting CSV rows incrementally when csv_path is given.

    The chemical field is solved once and shared across rows for axes that
    do not change it (chi, v_max) and re-solved per row otherwise. A row
    that raises SolverDiverged or AllTimedOut is marked failed and the
    sweep continues.
    """
    result = SweepResult(spec=spec)
    fh = None
    if csv_path is not None:
        fh = _open_csv(csv_path, spec.base,
                       {"axis": spec.axis, "n_runs": spec.n_runs,
                        "master_seed": spec.master_seed})
    shared_field = None
    if spec.axis in ("chi", "v_max") and (spec.base.chi > 0
                                          or spec.axis == "chi"):
        shared_field = solve_chemical(build_target_density(spec.base), spec.base)
    try:
        for i, value in enumerate(spec.values):
            rp = spec.row_params(value)
            row = SweepRow(value=value, params=rp)
            try:
                if rp.chi > 0:
                    fld = shared_field if shared_field is not None else \
                        solve_chemical(build_target_density(rp), rp)
                    sampler = VelocitySampler(rp, fld)
                else:
                    sampler = VelocitySampler(rp)
                row.stats = run_ensemble(rp, spec.n_runs,
                                         derive_seed(spec.master_seed, i),
                                         sampler=sampler)
            except (SolverDiverged, AllTimedOut) as exc:
                row.error = str(exc)
            result.rows.append(row)
            if fh is not None:
                fh.write(format_row(spec, row) + "\n")
                fh.flush()
            if progress is not None:
                progress(row)
    finally:
        if fh is not None:
            fh.close()
    return result


@dataclass(frozen=True)
class OptimalShear:
    value: float
    mean: float
    ci: float                 # 2*stderr of the argmin row
    plateau: tuple[float, ...]  # values whose mean <= argmin_mean + 2*own stderr


def find_optimal_shear(result: SweepResult) -> OptimalShear:
    usable = result.usable_rows
    if len(usable) < 3:
        raise InsufficientRows(f"need >= 3 usable rows, have {len(usable)}")
    best = result.argmin_row
    plateau = tuple(r.value for r in usable
                    if r.stats.mean <= best.stats.mean + 2.0 * r.stats.stderr)
    return OptimalShear(value=best.value, mean=best.stats.mean,
                        ci=2.0 * best.stats.stderr, plateau=plateau)


def theorem1_convergence_study(params: SimParams, A_values, n_runs: int,
                               master_seed: int) -> list[dict]:
    """Per-A ensemble means against the closed-form 1D limit (chi = 0)."""
    if params.chi != 0:
        raise ValueError("theorem-1 study requires chi = 0")
    s0 = shifted_from_torus(params.start.y, params.L)
    t_1d = hitting_time_1d_closed_form(s0, params)
    rows = []
    for i, a in enumerate(A_values):
        rp = replace(params, A=float(a))
        st = run_ensemble(rp, n_runs, derive_seed(master_seed, i))
        rows.append({
            "A": rp.A, "shear_rate": rp.shear_rate_per_s,
            "mean": st.mean, "std": st.std, "stderr": st.stderr,
            "n_timeouts": st.n_timeouts, "reference": t_1d,
            "gap": st.mean - t_1d,
        })
    return rows


def theorem3_convergence_study(params: SimParams, A_values, n_runs: int,
                               master_seed: int) -> list[dict]:
    """Per-A ensemble means against the effective-1D ODE reference (chi > 0)."""
    if not params.chi > 0:
        raise ValueError("theorem-3 study requires chi > 0")
    n = build_target_density(params)
    drift = effective_drift(solve_avg_chemical_1d(x_average(n)),
                            params.chi, params.v_max)
    z0 = domain_from_torus(params.start.y, params)
    t_ode = expected_hitting_time_ode(drift, params, z0)
    rows = []
    for i, a in enumerate(A_values):
        rp = replace(params, A=float(a))
        st = run_ensemble(rp, n_runs, derive_seed(master_seed, i))
        rows.append({
            "A": rp.A, "shear_rate": rp.shear_rate_per_s,
            "mean": st.mean, "std": st.std, "stderr": st.stderr,
            "n_timeouts": st.n_timeouts, "reference": t_ode,
            "gap": st.mean - t_ode,
        })
    return rows


def emit_csv(result, path: str | Path) -> None:
    """Write a SweepResult (sweep schema) or a study table (its own columns)."""
    if isinstance(result, SweepResult):
        fh = _open_csv(path, result.spec.base,
                       {"axis": result.spec.axis, "n_runs": result.spec.n_runs,
                        "master_seed": result.spec.master_seed})
        try:
            for row in result.rows:
                fh.write(format_row(result.spec, row) + "\n")
        finally:
            fh.close()
        return
    rows = list(result)
    if not rows:
        raise ValueError("empty table")
    cols = list(rows[0].keys())
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for r in rows:
            fh.write(",".join(_fmt(r[c]) for c in cols) + "\n")
