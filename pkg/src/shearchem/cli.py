"""Command-line interface.

Subcommands: simulate, sweep, field, effective1d, deterministic,
converge-t1, converge-t3. Shear rates on the CLI are in 1/s (figure axis
units); lengths and times in internal units (target radii, 4 s). Exit
codes: 0 ok, 2 config error, 3 solver failure, 4 all trajectories timed out.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .dynamics import run_trajectory
from .effective1d import (effective_drift, expected_hitting_time_ode,
                          hitting_time_1d_closed_form, run_ensemble_1d,
                          solve_avg_chemical_1d)
from .ensemble import (configure_workers, line_starts, make_sampler,
                       run_ensemble, success_fraction_line)
from .errors import AllTimedOut, ConfigError, InsufficientRows, SolverDiverged
from .field import (build_target_density, solve_chemical, write_field_csv,
                    write_grid, x_average)
from .params import TIME_UNIT_S, load_config, validate_params
from .rng import NoiseStream, derive_seed
from .sweep import (DEFAULT_SHEAR_RATES_PER_S, SweepResult, SweepRow,
                    SweepSpec, csv_header, emit_csv, find_optimal_shear,
                    sweep, theorem1_convergence_study,
                    theorem3_convergence_study)

_PARAM_FLAGS = ("L", "A", "shear_rate", "nu", "chi", "v_max", "delta",
                "shear_cutoff", "dt", "t_max", "grid_n", "start_x", "start_y")


def _add_param_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value config file")
    for name in _PARAM_FLAGS:
        p.add_argument(f"--{name.replace('_', '-')}", type=float, default=None,
                       dest=name)
    p.add_argument("--no-substep", action="store_true",
                   help="disable substepping of fast drift steps")
    p.add_argument("--force-grid", action="store_true",
                   help="waive the h <= delta/2 resolution requirement")
    p.add_argument("--workers", type=int, default=None,
                   help="trajectory worker count (env SHEARCHEM_WORKERS)")


def _params_from_args(args) -> "SimParams":
    raw = load_config(args.config) if args.config else {}
    for name in _PARAM_FLAGS:
        val = getattr(args, name)
        if val is not None:
            raw[name] = val
    if args.no_substep:
        raw["substep"] = False
    if "grid_n" in raw:
        raw["grid_n"] = int(raw["grid_n"])
    params = validate_params(raw, force_grid=args.force_grid)
    configure_workers(args.workers)
    return params


def _print_params(params) -> None:
    for line in csv_header(params).splitlines():
        print(f"# {line}")


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def cmd_simulate(args) -> int:
    params = _params_from_args(args)
    _print_params(params)
    sampler = make_sampler(params)
    if args.dump_trajectory:
        _, path = run_trajectory(params, sampler,
                                 NoiseStream(args.seed, 0), record_path=True)
        np.savetxt(args.dump_trajectory, path, delimiter=",",
                   header="t,x,y", comments="")
        print(f"trajectory written to {args.dump_trajectory}")
    stats = run_ensemble(params, args.n_runs, args.seed, sampler=sampler)
    print(f"n_runs={stats.n_runs} n_hits={stats.n_hits} "
          f"n_timeouts={stats.n_timeouts}")
    print(f"mean={stats.mean:.6g} std={stats.std:.6g} stderr={stats.stderr:.6g}"
          f" (internal time units; x{TIME_UNIT_S:g} for seconds)")
    if args.out:
        spec = SweepSpec(base=params, axis="shear_rate",
                         values=(params.shear_rate_per_s,),
                         n_runs=args.n_runs, master_seed=args.seed)
        res = SweepResult(spec=spec, rows=[SweepRow(
            value=params.shear_rate_per_s, params=params, stats=stats)])
        emit_csv(res, args.out)
        print(f"csv written to {args.out}")
    return 0


def cmd_sweep(args) -> int:
    params = _params_from_args(args)
    _print_params(params)
    values = _floats(args.values) if args.values else (
        DEFAULT_SHEAR_RATES_PER_S if args.axis == "shear_rate" else None)
    if values is None:
        raise ConfigError(["values: required for axis " + args.axis])
    spec = SweepSpec(base=params, axis=args.axis, values=tuple(values),
                     n_runs=args.n_runs, master_seed=args.seed)
    result = sweep(spec, csv_path=args.out,
                   progress=lambda row: print(
                       f"{args.axis}={row.value:.6g} -> " +
                       (f"mean={row.stats.mean:.6g}" if row.stats else
                        f"FAILED ({row.error})")))
    if args.out:
        print(f"csv written to {args.out}")
    try:
        best = find_optimal_shear(result)
        print(f"argmin {args.axis}={best.value:.6g} mean={best.mean:.6g} "
              f"ci={best.ci:.3g} plateau={[f'{v:.4g}' for v in best.plateau]}")
    except InsufficientRows as exc:
        print(f"no argmin summary: {exc}")
    return 0


def cmd_field(args) -> int:
    params = _params_from_args(args)
    _print_params(params)
    n = build_target_density(params)
    c = solve_chemical(n, params)
    fld = n if args.what == "n" else c
    if args.out_grid:
        write_grid(fld, args.out_grid)
        with open(args.out_grid + ".meta", "w") as fh:
            for line in csv_header(params).splitlines():
                fh.write(f"# {line}\n")
        print(f"grid written to {args.out_grid}")
    if args.out_csv:
        write_field_csv(fld, args.out_csv, header=csv_header(params))
        print(f"csv written to {args.out_csv}")
    print(f"mass(n)={n.integral():.9f} mass(c)={c.integral():.9f}")
    return 0


def cmd_effective1d(args) -> int:
    params = _params_from_args(args)
    _print_params(params)
    n = build_target_density(params)
    drift = effective_drift(solve_avg_chemical_1d(x_average(n)),
                            params.chi, params.v_max)
    half = params.L / 2.0 - params.delta
    s_vals = np.linspace(-0.8 * half, 0.8 * half, args.points)
    rows = []
    for i, s in enumerate(s_vals):
        y_torus = s % params.L
        z = s + half
        t_mc = run_ensemble_1d(drift, params, y_torus, args.n_runs,
                               derive_seed(args.seed, i))
        rows.append({
            "y0_shifted": float(s),
            "t_closed_form": hitting_time_1d_closed_form(float(s), params),
            "t_ode": expected_hitting_time_ode(drift, params, float(z)),
            "t_mc": t_mc.mean,
            "stderr": t_mc.stderr,
        })
        print(f"y0={s:+.4g} closed={rows[-1]['t_closed_form']:.6g} "
              f"ode={rows[-1]['t_ode']:.6g} mc={rows[-1]['t_mc']:.6g}"
              f"+-{rows[-1]['stderr']:.3g}")
    if args.out:
        emit_csv(rows, args.out)
        print(f"csv written to {args.out}")
    return 0


def cmd_deterministic(args) -> int:
    params = _params_from_args(args)
    _print_params(params)
    rates = _floats(args.rates)
    n_agents = line_starts(params, args.spacing).shape[0]
    print(f"{n_agents} agents on x=0, y in [0, {params.L / 2:g}], "
          f"spacing {args.spacing:g}")
    rows = []
    for rate in rates:
        rp = params.with_shear_rate_per_s(rate)
        frac = success_fraction_line(rp, args.spacing, args.sample_t_max)
        rows.append({"shear_rate": rate, "A": rp.A, "fraction": frac,
                     "n_agents": n_agents})
        print(f"shear_rate={rate:.6g}/s -> fraction={frac:.4f}")
    if args.out:
        emit_csv(rows, args.out)
        print(f"csv written to {args.out}")
    return 0


def _convergence(args, study) -> int:
    params = _params_from_args(args)
    _print_params(params)
    if not args.rates and not args.A_values:
        raise ConfigError(["rates / A_values: one of them is required"])
    a_values = ([r * TIME_UNIT_S * params.L for r in _floats(args.rates)]
                if args.rates else _floats(args.A_values))
    rows = study(params, a_values, args.n_runs, args.seed)
    for r in rows:
        print(f"A={r['A']:.6g} mean={r['mean']:.6g}+-{r['stderr']:.3g} "
              f"ref={r['reference']:.6g} gap={r['gap']:+.6g}")
    if args.out:
        emit_csv(rows, args.out)
        print(f"csv written to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="shearchem", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="one Monte Carlo ensemble")
    _add_param_args(p)
    p.add_argument("--n-runs", type=int, default=1000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", help="write a one-row sweep-schema CSV")
    p.add_argument("--dump-trajectory", help="write (t,x,y) of trajectory 0")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="hitting-time sweep along one axis")
    _add_param_args(p)
    p.add_argument("--axis", choices=("shear_rate", "chi", "v_max", "L"),
                   default="shear_rate")
    p.add_argument("--values", help="comma list (shear_rate in 1/s); "
                                    "default: log grid for shear_rate")
    p.add_argument("--n-runs", type=int, default=200)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", help="CSV path (rows appended as computed)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("field", help="solve and export the chemical field")
    _add_param_args(p)
    p.add_argument("--what", choices=("c", "n"), default="c")
    p.add_argument("--out-grid", help="binary grid path")
    p.add_argument("--out-csv", help="CSV (x,y,value) path")
    p.set_defaults(func=cmd_field)

    p = sub.add_parser("effective1d", help="1D closed form vs ODE vs Monte Carlo")
    _add_param_args(p)
    p.add_argument("--points", type=int, default=5)
    p.add_argument("--n-runs", type=int, default=1000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_effective1d)

    p = sub.add_parser("deterministic",
                       help="line-sample success fraction, drift only")
    _add_param_args(p)
    p.add_argument("--rates", required=True, help="comma list of shear rates, 1/s")
    p.add_argument("--spacing", type=float, default=0.01)
    p.add_argument("--sample-t-max", type=float, default=2000.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_deterministic)

    for name, study in (("converge-t1", theorem1_convergence_study),
                        ("converge-t3", theorem3_convergence_study)):
        p = sub.add_parser(name, help=f"{name} convergence table")
        _add_param_args(p)
        p.add_argument("--rates", help="comma list of shear rates, 1/s")
        p.add_argument("--A-values", dest="A_values",
                       help="comma list of A, internal units")
        p.add_argument("--n-runs", type=int, default=200)
        p.add_argument("--seed", type=int, default=1)
        p.add_argument("--out")
        p.set_defaults(func=lambda a, s=study: _convergence(a, s))

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SolverDiverged as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3
    except AllTimedOut as exc:
        print(f"all timed out: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
