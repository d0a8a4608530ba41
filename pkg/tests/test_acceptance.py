"""Acceptance criteria, one test per criterion, one printed line per check.

Monte Carlo protocols are pinned (seeds chosen before the runs; no
re-rolling): the optimal-shear sweep uses master_seed=1 and its chi=0
baseline master_seed=2; other criteria use the seeds written below.
Zero-shear chi=0 ensembles use t_max=60000 so timeouts stay under 1%
(the default 10x closed-form budget leaves a ~5% exponential tail there).
"""

import math
from dataclasses import replace

import numpy as np
import pytest

from shearchem import (DEFAULT_SHEAR_RATES_PER_S, EffectiveDrift1D,
                       NoiseStream, Point2, Profile1D, SweepSpec,
                       VelocitySampler, build_target_density, cutoff_phi,
                       expected_hitting_time_ode, find_optimal_shear,
                       hitting_time_1d_closed_form, homogenization_norms,
                       line_starts, remainder, run_ensemble,
                       run_ensemble_1d, run_trajectory, shear_velocity,
                       solve_chemical, success_fraction_line, sweep,
                       theorem1_convergence_study,
                       theorem3_convergence_study, validate_params, x_average)

pytestmark = pytest.mark.acceptance


def _check(label: str, desc: str, ok: bool, detail: str = ""):
    print(f"ACCEPTANCE {label} {'PASS' if ok else 'FAIL'}: {desc}"
          f"{' [' + detail + ']' if detail else ''}", flush=True)
    return ok


def test_criterion_1_closed_form_oracles():
    p50 = validate_params({"L": 50})
    p80 = validate_params({"L": 80})
    ok1 = hitting_time_1d_closed_form(0.0, p50) == 2304.0
    ok2 = hitting_time_1d_closed_form(0.0, p80) == 6084.0
    zero = EffectiveDrift1D(Profile1D(np.zeros(256), 50.0 / 256), 0.0, 5.0)
    t_ode = expected_hitting_time_ode(zero, p50, 24.0, n_nodes=256)
    ok3 = abs(t_ode - 2304.0) <= 1e-3 * 2304.0
    ok = _check("1", "closed-form values and zero-drift ODE within 0.1%",
                ok1 and ok2 and ok3, f"T_ODE={t_ode:.6f}")
    assert ok


def test_criterion_2_1d_monte_carlo_vs_closed_form():
    p = validate_params({"L": 50})
    zero = EffectiveDrift1D(Profile1D(np.zeros(p.grid_n), p.h), 0.0, p.v_max)
    st = run_ensemble_1d(zero, p, 0.0, 1000, 202)
    gap = abs(st.mean - 2304.0)
    ok = _check("2", "1D Monte Carlo within 3 stderr of 2304",
                gap <= 3 * st.stderr,
                f"mean={st.mean:.1f} stderr={st.stderr:.1f} gap={gap:.1f}")
    assert ok


def test_criterion_3_chi0_large_shear_limit():
    p = validate_params({"L": 50, "t_max": 60000})
    a_values = [r * 4 * 50 for r in (0.0, 0.025, 0.25, 2.5, 25.0)]
    rows = theorem1_convergence_study(p, a_values, n_runs=200, master_seed=303)
    for r in rows:
        print(f"  A={r['A']:7.0f} mean={r['mean']:8.1f} "
              f"se={r['stderr']:6.1f} timeouts={r['n_timeouts']}", flush=True)
    mono = all(
        rows[i + 1]["mean"] <= rows[i]["mean"]
        + 2 * math.hypot(rows[i]["stderr"], rows[i + 1]["stderr"])
        for i in range(len(rows) - 1))
    last = rows[-1]
    gap_ok = abs(last["gap"]) <= max(3 * last["stderr"], 0.02 * 2304.0)
    ok = _check("3", "means non-increasing and final gap to 2304 closes",
                mono and gap_ok,
                f"final mean={last['mean']:.1f} gap={last['gap']:+.1f} "
                f"3se={3 * last['stderr']:.1f}")
    assert ok


def test_criterion_4_optimal_shear_phenomenon():
    base = validate_params({"L": 50, "chi": 500, "v_max": 5})
    spec = SweepSpec(base=base, axis="shear_rate",
                     values=tuple(DEFAULT_SHEAR_RATES_PER_S),
                     n_runs=200, master_seed=1)
    result = sweep(spec)
    for row in result.rows:
        print(f"  rate={row.value:10.6f}/s mean={row.stats.mean:8.1f} "
              f"se={row.stats.stderr:6.1f}", flush=True)
    baseline = run_ensemble(validate_params({"L": 50, "t_max": 60000}),
                            200, 2)
    zero_row = result.rows[0]
    best = find_optimal_shear(result)
    print(f"  chi=0 zero-shear baseline mean={baseline.mean:.1f}", flush=True)
    print(f"  argmin rate={best.value:.6g}/s mean={best.mean:.1f} "
          f"plateau={[f'{v:.4g}' for v in best.plateau]}", flush=True)
    ok_a = _check("4a", "chemotaxis halves the zero-shear mean",
                  zero_row.stats.mean < 0.5 * baseline.mean,
                  f"{zero_row.stats.mean:.1f} vs 0.5*{baseline.mean:.1f}")
    ok_b = _check("4b", "argmin mean beats the 1D limit 2304",
                  best.mean < 2304.0, f"argmin mean={best.mean:.1f}")
    ok_c = _check("4c", "argmin shear rate in [0.005, 0.1] 1/s",
                  0.005 <= best.value <= 0.1, f"argmin rate={best.value:.6g}")
    assert ok_a and ok_b and ok_c


def test_criterion_5_deterministic_line_sample():
    p = validate_params({"L": 50, "chi": 500, "v_max": 5})
    n_agents = line_starts(p, 0.01).shape[0]
    ok_count = _check("5-count", "exactly 2501 line-sample agents",
                      n_agents == 2501, f"n={n_agents}")
    fracs = {}
    for rate in (0.0, 0.05, 25.0):
        fracs[rate] = success_fraction_line(p.with_shear_rate_per_s(rate),
                                            0.01, 2000.0)
        print(f"  rate={rate:8.4f}/s fraction={fracs[rate]:.4f}", flush=True)
    ok_peak = _check(
        "5-peak", "fraction at 0.05/s beats zero and the largest rate",
        fracs[0.05] > fracs[0.0] and fracs[0.05] > fracs[25.0],
        f"f(0)={fracs[0.0]:.4f} f(0.05)={fracs[0.05]:.4f} "
        f"f(25)={fracs[25.0]:.4f}")
    assert ok_count and ok_peak


def test_criterion_6_homogenization_diagnostics():
    p = validate_params({"L": 80, "grid_n": 256})
    n = build_target_density(p)
    sups = []
    masses = []
    for a in (100.0, 200.0, 400.0, 800.0):
        c = solve_chemical(n, replace(p, A=a))
        sups.append(homogenization_norms(c)[0])
        masses.append(abs(c.integral() - 1.0))
        print(f"  A={a:5.0f} sup|c_rem|={sups[-1]:.3e} "
              f"|mass-1|={masses[-1]:.2e}", flush=True)
    slope = np.polyfit(np.log([100, 200, 400, 800]), np.log(sups), 1)[0]
    print(f"  log-log decay slope of sup|c_rem|: {slope:.3f}", flush=True)
    decreasing = all(b < a for a, b in zip(sups, sups[1:]))
    mass_ok = all(m <= 1e-7 for m in masses)
    ok = _check("6", "sup|c_rem| strictly decreasing, mass identity to 1e-7",
                decreasing and mass_ok, f"slope={slope:.3f}")
    assert ok


def test_criterion_7_property_suite():
    p = validate_params({"L": 20, "grid_n": 64, "chi": 500, "v_max": 5})
    c = solve_chemical(build_target_density(p), p)
    s = VelocitySampler(p, c)
    rng = np.random.default_rng(7)
    worst = 0.0
    for x, y in rng.uniform(0, p.L, size=(10_000, 2)):
        vx, vy = s.drift(Point2(x, y))
        worst = max(worst, math.hypot(vx - shear_velocity(y, p), vy))
    ok_speed = _check("7-speed", "chemotactic speed <= v_max + 1e-12 "
                      "on 10^4 random points", worst <= p.v_max + 1e-12,
                      f"max={worst:.12f}")

    small = validate_params({"L": 16, "t_max": 1000})
    ok_workers = _check(
        "7-workers", "ensemble bitwise identical for 1 vs 2 workers",
        run_ensemble(small, 48, 11, workers=1)
        == run_ensemble(small, 48, 11, workers=2))

    one = run_trajectory(small, VelocitySampler(small), NoiseStream(13, 5))
    two = run_trajectory(small, VelocitySampler(small), NoiseStream(13, 5))
    ok_seed = _check("7-seed", "trajectory replay is bitwise identical",
                     one == two)

    f = c
    rebuilt = remainder(f).values + x_average(f).values[None, :]
    ok_decomp = _check(
        "7-decomp", "x-average + remainder reconstructs the field",
        np.abs(rebuilt - f.values).max() <= 1e-14 * np.abs(f.values).max())

    r = np.linspace(0, 15, 2001)
    phi = np.array([cutoff_phi(x, 5.0) for x in r])
    ok_phi = _check(
        "7-phi", "cutoff is monotone, bounded, identity-then-saturated",
        bool((np.diff(phi) >= -1e-15).all() and (phi <= 5.0).all()
             and phi[0] == 0.0 and phi[-1] == 5.0
             and np.abs(phi[r <= 4.5] - r[r <= 4.5]).max() == 0.0))

    spread = []
    for d in (0.7, 2.1):
        gp = np.array(s.chem_gradient(Point2(p.L / 2 + d, p.L / 2)))
        gm = np.array(s.chem_gradient(Point2(p.L / 2 - d, p.L / 2)))
        spread.append(abs(gp[0] + gm[0]) + abs(gp[1] - gm[1]))
    ok_sym = _check("7-symmetry", "zero-shear gradient mirror symmetry",
                    max(spread) <= 1e-6)
    assert all((ok_speed, ok_workers, ok_seed, ok_decomp, ok_phi, ok_sym))


def test_criterion_8_chemotaxis_large_shear_limit():
    p = validate_params({"L": 50, "chi": 500, "v_max": 5,
                         "shear_rate": 25.0})
    rows = theorem3_convergence_study(p, [p.A], n_runs=200, master_seed=808)
    r = rows[0]
    tol = max(3 * r["stderr"], 0.05 * r["reference"])
    ok = _check("8", "2D mean at 25/s within max(3se, 5%) of the 1D ODE "
                "reference",
                abs(r["gap"]) <= tol,
                f"mean={r['mean']:.1f} T_ODE={r['reference']:.1f} "
                f"gap={r['gap']:+.1f} tol={tol:.1f}")
    assert ok
