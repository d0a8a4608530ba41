import numpy as np
import pytest
from scipy.integrate import cumulative_trapezoid

from shearchem import (DomainError, EffectiveDrift1D, NoiseStream, Profile1D,
                       build_target_density, domain_from_torus, effective_drift,
                       expected_hitting_time_ode, expected_hitting_time_profile,
                       hitting_time_1d_closed_form, run_1d_sde, run_ensemble_1d,
                       shifted_from_torus, solve_avg_chemical_1d, solve_chemical,
                       validate_params, x_average)


@pytest.fixture(scope="module")
def p50():
    return validate_params({"L": 50, "chi": 500, "v_max": 5})


@pytest.fixture(scope="module")
def drift50(p50):
    n = build_target_density(p50)
    return effective_drift(solve_avg_chemical_1d(x_average(n)),
                           p50.chi, p50.v_max)


def _zero_drift(params):
    prof = Profile1D(np.zeros(params.grid_n), params.h)
    return EffectiveDrift1D(prof, 0.0, params.v_max)


def _naive_integration_factor(drift, params, n_nodes):
    """Literal double-integral arrangement (unstable for strong drift)."""
    from shearchem.effective1d import _domain_drift
    z, v = _domain_drift(drift, params, n_nodes)
    e = cumulative_trapezoid(2.0 * v / params.nu, z, initial=0.0)
    inner = cumulative_trapezoid(np.exp(e), z, initial=0.0)
    jj = cumulative_trapezoid(inner * np.exp(-e), z, initial=0.0)
    kk = cumulative_trapezoid(np.exp(-e), z, initial=0.0)
    c1 = (2.0 / params.nu) * jj[-1] / kk[-1]
    return z, -(2.0 / params.nu) * jj + c1 * kk


class TestClosedForm:
    def test_paper_values(self):
        assert hitting_time_1d_closed_form(0.0, validate_params({"L": 50})) == 2304.0
        assert hitting_time_1d_closed_form(0.0, validate_params({"L": 80})) == 6084.0

    def test_boundary_and_domain(self, p50):
        assert hitting_time_1d_closed_form(24.0, p50) == 0.0
        assert hitting_time_1d_closed_form(-24.0, p50) == 0.0
        with pytest.raises(DomainError):
            hitting_time_1d_closed_form(24.5, p50)


class TestAvgChemical:
    def test_constant_profile(self):
        prof = Profile1D(np.full(64, 0.3), 0.25)
        c = solve_avg_chemical_1d(prof)
        assert np.allclose(c.values, 0.3, rtol=1e-12)

    def test_mass_identity(self, p50):
        navg = x_average(build_target_density(p50))
        c = solve_avg_chemical_1d(navg)
        assert abs((c.values.sum() - navg.values.sum()) * navg.h) <= 1e-9

    def test_even_about_center(self, p50):
        c = solve_avg_chemical_1d(x_average(build_target_density(p50)))
        v = c.values
        mirrored = np.roll(v[::-1], 1)   # y -> L - y on the grid
        assert np.abs(v - mirrored).max() <= 1e-10 * np.abs(v).max()

    @pytest.mark.parametrize("A", [0.0, 800.0])
    def test_matches_x_average_of_2d_solve(self, p50, A):
        # discrete identity: x-averaging the 2D solve satisfies the same
        # periodic tridiagonal system, for every shear amplitude
        from dataclasses import replace
        p = replace(p50, A=A)
        n = build_target_density(p)
        c2d = solve_chemical(n, p)
        c1d = solve_avg_chemical_1d(x_average(n))
        assert np.abs(x_average(c2d).values - c1d.values).max() <= 1e-12


class TestEffectiveDrift:
    def test_zero_cases(self, p50):
        const = Profile1D(np.full(p50.grid_n, 2.0), p50.h)
        assert np.abs(effective_drift(const, 500.0, 5.0).profile.values).max() == 0
        navg = solve_avg_chemical_1d(x_average(build_target_density(p50)))
        assert np.abs(effective_drift(navg, 0.0, 5.0).profile.values).max() == 0

    def test_points_toward_target(self, p50, drift50):
        v = drift50.profile.values
        ax = drift50.profile.axis()
        below = (ax > p50.L / 2 - 6) & (ax < p50.L / 2 - 1)
        above = (ax > p50.L / 2 + 1) & (ax < p50.L / 2 + 6)
        assert (v[below] > 0).all()
        assert (v[above] < 0).all()

    def test_speed_bound(self, drift50, p50):
        assert np.abs(drift50.profile.values).max() <= p50.v_max


class TestHittingTimeOde:
    def test_zero_drift_reproduces_closed_form(self, p50):
        z, t = expected_hitting_time_profile(_zero_drift(p50), p50, n_nodes=256)
        ll = p50.L - 2 * p50.delta
        exact = z * (ll - z) / p50.nu
        assert np.abs(t - exact).max() <= 1e-3 * exact.max()
        # and at the antipodal start in particular
        mid = expected_hitting_time_ode(_zero_drift(p50), p50, 24.0, n_nodes=256)
        assert mid == pytest.approx(2304.0, rel=1e-3)

    def test_absorbing_boundary_limit(self, p50):
        t = expected_hitting_time_ode(_zero_drift(p50), p50, 1e-6)
        assert 0 <= t < 0.01

    def test_domain_error(self, p50, drift50):
        for bad in (-1.0, 0.0, 48.0, 55.0):
            with pytest.raises(DomainError):
                expected_hitting_time_ode(drift50, p50, bad)

    def test_symmetry(self, p50, drift50):
        ll = p50.L - 2 * p50.delta
        for z in (5.0, 12.0, 20.0):
            a = expected_hitting_time_ode(drift50, p50, z)
            b = expected_hitting_time_ode(drift50, p50, ll - z)
            assert a == pytest.approx(b, rel=1e-6)

    def test_inward_drift_beats_pure_diffusion(self, p50, drift50):
        t = expected_hitting_time_ode(drift50, p50, 24.0)
        assert t < hitting_time_1d_closed_form(0.0, p50)

    def test_stable_form_equals_naive_formula_at_weak_drift(self, p50, drift50):
        weak = EffectiveDrift1D(
            Profile1D(1e-3 * drift50.profile.values, drift50.profile.h),
            drift50.chi, drift50.v_max)
        z, t_stable = expected_hitting_time_profile(weak, p50, n_nodes=512)
        z2, t_naive = _naive_integration_factor(weak, p50, 512)
        assert np.abs(t_stable - t_naive).max() <= 1e-8 * t_naive.max()

    def test_quadrature_second_order(self, p50):
        # analytic drift sampled at each resolution; error falls ~4x per doubling
        def drift_at(n_side):
            ax = np.arange(n_side) * (p50.L / n_side)
            vals = 0.8 * np.sin(2 * np.pi * ax / p50.L)
            return EffectiveDrift1D(Profile1D(vals, p50.L / n_side), 1.0, 5.0)

        ref = expected_hitting_time_ode(drift_at(16384), p50, 24.0, n_nodes=16384)
        errs = [abs(expected_hitting_time_ode(drift_at(n), p50, 24.0, n_nodes=n)
                    - ref) for n in (128, 256, 512)]
        assert errs[0] / errs[1] >= 3.5
        assert errs[1] / errs[2] >= 3.5


class TestRun1dSde:
    def test_start_in_band_hits_immediately(self, p50, drift50):
        res = run_1d_sde(drift50, p50, 25.5, NoiseStream(1, 0))
        assert res.hit and res.time == 0.0

    def test_zero_drift_matches_closed_form(self, p50):
        st = run_ensemble_1d(_zero_drift(p50), p50, 0.0, 600, 31)
        assert abs(st.mean - 2304.0) <= 3 * st.stderr

    def test_chemotaxis_drift_matches_ode(self, p50, drift50):
        st = run_ensemble_1d(drift50, p50, 0.0, 600, 32)
        ref = expected_hitting_time_ode(drift50, p50, 24.0)
        assert abs(st.mean - ref) <= 3 * st.stderr


@pytest.mark.slow
def test_three_sigma_coverage_over_repeated_seeds(p50):
    # calibration: the ensemble mean lands within 3 stderr of the analytic
    # value in at least 19 of 20 independent-seed trials at n_runs = 200
    zero = _zero_drift(p50)
    hits = 0
    for seed in range(20):
        st = run_ensemble_1d(zero, p50, 0.0, 200, 5000 + seed)
        if abs(st.mean - 2304.0) <= 3 * st.stderr:
            hits += 1
    assert hits >= 19


@pytest.mark.slow
def test_ode_mc_agreement_on_y0_grid(p50, drift50):
    # spec invariant: agreement across a 5-point y0 grid for chi=0 and chi=500
    half = p50.L / 2 - p50.delta
    shifts = np.linspace(-0.8 * half, 0.8 * half, 5)
    for i, drift in enumerate((_zero_drift(p50), drift50)):
        for j, s in enumerate(shifts):
            y_torus = float(s % p50.L)
            z = s + half
            st = run_ensemble_1d(drift, p50, y_torus, 200, 1000 + 10 * i + j)
            ref = expected_hitting_time_ode(drift, p50, float(z))
            assert abs(st.mean - ref) <= 3 * max(st.stderr, 1e-9), (i, s)


def test_coordinate_frames(p50):
    assert domain_from_torus(0.0, p50) == pytest.approx(24.0)
    assert domain_from_torus(26.0, p50) == pytest.approx(0.0)
    assert shifted_from_torus(0.0, p50.L) == 0.0
    assert shifted_from_torus(49.0, p50.L) == pytest.approx(-1.0)
