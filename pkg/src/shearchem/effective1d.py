"""One-dimensional reference stack for the large-shear limit.

The torus with the absorbing band [L/2 - delta, L/2 + delta] is cut into
the interval [0, LL], LL = L - 2*delta, with absorbing endpoints. Three
coordinate frames appear:

* torus y in [0, L): simulation coordinate, target centered at L/2;
* domain z in [0, LL]: z = (y - (L/2 + delta)) mod L, absorbing at 0, LL;
* shifted s in [-L/2, L/2): s = 0 at the antipode, target edges at
  +/-(L/2 - delta); the closed-form hitting time lives here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from . import _kernels
from ._kernels import G_FLOOR
from .dynamics import HitResult, cutoff_phi
from .ensemble import _stats_from_batch, HittingTimeStats, configure_workers
from .errors import DomainError, SolverDiverged
from .field import Profile1D, solve_cyclic_tridiag
from .params import Point2, SimParams
from .rng import NoiseStream, U64, stream_key

#: exponent budget for the integration-factor weights; beyond this the
#: double integral is not representable in float64
_MAX_EXPONENT = 600.0


def domain_from_torus(y: float, params: SimParams) -> float:
    return (y - (params.L / 2.0 + params.delta)) % params.L


def torus_from_domain(z: float, params: SimParams) -> float:
    return (z + params.L / 2.0 + params.delta) % params.L


def shifted_from_torus(y: float, L: float) -> float:
    return (y + L / 2.0) % L - L / 2.0


def hitting_time_1d_closed_form(y0: float, params: SimParams) -> float:
    """Expected 1D Brownian hitting time, y0 in the shifted frame."""
    half = params.L / 2.0 - params.delta
    if abs(y0) > half:
        raise DomainError(f"|y0| = {abs(y0)} outside [-{half}, {half}]")
    return (half * half - y0 * y0) / params.nu


def solve_avg_chemical_1d(n_avg: Profile1D) -> Profile1D:
    """Solve -c'' + c = n on the circle (periodic second differences)."""
    h = n_avg.h
    n = n_avg.n_side
    diag = np.full(n, 2.0 / (h * h) + 1.0)
    off = -1.0 / (h * h)
    c = solve_cyclic_tridiag(diag, off, n_avg.values)
    lap = (np.roll(c, 1) + np.roll(c, -1) - 2.0 * c) / (h * h)
    resid = np.abs(-lap + c - n_avg.values).max()
    scale = max(np.abs(n_avg.values).max(), 1.0)
    if not resid <= 1e-10 * scale:
        raise SolverDiverged(f"1D profile solve residual {resid:.3e}", peclet=0.0)
    return Profile1D(c, h)


@dataclass(frozen=True)
class EffectiveDrift1D:
    """Vertical drift phi(chi |d<c>/dy|) sign(d<c>/dy) on the torus y-grid."""

    profile: Profile1D
    chi: float
    v_max: float


def effective_drift(c_avg: Profile1D, chi: float, v_max: float) -> EffectiveDrift1D:
    g = (np.roll(c_avg.values, -1) - np.roll(c_avg.values, 1)) / (2.0 * c_avg.h)
    v = np.zeros_like(g)
    for i, gi in enumerate(g):
        if abs(gi) > G_FLOOR and chi > 0.0 and v_max > 0.0:
            v[i] = math.copysign(cutoff_phi(chi * abs(gi), v_max), gi)
    return EffectiveDrift1D(Profile1D(v, c_avg.h), chi, v_max)


def _domain_drift(drift: EffectiveDrift1D, params: SimParams,
                  n_nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Sample the torus drift profile on a uniform grid over [0, LL]."""
    LL = params.L - 2.0 * params.delta
    z = np.linspace(0.0, LL, n_nodes + 1)
    y = (z + params.L / 2.0 + params.delta) % params.L
    prof = drift.profile
    xp = np.arange(prof.n_side + 1) * prof.h
    fp = np.append(prof.values, prof.values[0])
    return z, np.interp(y, xp, fp)


def expected_hitting_time_profile(drift: EffectiveDrift1D, params: SimParams,
                                  n_nodes: int | None = None
                                  ) -> tuple[np.ndarray, np.ndarray]:
    """Solve (nu/2) T'' + V T' = -1, T(0) = T(LL) = 0 on the cut domain.

    Integration-factor solution evaluated in its scale-function form: with
    E(z) = int_0^z 2V/nu, s'(z) = exp(-E) and m(z) = exp(E)/nu,

        T(y) = 2 [ u(y) int_y^LL (s(LL) - s) m + (1 - u(y)) int_0^y s m ],
        u(y) = s(y)/s(LL).

    Every integrand is nonnegative, so unlike the literal double-integral
    arrangement this evaluation has no catastrophic cancellation; E is
    shifted by its minimum before exponentiating (the formula is invariant).
    Composite trapezoid on the (resampled) profile grid throughout.
    """
    if n_nodes is None:
        n_nodes = drift.profile.n_side
    z, v = _domain_drift(drift, params, n_nodes)
    e = cumulative_trapezoid(2.0 * v / params.nu, z, initial=0.0)
    e -= e.min()
    if e.max() > _MAX_EXPONENT:
        raise ValueError(
            f"integration-factor exponent {e.max():.1f} exceeds float64 range; "
            "drift too strong for this domain")
    sprime = np.exp(-e)
    mdens = np.exp(e) / params.nu
    s = cumulative_trapezoid(sprime, z, initial=0.0)
    i_right = cumulative_trapezoid((s[-1] - s) * mdens, z, initial=0.0)
    i_left = cumulative_trapezoid(s * mdens, z, initial=0.0)
    u = s / s[-1]
    t = 2.0 * (u * (i_right[-1] - i_right) + (1.0 - u) * i_left)
    return z, t


def expected_hitting_time_ode(drift: EffectiveDrift1D, params: SimParams,
                              y0: float, n_nodes: int | None = None) -> float:
    """Expected hitting time of the effective 1D SDE, y0 in domain coordinates."""
    LL = params.L - 2.0 * params.delta
    if not 0.0 < y0 < LL:
        raise DomainError(f"y0 = {y0} outside (0, {LL})")
    z, t = expected_hitting_time_profile(drift, params, n_nodes)
    return float(np.interp(y0, z, t))


def run_1d_sde(drift: EffectiveDrift1D, params: SimParams, y0: float,
               rng: NoiseStream) -> HitResult:
    """Euler-Maruyama for dY = V_eff dt + sqrt(nu) dB, y0 in torus coordinates."""
    n_max = params.n_steps_max
    hit, steps, y = _kernels.run_single_1d(
        y0, np.uint64(rng.key), n_max, params.L, params.nu, params.delta,
        params.dt, drift.profile.values, drift.profile.h)
    return HitResult(hit=bool(hit), time=steps * params.dt, steps=int(steps),
                     final_pos=Point2(params.start.x, float(y)))


def run_ensemble_1d(drift: EffectiveDrift1D, params: SimParams, y0: float,
                    n_runs: int, master_seed: int,
                    workers: int | None = None) -> HittingTimeStats:
    """Ensemble of 1D trajectories from torus coordinate y0."""
    configure_workers(workers)
    keys = np.empty(n_runs, dtype=np.uint64)
    for i in range(n_runs):
        keys[i] = stream_key(U64(master_seed), U64(i))
    y0s = np.full(n_runs, float(y0))
    out_hit = np.zeros(n_runs, dtype=np.int64)
    out_steps = np.zeros(n_runs, dtype=np.int64)
    out_y = np.zeros(n_runs)
    _kernels.run_batch_1d(y0s, keys, params.n_steps_max, params.L, params.nu,
                          params.delta, params.dt, drift.profile.values,
                          drift.profile.h, out_hit, out_steps, out_y)
    return _stats_from_batch(out_hit, out_steps, params.dt, n_runs, master_seed)
