"""Drift composition and single-trajectory integration.

The drift is saturated shear plus flux-limited chemotaxis,
V = phi(chi |grad c|) grad c / |grad c|, and trajectories follow
Euler-Maruyama (or plain Euler when the noise is switched off).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .field import GridField
from .params import Point2, SimParams, wrap_point
from .rng import NoiseStream

_DUMMY_COEF = np.zeros((1, 1))


def cutoff_phi(r: float, v_max: float) -> float:
    """Flux-limit cutoff: identity up to 0.9*v_max, v_max from 1.1*v_max,
    C^2 monotone blend between."""
    return float(_kernels.phi_cut(r, v_max))


def chemotactic_velocity(grad: tuple[float, float], chi: float,
                         v_max: float) -> tuple[float, float]:
    """phi(chi |g|) g/|g|, extended by (0, 0) through the |g| -> 0 singularity."""
    vx, vy = _kernels.chemo_vel(grad[0], grad[1], chi, v_max)
    return float(vx), float(vy)


@dataclass(frozen=True)
class HitResult:
    hit: bool
    time: float
    steps: int
    final_pos: Point2


class VelocitySampler:
    """Total drift field for one parameter point; immutable and shareable.

    chem may be omitted only when chi == 0 (no chemotaxis).
    """

    def __init__(self, params: SimParams, chem: GridField | None = None):
        if params.chi > 0 and chem is None:
            raise ValueError("chi > 0 requires a solved chemical field")
        self.params = params
        self.chem = chem
        self.has_chem = chem is not None
        if chem is not None:
            self._coef = chem.spline_coef
            self._grid_n = chem.n_side
            self._h = chem.h
        else:
            self._coef = _DUMMY_COEF
            self._grid_n = 1
            self._h = 1.0

    def drift(self, p: Point2) -> tuple[float, float]:
        q = wrap_point(p, self.params.L)
        vx, vy = _kernels.drift_at(
            q.x, q.y, self.params.L, self.params.A, self.params.shear_cutoff,
            self.params.chi, self.params.v_max, self.has_chem,
            self._coef, self._grid_n, self._h)
        return float(vx), float(vy)

    def chem_gradient(self, p: Point2) -> tuple[float, float]:
        if not self.has_chem:
            return 0.0, 0.0
        q = wrap_point(p, self.params.L)
        gx, gy = _kernels.spline_gradient(self._coef, self._grid_n, self._h,
                                          q.x, q.y)
        return float(gx), float(gy)


def total_drift(p: Point2, sampler: VelocitySampler) -> tuple[float, float]:
    return sampler.drift(p)


def em_step(p: Point2, sampler: VelocitySampler, dt: float,
            noise: tuple[float, float]) -> Point2:
    """One plain Euler-Maruyama step (no substepping)."""
    vx, vy = sampler.drift(p)
    sq = np.sqrt(sampler.params.nu * dt)
    return wrap_point(Point2(p.x + vx * dt + sq * noise[0],
                             p.y + vy * dt + sq * noise[1]),
                      sampler.params.L)


def _run(params: SimParams, sampler: VelocitySampler, start: Point2,
         t_max: float, stream_key: int, stochastic: bool,
         record_path: bool):
    n_max = int(round(t_max / params.dt))
    if record_path:
        path_x = np.empty(n_max + 1)
        path_y = np.empty(n_max + 1)
    else:
        path_x = path_y = np.empty(1)
    hit, steps, x, y = _kernels.run_single(
        start[0], start[1], np.uint64(stream_key), n_max,
        params.L, params.A, params.nu if stochastic else 0.0,
        params.chi, params.v_max, params.shear_cutoff, params.delta,
        params.dt, params.substep, stochastic, sampler.has_chem,
        sampler._coef, sampler._grid_n, sampler._h,
        record_path, path_x, path_y)
    result = HitResult(hit=bool(hit), time=steps * params.dt, steps=int(steps),
                       final_pos=Point2(float(x), float(y)))
    if record_path:
        t = np.arange(steps + 1) * params.dt
        return result, np.column_stack([t, path_x[:steps + 1], path_y[:steps + 1]])
    return result


def run_trajectory(params: SimParams, sampler: VelocitySampler,
                   rng: NoiseStream, record_path: bool = False):
    """Integrate one stochastic trajectory until it hits the target or
    t_max elapses. Fully determined by (params, field, rng stream).

    With record_path=True also returns an (steps+1, 3) array of (t, x, y).
    """
    return _run(params, sampler, params.start, params.t_max, rng.key,
                stochastic=True, record_path=record_path)


def run_deterministic(params: SimParams, sampler: VelocitySampler,
                      start: Point2, t_max: float) -> HitResult:
    """Drift-only trajectory (no Brownian motion), same hit semantics."""
    return _run(params, sampler, start, t_max, 0, stochastic=False,
                record_path=False)
