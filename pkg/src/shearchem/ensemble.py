"""Monte Carlo ensembles and deterministic line-sample experiments."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numba
import numpy as np

from . import _kernels
from .dynamics import VelocitySampler
from .errors import AllTimedOut
from .field import build_target_density, solve_chemical
from .params import SimParams
from .rng import U64, stream_key

WORKERS_ENV = "SHEARCHEM_WORKERS"


def configure_workers(workers: int | None = None) -> None:
    """Set the trajectory worker count (defaults to SHEARCHEM_WORKERS, then
    all cores). Results are bitwise independent of this setting."""
    if workers is None:
        env = os.environ.get(WORKERS_ENV)
        if not env:
            return
        workers = int(env)
    numba.set_num_threads(min(max(1, workers), numba.config.NUMBA_NUM_THREADS))


@dataclass(frozen=True)
class HittingTimeStats:
    """Hitting-time statistics of one ensemble; mean/std over hits only."""

    n_runs: int
    n_hits: int
    n_timeouts: int
    mean: float
    std: float
    stderr: float
    master_seed: int


def make_sampler(params: SimParams) -> VelocitySampler:
    """Build the drift sampler, solving the chemical field when chi > 0."""
    if params.chi > 0:
        n = build_target_density(params)
        return VelocitySampler(params, solve_chemical(n, params))
    return VelocitySampler(params)


def _batch_keys(master_seed: int, n: int) -> np.ndarray:
    keys = np.empty(n, dtype=np.uint64)
    for i in range(n):
        keys[i] = stream_key(U64(master_seed), U64(i))
    return keys


def run_ensemble(params: SimParams, n_runs: int, master_seed: int,
                 sampler: VelocitySampler | None = None,
                 workers: int | None = None) -> HittingTimeStats:
    """n_runs independent trajectories from params.start.

    Trajectory i draws from the stream keyed by (master_seed, i), so the
    result is a pure function of (params, n_runs, master_seed) regardless
    of worker count. Timeouts are counted and excluded from the mean.
    """
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    configure_workers(workers)
    if sampler is None:
        sampler = make_sampler(params)
    n_max = params.n_steps_max
    xs = np.full(n_runs, params.start.x)
    ys = np.full(n_runs, params.start.y)
    keys = _batch_keys(master_seed, n_runs)
    out_hit = np.zeros(n_runs, dtype=np.int64)
    out_steps = np.zeros(n_runs, dtype=np.int64)
    out_x = np.zeros(n_runs)
    out_y = np.zeros(n_runs)
    _kernels.run_batch(xs, ys, keys, n_max, params.L, params.A, params.nu,
                       params.chi, params.v_max, params.shear_cutoff,
                       params.delta, params.dt, params.substep, True,
                       sampler.has_chem, sampler._coef, sampler._grid_n,
                       sampler._h, out_hit, out_steps, out_x, out_y)
    return _stats_from_batch(out_hit, out_steps, params.dt, n_runs, master_seed)


def _stats_from_batch(out_hit, out_steps, dt, n_runs, master_seed) -> HittingTimeStats:
    hits = out_hit == 1
    n_hits = int(hits.sum())
    if n_hits == 0:
        raise AllTimedOut(
            f"all {n_runs} trajectories timed out; increase t_max")
    times = out_steps[hits] * dt
    mean = float(times.mean())
    std = float(times.std(ddof=1)) if n_hits > 1 else 0.0
    return HittingTimeStats(
        n_runs=n_runs, n_hits=n_hits, n_timeouts=n_runs - n_hits,
        mean=mean, std=std, stderr=std / math.sqrt(n_hits),
        master_seed=master_seed)


def line_starts(params: SimParams, spacing: float) -> np.ndarray:
    """y-positions of the line sample on x = 0, covering [0, L/2]."""
    count = int(round(params.L / 2.0 / spacing)) + 1
    return np.arange(count) * spacing


def success_fraction_line(params: SimParams, spacing: float, t_max: float,
                          sampler: VelocitySampler | None = None,
                          workers: int | None = None) -> float:
    """Fraction of drift-only agents on the x = 0 line that hit within t_max."""
    configure_workers(workers)
    if sampler is None:
        sampler = make_sampler(params)
    ys = line_starts(params, spacing)
    n = ys.shape[0]
    xs = np.zeros(n)
    keys = np.zeros(n, dtype=np.uint64)
    n_max = int(round(t_max / params.dt))
    out_hit = np.zeros(n, dtype=np.int64)
    out_steps = np.zeros(n, dtype=np.int64)
    out_x = np.zeros(n)
    out_y = np.zeros(n)
    _kernels.run_batch(xs, ys, keys, n_max, params.L, params.A, 0.0,
                       params.chi, params.v_max, params.shear_cutoff,
                       params.delta, params.dt, params.substep, False,
                       sampler.has_chem, sampler._coef, sampler._grid_n,
                       sampler._h, out_hit, out_steps, out_x, out_y)
    return float((out_hit == 1).sum() / n)
