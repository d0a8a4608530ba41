"""Expected first-hitting times of a Brownian searcher in shear flow with
flux-limited chemotaxis: field solver, trajectory Monte Carlo, 1D limits."""

__version__ = "0.1.0"

from .errors import (AllTimedOut, ConfigError, DomainError, InsufficientRows,
                     SolverDiverged)
from .params import (TIME_UNIT_S, Point2, SimParams, default_grid_n,
                     default_t_max, load_config, shear_velocity,
                     torus_distance, validate_params, wrap_point)
from .rng import NoiseStream, derive_seed
from .field import (GridField, Profile1D, build_target_density, gradient_at,
                    homogenization_norms, read_grid, remainder, solve_chemical,
                    write_field_csv, write_grid, x_average)
from .dynamics import (HitResult, VelocitySampler, chemotactic_velocity,
                       cutoff_phi, em_step, run_deterministic, run_trajectory,
                       total_drift)
from .ensemble import (HittingTimeStats, configure_workers, line_starts,
                       make_sampler, run_ensemble, success_fraction_line)
from .effective1d import (EffectiveDrift1D, domain_from_torus, effective_drift,
                          expected_hitting_time_ode,
                          expected_hitting_time_profile,
                          hitting_time_1d_closed_form, run_1d_sde,
                          run_ensemble_1d, shifted_from_torus,
                          solve_avg_chemical_1d, torus_from_domain)
from .sweep import (DEFAULT_SHEAR_RATES_PER_S, OptimalShear, SweepResult,
                    SweepRow, SweepSpec, emit_csv, find_optimal_shear, sweep,
                    theorem1_convergence_study, theorem3_convergence_study)

__all__ = [
    "AllTimedOut", "ConfigError", "DomainError", "InsufficientRows",
    "SolverDiverged", "TIME_UNIT_S", "Point2", "SimParams", "default_grid_n",
    "default_t_max", "load_config", "shear_velocity", "torus_distance",
    "validate_params", "wrap_point", "NoiseStream", "derive_seed", "GridField",
    "Profile1D", "build_target_density", "gradient_at", "homogenization_norms",
    "read_grid", "remainder", "solve_chemical", "write_field_csv", "write_grid",
    "x_average", "HitResult", "VelocitySampler", "chemotactic_velocity",
    "cutoff_phi", "em_step", "run_deterministic", "run_trajectory",
    "total_drift", "HittingTimeStats", "configure_workers", "line_starts",
    "make_sampler", "run_ensemble", "success_fraction_line", "EffectiveDrift1D",
    "domain_from_torus", "effective_drift", "expected_hitting_time_ode",
    "expected_hitting_time_profile", "hitting_time_1d_closed_form",
    "run_1d_sde", "run_ensemble_1d", "shifted_from_torus",
    "solve_avg_chemical_1d", "torus_from_domain", "DEFAULT_SHEAR_RATES_PER_S",
    "OptimalShear", "SweepResult", "SweepRow", "SweepSpec", "emit_csv",
    "find_optimal_shear", "sweep", "theorem1_convergence_study",
    "theorem3_convergence_study",
]
