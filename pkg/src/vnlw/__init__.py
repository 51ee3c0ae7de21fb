"""Pseudospectral laboratory for the damped quintic wave equation.

The package evolves u_tt - Lap u + 2 mu |grad| u_t + |u|^{p-1} u = 0 on
a periodic square with Wiener-randomized data, exposes the damping
semigroup and its smoothing rates, and ships ensemble studies of the
randomization's norm tails behind a small CLI.
"""

from .config import (
    ConfigError,
    DataConfig,
    ExperimentConfig,
    GridConfig,
    RandomizationConfig,
    RunConfig,
    config_digest,
    emit_config,
    parse_config,
)
from .diagnostics import (
    AdmissibilityReport,
    AQuantity,
    DecompositionReport,
    DissipationReport,
    EnergyRecord,
    EventReport,
    GronwallReport,
    InflationRow,
    RateFit,
    TailFit,
    admissibility,
    a_quantity,
    critical_exponent,
    dissipation_check,
    energy,
    energy_increment_decomposition,
    energy_record,
    gronwall_check,
    mixed_norm,
    norm_inflation_probe,
    randomized_strichartz_event,
    scaling_regularity,
    schauder_rate_fit,
    tail_fit,
)
from .ensemble import ReplicaOutcome, run_replicas, successful_values, worker_count
from .experiments import (
    build_pair,
    default_lambda_grid,
    initial_pair,
    linear_norm_value,
    run_experiment,
    solution_states,
    trajectory_distance,
)
from .grid import (
    Grid,
    RealField,
    SnapshotFormatError,
    SpectralField,
    StatePair,
    forward_transform,
    hermitize,
    inverse_transform,
    read_snapshot,
    write_snapshot,
)
from .manifest import OutputManifest, read_manifest, verify_manifest
from .multipliers import (
    bessel_potential,
    frac_laplacian,
    poisson_smooth,
    project_high,
    project_low,
    shell_project,
)
from .norms import homogeneous_norm, lebesgue_norm, pair_norm, sobolev_norm
from .profiles import (
    gaussian_bump,
    packet_pair,
    rate_probe_field,
    rough_pair,
    single_mode,
    single_mode_pair,
    zero_field,
    zero_pair,
)
from .propagators import (
    linear_flow_pair,
    linear_position,
    normalized_velocity,
    velocity_kernel,
)
from .seeding import split_seed
from .solver import (
    BlowUpError,
    LinearForcing,
    LinearTrajectory,
    PicardResult,
    SolverParams,
    Trajectory,
    dealiased_power,
    duhamel_step,
    evolve,
    evolve_full,
    evolve_truncated,
    linear_flow,
    nonlinearity,
    picard_solve_local,
)
from .version import __version__
from .wiener import (
    CoefficientDraw,
    RandomizedPair,
    draw_coefficients,
    randomize_pair,
    unit_decompose,
    verify_subgaussian_moment,
)

__all__ = [
    "__version__",
    # grid and fields
    "Grid", "RealField", "SpectralField", "StatePair", "SnapshotFormatError",
    "forward_transform", "inverse_transform", "hermitize",
    "read_snapshot", "write_snapshot",
    # multipliers and norms
    "bessel_potential", "frac_laplacian", "poisson_smooth",
    "project_low", "project_high", "shell_project",
    "sobolev_norm", "homogeneous_norm", "lebesgue_norm", "pair_norm",
    # propagators
    "linear_flow_pair", "linear_position", "velocity_kernel", "normalized_velocity",
    # randomization
    "CoefficientDraw", "RandomizedPair", "draw_coefficients", "randomize_pair",
    "unit_decompose", "verify_subgaussian_moment", "split_seed",
    # data factories
    "zero_field", "zero_pair", "single_mode", "single_mode_pair",
    "gaussian_bump", "rough_pair", "rate_probe_field", "packet_pair",
    # solver
    "SolverParams", "BlowUpError", "LinearForcing", "LinearTrajectory",
    "Trajectory", "PicardResult", "nonlinearity", "dealiased_power",
    "duhamel_step", "linear_flow", "evolve", "evolve_full", "evolve_truncated",
    "picard_solve_local",
    # diagnostics
    "energy", "energy_record", "EnergyRecord", "dissipation_check",
    "DissipationReport", "energy_increment_decomposition", "DecompositionReport",
    "mixed_norm", "a_quantity", "AQuantity", "gronwall_check", "GronwallReport",
    "critical_exponent", "scaling_regularity", "admissibility",
    "AdmissibilityReport", "schauder_rate_fit", "RateFit", "tail_fit", "TailFit",
    "randomized_strichartz_event", "EventReport", "norm_inflation_probe",
    "InflationRow",
    # configuration and orchestration
    "RunConfig", "GridConfig", "DataConfig", "RandomizationConfig",
    "ExperimentConfig", "ConfigError", "parse_config", "emit_config",
    "config_digest", "OutputManifest", "read_manifest", "verify_manifest",
    "ReplicaOutcome", "run_replicas", "successful_values", "worker_count",
    "build_pair", "initial_pair", "solution_states", "trajectory_distance",
    "linear_norm_value", "default_lambda_grid", "run_experiment",
]
