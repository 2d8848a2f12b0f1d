"""Key-generation rates for decoy-intensity QKD with any number of intensities.

Layers, bottom up: generalized divided differences (``divided_diff``), the
convex Fock-mixture expansion of phase-randomized pulses (``expansion``),
closed-form single-photon bounds with an LP oracle (``bounds``), the fiber
noise model and its bound residuals (``channel``), key-rate formulas and
optimizers (``keyrate``), and named comparison scenarios with distance
sweeps (``scenarios``, ``cli``).
"""

from .bounds import (
    BoundResult,
    InfeasibleStatsError,
    LegacyBounds,
    ObservedStats,
    aggregate,
    b_j_max,
    beta,
    lp_oracle_b1_max,
    lp_oracle_b_j_max,
    lp_oracle_q1_min,
    lp_oracle_q_j_min,
    q_j_min,
)
from .channel import (
    STANDARD_FIBER,
    ChannelParams,
    alpha_of_distance,
    closed_form_bounds,
    counting_rate,
    epsilon,
    epsilon_beta_form,
    epsilon_simplex_mc,
    error_rate,
    model_stats,
    per_photon_rates,
)
from .divided_diff import (
    DegeneratePointsError,
    EvaluationError,
    PointSet,
    RealFunction,
    divided_difference,
    divided_difference_recurrence,
    power_divided_difference,
    simplex_mean_value_oracle,
)
from .expansion import (
    ConstraintMatrix,
    DecoyMatrices,
    ExpansionTable,
    IntensityGrid,
    build_matrices,
    gamma_coefficient,
    gamma_coefficient_direct,
    omega,
    omega_closed_form,
    reconstruct_poisson,
)
from .keyrate import (
    DerivativeCheckReport,
    RateInputs,
    akg_rate,
    binary_entropy_bar,
    find_zero_distance,
    optimal_mu_derivative_check,
    optimize_signal_intensity,
    single_photon_credit,
    universal_upper,
)
from .scenarios import (
    ConfigurationError,
    ScenarioSpec,
    SweepResult,
    SweepRow,
    achievable_distance,
    run_scenario,
    scenario,
)

__all__ = [
    "BoundResult",
    "ChannelParams",
    "ConfigurationError",
    "ConstraintMatrix",
    "DecoyMatrices",
    "DegeneratePointsError",
    "DerivativeCheckReport",
    "EvaluationError",
    "ExpansionTable",
    "InfeasibleStatsError",
    "IntensityGrid",
    "LegacyBounds",
    "ObservedStats",
    "PointSet",
    "RateInputs",
    "RealFunction",
    "STANDARD_FIBER",
    "ScenarioSpec",
    "SweepResult",
    "SweepRow",
    "achievable_distance",
    "aggregate",
    "akg_rate",
    "alpha_of_distance",
    "b_j_max",
    "beta",
    "binary_entropy_bar",
    "build_matrices",
    "closed_form_bounds",
    "counting_rate",
    "divided_difference",
    "divided_difference_recurrence",
    "epsilon",
    "epsilon_beta_form",
    "epsilon_simplex_mc",
    "error_rate",
    "find_zero_distance",
    "gamma_coefficient",
    "gamma_coefficient_direct",
    "lp_oracle_b1_max",
    "lp_oracle_b_j_max",
    "lp_oracle_q1_min",
    "lp_oracle_q_j_min",
    "model_stats",
    "omega",
    "omega_closed_form",
    "optimal_mu_derivative_check",
    "optimize_signal_intensity",
    "per_photon_rates",
    "power_divided_difference",
    "q_j_min",
    "reconstruct_poisson",
    "run_scenario",
    "scenario",
    "simplex_mean_value_oracle",
    "single_photon_credit",
    "universal_upper",
]
