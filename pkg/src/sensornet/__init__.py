"""Uncertainty analysis for qubit sensing networks estimating linear functions.

The package covers both regimes of a networked phase-estimation experiment:
closed-form asymptotic bounds driven by the quantum Fisher information of
sensor-symmetric probes, and exact Bayesian mean square errors for a finite
number of trials, evaluated by seeded Monte Carlo over simulated records.
"""

from .bayes_engine import (
    BayesMseResult,
    CurvePoint,
    MeasurementRecord,
    Peak,
    PosteriorGrid,
    PriorBox,
    UncertaintyCurve,
    bayes_mse,
    find_peaks,
    likelihood_single,
    mse_sweep,
    mu_tau,
    optimal_estimates,
    outcome_probabilities,
    posterior,
    posterior_landscape,
    simulate_record,
    sweep_sample_errors,
    uncertainty_curve,
)
from .crb_optimizer import (
    AsymptoticBound,
    balanced_gamma,
    crb_general,
    crb_sensor_symmetric,
    eps_qbit,
    gamma_opt,
    h_factor,
    j_opt,
    verify_jopt_is_minimum,
)
from .errors import NumericalError, ValidationError
from .fisher_info import (
    InfoMatrix,
    classical_fim_povm2,
    qfi_inverse_closed_form,
    qfi_pure,
    qfi_sensor_symmetric,
    verify_povm_optimality,
)
from .linear_functions import (
    GeometryReport,
    LinearFunctionSet,
    clustered_zero_geometry_function,
    geometry_parameter,
    normalization_term,
    x_matrix_eigendecomposition,
)
from .qubit_network import (
    CorrelationProfile,
    PureState,
    apply_encoding,
    correlation_profile,
    is_product_state,
    make_gamma_state_2,
    make_gamma_state_d,
    make_product_state,
)

__version__ = "0.1.0"

__all__ = [
    "AsymptoticBound",
    "BayesMseResult",
    "CorrelationProfile",
    "CurvePoint",
    "GeometryReport",
    "InfoMatrix",
    "LinearFunctionSet",
    "MeasurementRecord",
    "NumericalError",
    "Peak",
    "PosteriorGrid",
    "PriorBox",
    "PureState",
    "UncertaintyCurve",
    "ValidationError",
    "apply_encoding",
    "balanced_gamma",
    "bayes_mse",
    "classical_fim_povm2",
    "clustered_zero_geometry_function",
    "correlation_profile",
    "crb_general",
    "crb_sensor_symmetric",
    "eps_qbit",
    "find_peaks",
    "gamma_opt",
    "geometry_parameter",
    "h_factor",
    "is_product_state",
    "j_opt",
    "likelihood_single",
    "make_gamma_state_2",
    "make_gamma_state_d",
    "make_product_state",
    "mse_sweep",
    "mu_tau",
    "normalization_term",
    "optimal_estimates",
    "outcome_probabilities",
    "posterior",
    "posterior_landscape",
    "qfi_inverse_closed_form",
    "qfi_pure",
    "qfi_sensor_symmetric",
    "simulate_record",
    "sweep_sample_errors",
    "uncertainty_curve",
    "verify_jopt_is_minimum",
    "verify_povm_optimality",
    "x_matrix_eigendecomposition",
]
