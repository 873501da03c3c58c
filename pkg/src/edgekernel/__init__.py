"""Orthonormal polynomials and reproducing kernels for generalized Jacobi measures."""

from .config import ConfigError, ExperimentConfig, load_config, parse_config
from .experiments import (
    ConvergenceReport,
    check_kernel_inequalities,
    estimate_rate,
    run_bulk_sine,
    run_christoffel_ratio,
    run_edge_universality,
    run_localization,
    run_smoothing,
)
from .expr import ExprSyntaxError, format_expr, parse_weight_expr
from .kernels import KernelEvaluator, christoffel_oracle, edge_bound_diagnostic
from .measure import MeasureSpec, Piece, edge_weight, eval_weight, legendre, validate_spec
from .quadrature import (
    QuadratureRule,
    RecurrenceTable,
    build_recurrence,
    composite_quadrature,
    gauss_rule_from_recurrence,
    jacobi_recurrence_closed_form,
    log_leading_coefficients,
    stieltjes_recurrence,
)
from .special import bessel_j, bessel_j_prime, bessel_kernel, log_gamma, sine_kernel

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "load_config",
    "parse_config",
    "ConvergenceReport",
    "check_kernel_inequalities",
    "estimate_rate",
    "run_bulk_sine",
    "run_christoffel_ratio",
    "run_edge_universality",
    "run_localization",
    "run_smoothing",
    "ExprSyntaxError",
    "format_expr",
    "parse_weight_expr",
    "KernelEvaluator",
    "christoffel_oracle",
    "edge_bound_diagnostic",
    "MeasureSpec",
    "Piece",
    "edge_weight",
    "eval_weight",
    "legendre",
    "validate_spec",
    "QuadratureRule",
    "RecurrenceTable",
    "build_recurrence",
    "composite_quadrature",
    "gauss_rule_from_recurrence",
    "jacobi_recurrence_closed_form",
    "log_leading_coefficients",
    "stieltjes_recurrence",
    "bessel_j",
    "bessel_j_prime",
    "bessel_kernel",
    "log_gamma",
    "sine_kernel",
]
