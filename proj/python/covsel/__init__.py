"""Covariance-function estimation by projection with URE model selection.

Thin numpy-facing wrapper around the C++ core. The main entry points are
``select_model`` (data-driven model choice), ``risk_curve_example`` /
``simulate_example`` (the built-in experiments) and the dense matrix
primitives (``vec``, ``kron``, ``projector``, ...).
"""

from covsel._core import (
    design_matrix,
    empirical_covariance,
    equispaced_points,
    eval_basis,
    frobenius_inner,
    gamma_hat_sq,
    kron,
    project_to_model_space,
    projector,
    pseudo_inverse,
    risk_curve_example,
    select_model,
    simulate_example,
    unvec,
    vec,
)

__version__ = "0.1.0"

__all__ = [
    "design_matrix",
    "empirical_covariance",
    "equispaced_points",
    "eval_basis",
    "frobenius_inner",
    "gamma_hat_sq",
    "kron",
    "project_to_model_space",
    "projector",
    "pseudo_inverse",
    "risk_curve_example",
    "select_model",
    "simulate_example",
    "unvec",
    "vec",
]
