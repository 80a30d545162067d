"""Monotone-iteration solver for singular three-point boundary value problems

    -(x^alpha y')' = x^alpha f(x, y),   y'(0) = 0,   y(1) = delta y(eta) + b,

with Bessel-function Green's kernels and a finite-difference cross-check.
"""

from .classify import (
    CaseTag,
    HypothesisReport,
    LambdaWindow,
    RegimeTag,
    admissible_lambda_window,
    check_hypotheses,
    classify_alpha,
)
from .config import RunConfig, bundled, load, loads
from .expr import parse_expr
from .green import GreenKernel, build_kernel, eval_kernel, kernel_sign_report, solve_linear
from .iterate import (
    IterationTrace,
    SolveReport,
    iterate_monotone,
    solve_enclosure,
    step,
    uniqueness_check,
    validate_lower,
    validate_upper,
)
from .model import BoundaryFunction, GridFunction, ProblemSpec, interp, make_grid, sup_norm_diff
from .oracle import FdConfig, fd_solve, residual
from .quad import QuadConfig, integrate, integrate_kernel_product
from .specfun import BesselFamily, EvalPolicy, bessel, bessel_limit_at_zero, cross_product_phi, first_positive_zero

__version__ = "0.1.0"

__all__ = [
    "RunConfig",
    "bundled",
    "load",
    "loads",
    "parse_expr",
    "BesselFamily",
    "BoundaryFunction",
    "CaseTag",
    "EvalPolicy",
    "FdConfig",
    "GreenKernel",
    "GridFunction",
    "HypothesisReport",
    "IterationTrace",
    "LambdaWindow",
    "ProblemSpec",
    "QuadConfig",
    "RegimeTag",
    "SolveReport",
    "admissible_lambda_window",
    "bessel",
    "bessel_limit_at_zero",
    "build_kernel",
    "check_hypotheses",
    "classify_alpha",
    "cross_product_phi",
    "eval_kernel",
    "fd_solve",
    "first_positive_zero",
    "integrate",
    "integrate_kernel_product",
    "interp",
    "iterate_monotone",
    "kernel_sign_report",
    "make_grid",
    "residual",
    "solve_enclosure",
    "solve_linear",
    "step",
    "sup_norm_diff",
    "uniqueness_check",
    "validate_lower",
    "validate_upper",
]
