"""
Evolution equation, time steppers and continuation.
"""
from .operators import (
    adapt_dt,
    default_dt,
    dispersion,
    jacobian_apply,
    residual_norm,
    rhs,
)
from .etdrk4 import Etdrk4Stepper, etdrk4_step, get_etdrk4_stepper
from .gradient_stable import GradientStableSolver, gradient_stable_step, get_gradient_stable_solver
from .continuation import NewtonKrylovSolver, compare_branches, continue_in_m, newton_solve

__all__ = [
    "adapt_dt",
    "default_dt",
    "dispersion",
    "jacobian_apply",
    "residual_norm",
    "rhs",
    "Etdrk4Stepper",
    "etdrk4_step",
    "get_etdrk4_stepper",
    "GradientStableSolver",
    "gradient_stable_step",
    "get_gradient_stable_solver",
    "NewtonKrylovSolver",
    "compare_branches",
    "continue_in_m",
    "newton_solve",
]
