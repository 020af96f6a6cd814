"""Radial solutions of the parabolic Monge-Ampere equation -u_t det D^2 u = 1.

The profile phi of u(x, t) = w(t) phi(|x|) solves
phi (phi')^{n-1} phi'' = r^{n-1} with phi(0) = 1, phi'(0) = 0.
"""
from .constants import asymptotic_constants, leading_coefficient, refined_exponent
from .dim1 import solve_dim1
from .radial import cross_validate, euler_break_line, integrate_reference, picard_limit, solve
from .solution import PiecewiseSolution, SolveConfig

__version__ = "0.1.0"

__all__ = [
    "PiecewiseSolution",
    "SolveConfig",
    "asymptotic_constants",
    "cross_validate",
    "euler_break_line",
    "integrate_reference",
    "leading_coefficient",
    "picard_limit",
    "refined_exponent",
    "solve",
    "solve_dim1",
]
