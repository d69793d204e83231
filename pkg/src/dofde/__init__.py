"""Spectral solvers for distributed-order fractional ODEs.

D^phi u(t) = int phi(alpha) D^alpha u(t) d alpha = f(t) on (0, T], u(0) = 0,
solved with a Petrov-Galerkin scheme on Jacobi poly-fractonomials or with
collocation on fractional Lagrange interpolants.
"""

from .analysis import ErrorReport, condition_report, convergence_study, quadrature_convergence_probe
from .cases import make_case
from .collocation_solver import CollocConfig, solve_collocation
from .distribution import alpha_quadrature, make_atoms, make_manufactured, make_named
from .pg_solver import PGConfig, solve_pg

__version__ = "0.1.0"

__all__ = [
    "CollocConfig",
    "ErrorReport",
    "PGConfig",
    "alpha_quadrature",
    "condition_report",
    "convergence_study",
    "make_atoms",
    "make_case",
    "make_manufactured",
    "make_named",
    "quadrature_convergence_probe",
    "solve_collocation",
    "solve_pg",
]
