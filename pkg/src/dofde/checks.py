"""Built-in self checks run by ``dofde verify``.

Each check returns (passed, detail).  The oracles here are independent of
the code under test: brute-force numerical fractional derivatives, nested
adaptive quadrature and closed-form moments.
"""

import math
import warnings

import numpy as np
from scipy.integrate import quad
from scipy.special import beta as beta_fn

from .analysis import condition_report, convergence_study, quadrature_convergence_probe
from .cases import make_case
from .collocation_solver import CollocConfig, diff_matrix, fli_eval
from .fracops import Kind, PolyFrac, polyfrac_rl_deriv, rl_deriv_numeric, rl_deriv_power
from .quadrature import gauss_jacobi

__all__ = ["CHECKS", "run_checks"]


def _rel(a, b):
    return abs(a - b) / abs(b)


def _check_exact_derivative():
    worst = 0.0
    for kind in (Kind.FIRST, Kind.SECOND):
        for n in (1, 3, 5):
            for mu, sigma in ((0.7, 0.3), (1.4, 0.6), (0.5, 0.5)):
                p = PolyFrac(kind, n, mu)
                side = "left" if kind is Kind.FIRST else "right"
                xi = 0.35 if kind is Kind.FIRST else -0.35
                exact = polyfrac_rl_deriv(p, sigma)(xi)
                ref = rl_deriv_numeric(p, sigma, xi, side, lead=mu)
                worst = max(worst, abs(exact - ref) / max(abs(ref), 1e-300))
    return worst <= 1e-6, f"max rel err {worst:.2e}"


def _check_quadrature():
    worst = 0.0
    for Q, a, b in ((5, -0.5, 0.3), (8, 0.7, -0.4), (12, 1.2, 1.2), (3, 0.0, 0.0)):
        rule = gauss_jacobi(Q, a, b)
        for k in range(2 * Q):
            # int_{-1}^1 (1-x)^a (1+x)^b (1+x)^k dx in closed form
            exact = 2.0 ** (a + b + k + 1) * beta_fn(a + 1.0, b + k + 1.0)
            got = rule.integrate((1.0 + rule.nodes) ** k)
            worst = max(worst, _rel(got, exact))
    return worst <= 1e-12, f"max rel err {worst:.2e}"


def _check_kronecker():
    cfg = CollocConfig(10, 0.35)
    H = np.array([[fli_eval(cfg, j, x) for x in cfg.nodes[1:]] for j in range(2, cfg.N + 1)])
    err = float(np.max(np.abs(H - np.eye(cfg.N - 1))))
    return err <= 1e-12, f"max |h_j(x_i) - delta_ij| {err:.2e}"


def _check_dmatrix():
    # (1 + xi)^(mu + 3) lies in the span of the interpolants for N = 8
    cfg = CollocConfig(8, 0.4)
    x = cfg.nodes[1:]
    worst = 0.0
    for alpha in (0.3, 0.65, 1.0):
        got = diff_matrix(cfg, alpha) @ (1.0 + x) ** 3.4
        ref = rl_deriv_power(3.4, alpha, x)
        worst = max(worst, float(np.max(np.abs(got - ref))))
    return worst <= 1e-8, f"max err {worst:.2e}"


def _check_case_consistency():
    worst = 0.0
    case = make_case("I")
    for t in (0.3, 1.1, 1.7):
        def integrand(alpha):
            return case.dist(alpha) * math.gamma(6.0) / math.gamma(6.0 - alpha) * t ** (5.0 - alpha)
        ref = quad(integrand, 0.0, 2.0, epsabs=0.0, epsrel=1e-13)[0]
        worst = max(worst, _rel(case(t), ref))
    return worst <= 1e-6, f"max rel err {worst:.2e}"


def _check_table1():
    reps = convergence_study("pg", "I", 1.0 + 1e-4, [2, 4])
    e1, e2 = _rel(reps[0].linf, 9.49784), _rel(reps[1].l2, 0.0823368)
    return max(e1, e2) <= 1e-3, f"rel err {e1:.1e}, {e2:.1e}"


def _check_one_term():
    worst = max(convergence_study("pg", "III", mu0, [1], case_params={"mu0": mu0})[0].linf for mu0 in (0.1, 0.9))
    return worst <= 1e-12, f"max L-inf {worst:.2e}"


def _check_cond():
    (_, c), = condition_report("pg", "I", 2.0 - 1e-8, [6], norm=1)
    return _rel(c, 29706.682) <= 0.05, f"cond_1 = {c:.6g}"


def _check_probe():
    errs = quadrature_convergence_probe(3, 4, 1.5, 0.3, make_case("I").dist, [40])
    return errs[0][1] <= 1e-12, f"error at Q=40 {errs[0][1]:.2e}"


CHECKS = (
    ("exact derivative vs brute force", _check_exact_derivative),
    ("Gauss-Jacobi moments", _check_quadrature),
    ("FLI Kronecker property", _check_kronecker),
    ("D-matrix on in-space function", _check_dmatrix),
    ("manufactured forcing consistency", _check_case_consistency),
    ("PG Case I reference values", _check_table1),
    ("one-term exact capture", _check_one_term),
    ("PG stiffness condition number", _check_cond),
    ("alpha-quadrature probe", _check_probe),
)


def run_checks():
    """[(name, passed, detail)] for every built-in check; exceptions count as failures."""
    out = []
    for name, fn in CHECKS:
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                ok, detail = fn()
        except Exception as exc:
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append((name, bool(ok), detail))
    return out
