"""Petrov-Galerkin modal scheme.

Trial functions are first-kind poly-fractonomials (1 + xi)^mu P_{n-1}^{-mu,mu},
test functions second-kind ones (1 - xi)^mu P_{k-1}^{mu,-mu}, on the reference
interval xi = 2t/T - 1.  Splitting D^alpha symmetrically between trial and test
functions turns each stiffness entry into

    S_kn = sum_j W_j (2/T)^{alpha_j} C_kn(eta_j)
           int (1 - xi)^eta (1 + xi)^eta P_{k-1}^{eta,-eta} P_{n-1}^{-eta,eta} dxi

with eta_j = mu - alpha_j / 2 and
C_kn = Gamma(n+mu) Gamma(k+mu) / (Gamma(n+eta) Gamma(k+eta)).  The inner
integral is a polynomial against a Jacobi weight, so a Gauss-Jacobi rule with
N + 2 nodes integrates it exactly.
"""

import csv
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import rgamma

from .distribution import alpha_quadrature
from .linalg import SingularMatrixError, cond2, lu_solve
from .quadrature import gauss_jacobi, tanh_sinh
from .specfun import jacobi_all

__all__ = [
    "PGConfig",
    "ModalSolution",
    "ForcingError",
    "assemble_stiffness",
    "assemble_load",
    "solve_pg",
    "eval_modal",
    "eval_modal_rl_deriv",
]

LOAD_RULES = ("jacobi", "tanh-sinh")


class ForcingError(ValueError):
    """The forcing could not be evaluated at a quadrature node."""


@dataclass(frozen=True)
class PGConfig:
    N: int
    mu: float
    T: float = 2.0
    Q_alpha: int = 50
    Q_xi: int = None
    Q_f: int = None
    load_rule: str = "jacobi"
    ts_level: int = 7

    def __post_init__(self):
        problems = []
        if int(self.N) != self.N or self.N < 1:
            problems.append(f"N must be a positive integer, got {self.N}")
        if not 0.0 < self.mu < 2.0:
            problems.append(f"mu must lie in (0, 2), got {self.mu}")
        if not self.T > 0.0:
            problems.append(f"T must be positive, got {self.T}")
        if self.Q_alpha < 1:
            problems.append("Q_alpha must be positive")
        if self.Q_xi is not None and self.Q_xi < self.N:
            problems.append(f"Q_xi={self.Q_xi} cannot integrate the stiffness exactly (needs >= N)")
        if self.Q_f is not None and self.Q_f < 1:
            problems.append("Q_f must be positive")
        if self.load_rule not in LOAD_RULES:
            problems.append(f"load_rule must be one of {LOAD_RULES}, got {self.load_rule!r}")
        if problems:
            raise ValueError("; ".join(problems))
        object.__setattr__(self, "N", int(self.N))

    @property
    def q_xi(self):
        return self.N + 2 if self.Q_xi is None else int(self.Q_xi)

    @property
    def q_f(self):
        return self.N + 20 if self.Q_f is None else int(self.Q_f)

    def check_against(self, dist):
        """Validate mu against the distribution; returns the list of soft warnings."""
        amax = dist.alpha_max
        eta_min = self.mu - amax / 2.0
        if amax > 1.0 and self.mu <= 1.0:
            raise ValueError(f"alpha_max={amax} > 1 requires mu in (1, 2), got {self.mu}")
        if eta_min <= -0.5:
            raise ValueError(
                f"mu - alpha_max/2 = {eta_min:.3g} <= -1/2; the trial/test pairing is not stable"
            )
        notes = []
        if eta_min < 0.0:
            notes.append(f"mu={self.mu} is below alpha_max/2={amax / 2}; convergence theory does not cover it")
        return notes


@dataclass(frozen=True, eq=False)
class ModalSolution:
    coeffs: np.ndarray
    mu: float
    T: float

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def __call__(self, t):
        return eval_modal(self, t)

    def deriv(self, s, t, extended=False):
        return eval_modal_rl_deriv(self, s, t, extended)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["index", "coefficient"])
            for n, c in enumerate(self.coeffs, start=1):
                w.writerow([n, f"{c:.17g}"])


def _gamma_ratio(n, a, b):
    """Gamma(n + a) / Gamma(n + b) for n = 1..N."""
    return np.array([math.exp(math.lgamma(k + a) - math.lgamma(k + b)) for k in range(1, n + 1)])


def assemble_stiffness(cfg, dist):
    N, mu = cfg.N, cfg.mu
    for note in cfg.check_against(dist):
        warnings.warn(note, stacklevel=2)
    quad = alpha_quadrature(dist, cfg.Q_alpha)
    S = np.zeros((N, N))
    for alpha, weight in quad:
        eta = round(mu - 0.5 * alpha, 14)
        rule = gauss_jacobi(cfg.q_xi, eta, eta)
        trial = jacobi_all(N - 1, -eta, eta, rule.nodes)
        test = jacobi_all(N - 1, eta, -eta, rule.nodes)
        inner = (test * rule.weights) @ trial.T
        g = _gamma_ratio(N, mu, eta)
        S += weight * (2.0 / cfg.T) ** alpha * np.outer(g, g) * inner
    return S


def _eval_forcing(f, t):
    try:
        vals = np.asarray(f(t), dtype=float) * np.ones_like(t)
    except Exception as exc:
        vals, err = None, exc
    else:
        err = None
    if vals is not None and np.all(np.isfinite(vals)):
        return vals
    for ti in np.atleast_1d(t):
        try:
            v = float(np.asarray(f(np.array([ti])), dtype=float).ravel()[0])
        except Exception as exc:
            raise ForcingError(f"forcing failed at t={ti!r}: {exc}") from exc
        if not math.isfinite(v):
            raise ForcingError(f"forcing is not finite at t={ti!r}")
    raise ForcingError(f"forcing evaluation failed: {err}")


def assemble_load(cfg, f):
    """F_k = int (1 - xi)^mu f(t(xi)) P_{k-1}^{mu,-mu}(xi) dxi."""
    N, mu, T = cfg.N, cfg.mu, cfg.T
    if cfg.load_rule == "jacobi":
        rule = gauss_jacobi(cfg.q_f, mu, 0.0)
        xi, w = rule.nodes, rule.weights
        t = 0.5 * T * (xi + 1.0)
    else:
        rule = tanh_sinh(cfg.ts_level)
        xi = rule.nodes
        w = rule.weights * rule.right_gap**mu
        t = 0.5 * T * rule.left_gap
    vals = _eval_forcing(f, t)
    return jacobi_all(N - 1, mu, -mu, xi) @ (w * vals)


def solve_pg(cfg, dist, f, return_system=False):
    S = assemble_stiffness(cfg, dist)
    F = assemble_load(cfg, f)
    try:
        c = lu_solve(S, F)
    except SingularMatrixError as exc:
        raise SingularMatrixError(f"{exc}; cond2 = {cond2(S):.3e}") from exc
    sol = ModalSolution(c, cfg.mu, cfg.T)
    return (sol, S, F) if return_system else sol


def _modal_sum(coeffs, scale, expo, xi):
    N = coeffs.size
    basis = jacobi_all(N - 1, -expo, expo, xi)
    poly = (coeffs * scale) @ basis
    if expo == 0.0:
        return poly
    with np.errstate(divide="ignore"):
        return np.power(np.maximum(1.0 + xi, 0.0), expo) * poly


def eval_modal(sol, t):
    t = np.asarray(t, dtype=float)
    xi = 2.0 * t / sol.T - 1.0
    val = _modal_sum(sol.coeffs, 1.0, sol.mu, xi)
    return float(val) if val.ndim == 0 else val


def eval_modal_rl_deriv(sol, s, t, extended=False):
    """Exact left RL derivative of order s in (0, mu] of the modal expansion, in t.

    D^s[(1 + xi)^mu P_{n-1}^{-mu,mu}] = Gamma(n + mu) / Gamma(n + nu) (1 + xi)^nu P_{n-1}^{-nu,nu}
    with nu = mu - s.  The identity also holds for mu < s < mu + 1 (the result is
    then singular at t = 0); ``extended=True`` allows that range.
    """
    s = float(s)
    if extended:
        if not 0.0 < s < sol.mu + 1.0:
            raise ValueError(f"derivative order must lie in (0, mu + 1) = (0, {sol.mu + 1.0}), got {s}")
    elif not 0.0 < s <= sol.mu + 1e-15:
        raise ValueError(f"derivative order must lie in (0, mu={sol.mu}], got {s}")
    nu = sol.mu - s
    if abs(nu) < 1e-15:
        nu = 0.0
    t = np.asarray(t, dtype=float)
    xi = 2.0 * t / sol.T - 1.0
    n = np.arange(1, sol.coeffs.size + 1)
    scale = np.exp(np.array([math.lgamma(k + sol.mu) for k in n])) * rgamma(n + nu)
    val = (2.0 / sol.T) ** s * _modal_sum(sol.coeffs, scale, nu, xi)
    return float(val) if val.ndim == 0 else val
