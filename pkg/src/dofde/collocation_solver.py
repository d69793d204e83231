"""Fractional spectral collocation with fractional Lagrange interpolants.

The nodal basis on -1 = xi_1 < ... < xi_N = 1 is

    h_j(xi) = ((1 + xi) / (1 + xi_j))^mu  prod_{k != j} (xi - xi_k) / (xi_j - xi_k),

for j = 2..N; the value at xi_1 is pinned to zero.  Expanding each Lagrange
polynomial in P_{n-1}^{-mu,mu} and each of those in powers of (1 + xi)
makes every term a power of (1 + xi), whose RL derivative is exact.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import rgamma

from .distribution import alpha_quadrature
from .linalg import SingularMatrixError, cond2, lu_solve
from .quadrature import gauss_jacobi, gauss_legendre, gauss_lobatto_jacobi
from .specfun import gen_binomial, jacobi_all, jacobi_weighted_norm

__all__ = [
    "CollocConfig",
    "NodalSolution",
    "interpolation_points",
    "fli_eval",
    "beta_coefficients",
    "power_coefficients",
    "diff_matrix",
    "diff_matrix_1p",
    "assemble_distributed_operator",
    "solve_collocation",
    "eval_nodal",
]

POINT_SETS = ("gauss", "lobatto")
BETA_METHODS = ("vandermonde", "projection")
DMATRIX_METHODS = ("jacobi", "power")


def interpolation_points(N, kind="gauss"):
    """Endpoints plus N - 2 interior points.

    ``gauss`` uses the zeros of P_{N-2} (Legendre), ``lobatto`` the
    Gauss-Lobatto-Legendre points (zeros of P'_{N-1}).
    """
    if N < 2:
        raise ValueError("collocation needs at least two points")
    if kind == "lobatto":
        return gauss_lobatto_jacobi(N, 0.0, 0.0).nodes.copy()
    if kind == "gauss":
        inner = gauss_legendre(N - 2).nodes if N > 2 else np.empty(0)
        return np.concatenate([[-1.0], inner, [1.0]])
    raise ValueError(f"unknown point set {kind!r}; choose from {POINT_SETS}")


@dataclass(frozen=True, eq=False)
class CollocConfig:
    N: int
    mu: float
    T: float = 2.0
    Q_alpha: int = 50
    points: object = "gauss"
    beta_method: str = "vandermonde"
    ceil_rule: bool = True
    dmatrix_method: str = "jacobi"

    def __post_init__(self):
        problems = []
        if int(self.N) != self.N or self.N < 2:
            problems.append(f"N must be an integer >= 2, got {self.N}")
        if not 0.0 < self.mu < 1.0:
            problems.append(f"mu must lie in (0, 1), got {self.mu}")
        if not self.T > 0.0:
            problems.append(f"T must be positive, got {self.T}")
        if self.Q_alpha < 1:
            problems.append("Q_alpha must be positive")
        if self.beta_method not in BETA_METHODS:
            problems.append(f"beta_method must be one of {BETA_METHODS}")
        if self.dmatrix_method not in DMATRIX_METHODS:
            problems.append(f"dmatrix_method must be one of {DMATRIX_METHODS}")
        if isinstance(self.points, str) and self.points not in POINT_SETS:
            problems.append(f"points must be one of {POINT_SETS} or an explicit array")
        if problems:
            raise ValueError("; ".join(problems))
        object.__setattr__(self, "N", int(self.N))
        if isinstance(self.points, str):
            x = interpolation_points(self.N, self.points)
        else:
            x = np.array(self.points, dtype=float)
            if x.size != self.N or x[0] != -1.0 or x[-1] != 1.0 or np.any(np.diff(x) <= 0):
                raise ValueError("explicit points must be N increasing values from -1 to 1")
        x.setflags(write=False)
        object.__setattr__(self, "nodes", x)


@dataclass(frozen=True, eq=False)
class NodalSolution:
    values: np.ndarray
    mu: float
    T: float
    points: np.ndarray

    def __post_init__(self):
        for name in ("values", "points"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def times(self):
        return 0.5 * self.T * (self.points + 1.0)

    def __call__(self, t):
        return eval_nodal(self, t)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t_j", "value"])
            for t, v in zip(self.times, self.values):
                w.writerow([f"{t:.17g}", f"{v:.17g}"])


def _lagrange(x, j, xi):
    """Lagrange polynomial of node j (0-based) over all nodes x."""
    xi = np.asarray(xi, dtype=float)
    out = np.ones_like(xi)
    for k, xk in enumerate(x):
        if k != j:
            out = out * (xi - xk) / (x[j] - xk)
    return out


def fli_eval(cfg, j, xi):
    """Fractional Lagrange interpolant h_j (j = 2..N, 1-based) at xi."""
    if not 2 <= j <= cfg.N:
        raise ValueError(f"interpolant index must lie in 2..{cfg.N}, got {j}")
    x = cfg.nodes
    xi = np.asarray(xi, dtype=float)
    frac = np.power(np.maximum(1.0 + xi, 0.0) / (1.0 + x[j - 1]), cfg.mu)
    val = frac * _lagrange(x, j - 1, xi)
    return float(val) if val.ndim == 0 else val


def beta_coefficients(cfg, method=None):
    """B[n-1, j-1] = beta_n^j, the P_{n-1}^{-mu,mu} coefficients of the j-th Lagrange polynomial."""
    method = cfg.beta_method if method is None else method
    x, mu, N = cfg.nodes, cfg.mu, cfg.N
    if method == "vandermonde":
        V = jacobi_all(N - 1, -mu, mu, x).T
        return np.linalg.solve(V, np.eye(N))
    if method == "projection":
        # orthogonality weight of P^{-mu,mu} is (1 - xi)^-mu (1 + xi)^mu
        rule = gauss_jacobi(N + 1, -mu, mu)
        P = jacobi_all(N - 1, -mu, mu, rule.nodes)
        L = np.array([_lagrange(x, j, rule.nodes) for j in range(N)])
        norms = np.array([jacobi_weighted_norm(n, -mu) for n in range(1, N + 1)])
        return (P * rule.weights) @ L.T / norms[:, None]
    raise ValueError(f"unknown beta method {method!r}")


def power_coefficients(N, mu):
    """A[n-1, q] such that (1+xi)^mu P_{n-1}^{-mu,mu} = sum_q A[n-1,q] (1+xi)^{q+mu} / Gamma(q+mu+1)."""
    A = np.zeros((N, N))
    for n in range(1, N + 1):
        for q in range(n):
            A[n - 1, q] = (
                (-1.0) ** (n + q - 1)
                * 0.5**q
                * gen_binomial(n - 1 + q, q)
                * gen_binomial(n - 1 + mu, n - 1 - q)
                * math.gamma(q + mu + 1.0)
            )
    return A


def _kernel(cfg, alpha, shift):
    """D^{shift + alpha} of the FLI basis at rows/cols 2..N."""
    if cfg.dmatrix_method == "power":
        return _kernel_power(cfg, alpha, shift)
    return _kernel_jacobi(cfg, alpha + shift)


def _kernel_power(cfg, alpha, shift):
    """Literal double sum over the (1 + xi) power expansion with the ceil(alpha - mu) lower limit."""
    x, mu, N = cfg.nodes, cfg.mu, cfg.N
    q = np.arange(N)
    expo = q + mu - alpha
    coef = rgamma(expo + 1.0)
    if shift:
        coef = coef * expo
    if cfg.ceil_rule:
        coef = np.where(q >= max(math.ceil(alpha - mu), 0), coef, 0.0)
    gap = 1.0 + x[1:]
    X = np.power(gap[:, None], expo[None, :] - shift)
    return (X * coef) @ _power_to_nodal(cfg) / np.power(gap, mu)[None, :]


def _kernel_jacobi(cfg, order):
    """Same operator through D^s[(1+xi)^mu P^{-mu,mu}_{n-1}] = G_n (1+xi)^nu P^{-nu,nu}_{n-1}, nu = mu - s.

    G_n = Gamma(n + mu) / Gamma(n + nu).  The recurrence for P^{-nu,nu} avoids
    the cancellation of the alternating power sum at large N.
    """
    x, mu, N = cfg.nodes, cfg.mu, cfg.N
    nu = mu - order
    gap = 1.0 + x[1:]
    n = np.arange(1, N + 1)
    g = np.array([math.gamma(k + mu) for k in n]) * rgamma(n + nu)
    P = jacobi_all(N - 1, -nu, nu, x[1:])
    B = _beta(cfg)[:, 1:]
    return (np.power(gap, nu)[:, None] * (P.T * g)) @ B / np.power(gap, mu)[None, :]


def _beta(cfg):
    cached = cfg.__dict__.get("_beta")
    if cached is None:
        cached = beta_coefficients(cfg)
        object.__setattr__(cfg, "_beta", cached)
    return cached


def _power_to_nodal(cfg):
    """A^T B for columns 2..N, cached on the (immutable) config."""
    cached = cfg.__dict__.get("_power_to_nodal")
    if cached is None:
        A = power_coefficients(cfg.N, cfg.mu)
        cached = A.T @ _beta(cfg)[:, 1:]
        object.__setattr__(cfg, "_power_to_nodal", cached)
    return cached


def diff_matrix(cfg, alpha):
    """D^alpha restricted to rows and columns 2..N."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"order must lie in [0, 1], got {alpha}")
    return _kernel(cfg, float(alpha), 0)


def diff_matrix_1p(cfg, alpha):
    """D^{1+alpha} restricted to rows and columns 2..N."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"order must lie in [0, 1], got {alpha}")
    return _kernel(cfg, float(alpha), 1)


def assemble_distributed_operator(cfg, dist):
    """Sum of (2/T)^alpha-scaled derivative matrices over the split alpha-quadrature."""
    quad = alpha_quadrature(dist, cfg.Q_alpha, split_at_one=True)
    A = np.zeros((cfg.N - 1, cfg.N - 1))
    for alpha, weight in quad:
        scale = weight * (2.0 / cfg.T) ** alpha
        if alpha <= 1.0:
            A += scale * diff_matrix(cfg, alpha)
        else:
            A += scale * diff_matrix_1p(cfg, alpha - 1.0)
    return A


def solve_collocation(cfg, dist, f, return_system=False):
    A = assemble_distributed_operator(cfg, dist)
    t = 0.5 * cfg.T * (cfg.nodes[1:] + 1.0)
    F = np.asarray(f(t), dtype=float) * np.ones_like(t)
    try:
        u = lu_solve(A, F)
    except SingularMatrixError as exc:
        raise SingularMatrixError(f"{exc}; cond2 = {cond2(A):.3e}") from exc
    sol = NodalSolution(np.concatenate([[0.0], u]), cfg.mu, cfg.T, cfg.nodes)
    return (sol, A, F) if return_system else sol


def eval_nodal(sol, t):
    t = np.asarray(t, dtype=float)
    xi = 2.0 * t / sol.T - 1.0
    x = sol.points
    frac = np.power(np.maximum(1.0 + xi, 0.0), sol.mu)
    val = np.zeros_like(xi)
    for j in range(1, x.size):
        val = val + sol.values[j] * _lagrange(x, j, xi) / (1.0 + x[j]) ** sol.mu
    val = frac * val
    return float(val) if val.ndim == 0 else val
