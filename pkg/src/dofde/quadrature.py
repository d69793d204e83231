"""Gauss-Legendre, Gauss-Jacobi and Gauss-Lobatto-Jacobi rules.

Nodes and weights come from the Golub-Welsch eigenproblem of the symmetric
tridiagonal Jacobi matrix built from the monic recurrence coefficients.
Lobatto rules replace the last recurrence pair so that the degree-Q monic
polynomial vanishes at both endpoints.

A double-exponential (tanh-sinh) rule is also provided for integrands with
algebraic or logarithmic endpoint singularities; it stores the distance of
each node to both endpoints so that no precision is lost to rounding near
the ends.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import poch

from .specfun import jacobi_all

__all__ = [
    "QuadratureRule",
    "EndpointRule",
    "gauss_legendre",
    "gauss_jacobi",
    "gauss_lobatto_jacobi",
    "map_to_interval",
    "tanh_sinh",
    "jacobi_moment",
]


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    kind: str
    params: tuple = ()
    interval: tuple = (-1.0, 1.0)

    def __post_init__(self):
        for name in ("nodes", "weights"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.nodes.shape != self.weights.shape:
            raise ValueError("nodes and weights differ in length")
        lo, hi = map(float, self.interval)
        if not lo < hi:
            raise ValueError("interval must satisfy lo < hi")
        object.__setattr__(self, "interval", (lo, hi))

    def __len__(self):
        return self.nodes.size

    def integrate(self, values):
        """Weighted sum of samples taken at the nodes."""
        return float(np.dot(self.weights, values))


@dataclass(frozen=True, eq=False)
class EndpointRule:
    """Rule on [-1, 1] with nodes given by their gaps to both ends."""

    left_gap: np.ndarray
    right_gap: np.ndarray
    weights: np.ndarray

    @property
    def nodes(self):
        return np.where(self.left_gap < self.right_gap, self.left_gap - 1.0, 1.0 - self.right_gap)


def jacobi_moment(a, b):
    """Zeroth moment of (1 - x)^a (1 + x)^b on [-1, 1]."""
    return math.exp(
        (a + b + 1.0) * math.log(2.0)
        + math.lgamma(a + 1.0)
        + math.lgamma(b + 1.0)
        - math.lgamma(a + b + 2.0)
    )


def _check_ab(a, b):
    if not (a > -1.0 and b > -1.0):
        raise ValueError(f"weight (1-x)^{a} (1+x)^{b} is not integrable")


def _recurrence(Q, a, b):
    """Diagonal and squared off-diagonal of the monic Jacobi recurrence."""
    m = np.arange(Q, dtype=float)
    s = a + b
    diag = np.empty(Q)
    diag[0] = (b - a) / (s + 2.0)
    k = 2.0 * m[1:] + s
    diag[1:] = (b * b - a * a) / (k * (k + 2.0))
    off2 = np.empty(max(Q - 1, 0))
    if Q > 1:
        off2[0] = 4.0 * (a + 1.0) * (b + 1.0) / ((s + 2.0) ** 2 * (s + 3.0))
        j = m[2:]
        k = 2.0 * j + s
        off2[1:] = 4.0 * j * (j + a) * (j + b) * (j + s) / (k * k * (k + 1.0) * (k - 1.0))
    return diag, off2


def _golub_welsch(diag, off2, mu0):
    if diag.size == 1:
        return diag.copy(), np.array([mu0])
    x, vec = eigh_tridiagonal(diag, np.sqrt(off2))
    w = mu0 * vec[0] ** 2
    return x, w


def _polish(Q, a, b, x):
    """One Newton step on P_Q, then weights from the closed-form Christoffel numbers."""
    def deriv(x):
        return 0.5 * (Q + a + b + 1.0) * jacobi_all(Q - 1, a + 1.0, b + 1.0, x)[Q - 1]

    x = x - jacobi_all(Q, a, b, x)[Q] / deriv(x)
    # Gamma(Q+a+1) Gamma(Q+b+1) / (Gamma(Q+a+b+1) Q!) as Pochhammer ratios; lgamma differences lose digits at large Q
    c = 2.0 ** (a + b + 1.0) * poch(Q + 1.0, a) / poch(Q + b + 1.0, a)
    w = c / ((1.0 - x) * (1.0 + x) * deriv(x) ** 2)
    return x, w


@lru_cache(maxsize=4096)
def _gauss_jacobi_cached(Q, a, b):
    diag, off2 = _recurrence(Q, a, b)
    x, w = _golub_welsch(diag, off2, jacobi_moment(a, b))
    return _polish(Q, a, b, x)


def gauss_jacobi(Q, a, b):
    """Q-point Gauss rule for the weight (1 - x)^a (1 + x)^b on [-1, 1]."""
    Q = int(Q)
    if Q < 1:
        raise ValueError("Q must be a positive integer")
    a, b = float(a), float(b)
    _check_ab(a, b)
    x, w = _gauss_jacobi_cached(Q, a, b)
    return QuadratureRule(x, w, "Jacobi", (a, b))


def gauss_legendre(Q):
    """Q-point Gauss-Legendre rule on [-1, 1]."""
    r = gauss_jacobi(Q, 0.0, 0.0)
    return QuadratureRule(r.nodes, r.weights, "Legendre")


@lru_cache(maxsize=1024)
def _lobatto_cached(Q, a, b):
    diag, off2 = _recurrence(Q, a, b)
    n = Q - 2
    s = a + b
    diag[-1] = (a - b) / (2.0 * n + s + 2.0)
    if n == 0:
        off2[-1] = 4.0 * (a + 1.0) * (b + 1.0) / (s + 2.0) ** 2
    else:
        k = 2.0 * n + s
        off2[-1] = 4.0 * (n + a + 1.0) * (n + b + 1.0) * (n + s + 1.0) / (
            (k + 1.0) * (k + 2.0) ** 2
        )
    x, w = _golub_welsch(diag, off2, jacobi_moment(a, b))
    x[0], x[-1] = -1.0, 1.0
    return x, w


def gauss_lobatto_jacobi(Q, a, b):
    """Q-point Lobatto rule (both endpoints included) for (1 - x)^a (1 + x)^b."""
    Q = int(Q)
    if Q < 2:
        raise ValueError("Lobatto rules need Q >= 2")
    a, b = float(a), float(b)
    _check_ab(a, b)
    x, w = _lobatto_cached(Q, a, b)
    return QuadratureRule(x, w, "LobattoJacobi", (a, b))


def map_to_interval(rule, lo, hi):
    """Affine image of ``rule`` on [lo, hi]; weights pick up the Jacobian."""
    lo, hi = float(lo), float(hi)
    if not lo < hi:
        raise ValueError(f"empty interval [{lo}, {hi}]")
    lo0, hi0 = rule.interval
    scale = (hi - lo) / (hi0 - lo0)
    nodes = lo + (rule.nodes - lo0) * scale
    return QuadratureRule(nodes, rule.weights * scale, rule.kind, rule.params, (lo, hi))


@lru_cache(maxsize=16)
def _tanh_sinh_cached(level, tmax):
    h = 2.0 ** -level
    k = np.arange(-int(math.ceil(tmax / h)), int(math.ceil(tmax / h)) + 1)
    s = k * h
    u = 0.5 * math.pi * np.sinh(s)
    e = np.exp(-2.0 * np.abs(u))
    small = 2.0 * e / (1.0 + e)
    big = 2.0 / (1.0 + e)
    left = np.where(u < 0, small, big)
    right = np.where(u < 0, big, small)
    # 1/cosh(u)^2 = 4 e / (1 + e)^2 with e = exp(-2|u|)
    w = h * 0.5 * math.pi * np.cosh(s) * 4.0 * e / (1.0 + e) ** 2
    keep = (w > 0.0) & (left > 0.0) & (right > 0.0)
    return left[keep], right[keep], w[keep]


def tanh_sinh(level=6, tmax=6.1):
    """Tanh-sinh rule on [-1, 1] with step 2^-level, truncated at |s| <= tmax."""
    left, right, w = _tanh_sinh_cached(int(level), float(tmax))
    return EndpointRule(left, right, w)
