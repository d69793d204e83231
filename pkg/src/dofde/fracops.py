"""Jacobi poly-fractonomials and Riemann-Liouville derivatives on [-1, 1].

First kind:  (1 + xi)^mu P_{n-1}^{-mu, mu}(xi), vanishes at xi = -1.
Second kind: (1 - xi)^mu P_{n-1}^{mu, -mu}(xi), vanishes at xi = +1.

The left-sided derivative of a first-kind function (right-sided for the
second kind) of order sigma <= mu is again a poly-fractonomial of the same
kind and index with exponent mu - sigma, scaled by
Gamma(n + mu) / Gamma(n + mu - sigma).
"""

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
from scipy.integrate import quad

from .specfun import jacobi_eval

__all__ = [
    "Kind",
    "PolyFrac",
    "polyfrac_eval",
    "polyfrac_rl_deriv",
    "rl_deriv_power",
    "rl_integral_numeric",
    "rl_deriv_numeric",
    "OracleError",
]


class Kind(str, Enum):
    FIRST = "first"
    SECOND = "second"


class OracleError(RuntimeError):
    """The brute-force fractional-derivative oracle could not reach its tolerance."""


@dataclass(frozen=True)
class PolyFrac:
    kind: Kind
    n: int
    mu: float
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"index must be a positive integer, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        if self.mu < 0.0:
            raise ValueError("exponent must be non-negative")

    def __call__(self, xi):
        return polyfrac_eval(self, xi)


def polyfrac_eval(p, xi):
    xi = np.asarray(xi, dtype=float)
    if p.kind is Kind.FIRST:
        gap = 1.0 + xi
        poly = jacobi_eval(p.n - 1, -p.mu, xi, b=p.mu)
    else:
        gap = 1.0 - xi
        poly = jacobi_eval(p.n - 1, p.mu, xi, b=-p.mu)
    if p.mu == 0.0:
        val = p.scale * poly * np.ones_like(gap)
    else:
        val = p.scale * np.power(np.maximum(gap, 0.0), p.mu) * poly
    return float(val) if np.ndim(val) == 0 else val


def polyfrac_rl_deriv(p, sigma):
    """Exact RL derivative of order ``sigma`` (left for FIRST, right for SECOND)."""
    sigma = float(sigma)
    if not 0.0 < sigma <= p.mu:
        raise ValueError(f"order must satisfy 0 < sigma <= mu={p.mu}, got {sigma}")
    rest = p.mu - sigma
    if abs(rest) < 1e-15 * max(1.0, p.mu):
        rest = 0.0
    factor = math.gamma(p.n + p.mu) / math.gamma(p.n + rest)
    return replace(p, mu=rest, scale=p.scale * factor)


def rl_deriv_power(p, alpha, xi, side="left"):
    """Power rule: D^alpha (1 +- xi)^p = Gamma(p+1)/Gamma(p+1-alpha) (1 +- xi)^(p-alpha)."""
    if not p > 0.0:
        raise ValueError("power must be positive")
    if not 0.0 < alpha < p + 1.0:
        raise ValueError(f"order must lie in (0, p+1), got {alpha}")
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    xi = np.asarray(xi, dtype=float)
    gap = 1.0 + xi if side == "left" else 1.0 - xi
    val = math.gamma(p + 1.0) / math.gamma(p + 1.0 - alpha) * np.power(gap, p - alpha)
    return float(val) if np.ndim(val) == 0 else val


def rl_integral_numeric(f, order, xi, side="left", tol=1e-13, lead=0.0):
    """Brute-force RL integral of order ``order`` in (0, 1] anchored at -1 (left) or +1 (right).

    QUADPACK's algebraic-weight rule integrates g(s) (1 + s)^lead (xi - s)^(order - 1)
    with g = f / (1 + s)^lead, so a known leading power of f at the anchor costs
    nothing in accuracy.
    """
    if side == "right":
        return rl_integral_numeric(lambda s: f(-s), order, -xi, "left", tol, lead)
    if xi + 1.0 <= 0.0:
        return 0.0

    def integrand(s):
        if not lead:
            return f(s)
        # QUADPACK may sample the anchor itself, where f / gap^lead is 0 / 0
        s = max(s, -1.0 + 1e-12)
        return f(s) / (1.0 + s) ** lead

    val, err = quad(integrand, -1.0, xi, weight="alg", wvar=(lead, order - 1.0), epsabs=0.0, epsrel=tol, limit=400)
    if not math.isfinite(val) or err > 1e3 * tol * max(abs(val), 1e-300):
        raise OracleError(f"RL integral did not converge at xi={xi} (est. err {err:.3g})")
    return val / math.gamma(order)


def rl_deriv_numeric(f, alpha, xi, side="left", h=None, levels=5, lead=0.0):
    """Brute-force RL derivative of order alpha in (0, 1).

    Differentiates the numerically computed I^(1-alpha) f by central
    differences and Richardson extrapolation.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("numeric oracle supports 0 < alpha < 1")
    if not -1.0 < xi < 1.0:
        raise ValueError("evaluation point must be interior")
    if side == "right":
        return rl_deriv_numeric(lambda s: f(-s), alpha, -xi, "left", h, levels, lead)
    order = 1.0 - alpha
    if h is None:
        h = 0.25 * min(xi + 1.0, 1.0 - xi, 0.5)

    def integral(x):
        return rl_integral_numeric(f, order, x, lead=lead)

    table = []
    scale = 0.0
    for lev in range(levels):
        hl = h / 2**lev
        up = integral(xi + hl)
        row = [(up - integral(xi - hl)) / (2.0 * hl)]
        # |I| / distance to the anchor sizes the derivative where it happens to vanish
        scale = max(scale, abs(up) / (xi + 1.0 + hl))
        for j in range(1, lev + 1):
            prev = table[lev - 1][j - 1]
            row.append(row[j - 1] + (row[j - 1] - prev) / (4.0**j - 1.0))
        table.append(row)
    best, last = table[-1][-1], table[-1][-2]
    if abs(best - last) > 1e-7 * max(abs(best), scale):
        raise OracleError(f"Richardson extrapolation stalled at xi={xi}: {best} vs {last}")
    return best
