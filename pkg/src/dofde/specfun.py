"""Gamma function, generalized binomials and Jacobi polynomials for real parameters.

Jacobi polynomials are evaluated by the three-term recurrence

    c_m P_{m+1} = (d_m + e_m x) P_m - g_m P_{m-1}

seeded with P_0 = 1 and the closed form
P_1 = (a - b)/2 + (a + b + 2) x / 2.  Seeding P_1 directly sidesteps the
vanishing recurrence denominator that appears at m = 0 when a + b = 0,
which is exactly the (-mu, mu) family used by poly-fractonomials.
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "JacobiParams",
    "gamma_fn",
    "gen_binomial",
    "jacobi_eval",
    "jacobi_all",
    "jacobi_weighted_norm",
]


@dataclass(frozen=True)
class JacobiParams:
    """Exponent pair (a, b) of the weight (1 - x)^a (1 + x)^b."""

    a: float
    b: float

    def __post_init__(self):
        if not (self.a > -2.0 and self.b > -2.0):
            raise ValueError(f"Jacobi parameters must exceed -2, got ({self.a}, {self.b})")

    def __iter__(self):
        return iter((self.a, self.b))


def gamma_fn(x):
    """Gamma function on the positive real axis."""
    x = float(x)
    if not x > 0.0:
        raise ValueError(f"gamma_fn requires x > 0, got {x}")
    return math.gamma(x)


def gen_binomial(p, q):
    """Generalized binomial coefficient (p choose q) for real p and integer q >= 0."""
    q = int(q)
    if q < 0:
        raise ValueError("q must be a non-negative integer")
    p = float(p)
    if p + 1.0 > 0.0 and p - q + 1.0 > 0.0:
        return math.gamma(p + 1.0) / (math.gamma(q + 1.0) * math.gamma(p - q + 1.0))
    out = 1.0
    for i in range(q):
        out *= (p - i) / (i + 1)
    return out


def _params(params, b=None):
    if b is not None:
        return float(params), float(b)
    if isinstance(params, JacobiParams):
        return params.a, params.b
    a, b = params
    return float(a), float(b)


def jacobi_all(nmax, a, b, x):
    """Return P_0..P_nmax of parameters (a, b) at x, stacked along axis 0."""
    if nmax < 0:
        raise ValueError("nmax must be non-negative")
    x = np.asarray(x, dtype=float)
    out = np.empty((nmax + 1,) + x.shape)
    out[0] = 1.0
    if nmax == 0:
        return out
    s = a + b
    out[1] = 0.5 * (a - b) + 0.5 * (s + 2.0) * x
    for m in range(1, nmax):
        k = 2.0 * m + s
        c = 2.0 * (m + 1) * (m + s + 1.0) * k
        if c == 0.0:
            raise ZeroDivisionError(f"degenerate Jacobi recurrence at m={m}, a+b={s}")
        d = (k + 1.0) * (a * a - b * b)
        e = k * (k + 1.0) * (k + 2.0)
        g = 2.0 * (m + a) * (m + b) * (k + 2.0)
        out[m + 1] = ((d + e * x) * out[m] - g * out[m - 1]) / c
    return out


def jacobi_eval(n, params, x, b=None):
    """P_n^{a,b}(x).

    ``params`` is a :class:`JacobiParams`, an (a, b) pair, or the scalar a
    with b passed separately.  ``x`` may be a scalar or an array.
    """
    n = int(n)
    if n < 0:
        raise ValueError("degree must be non-negative")
    a, b = _params(params, b)
    val = jacobi_all(n, a, b, x)[n]
    return float(val) if val.ndim == 0 else val


def jacobi_weighted_norm(k, mu_tilde):
    """Squared norm of P_{k-1}^{mu,-mu} under the weight (1-x)^mu (1+x)^-mu."""
    k = int(k)
    mu = float(mu_tilde)
    if k < 1:
        raise ValueError("k must be a positive integer")
    if abs(mu) >= 1.0:
        raise ValueError(f"|mu_tilde| must be below 1, got {mu}")
    return (2.0 / (2 * k - 1)) * math.gamma(k + mu) * math.gamma(k - mu) / (
        math.factorial(k - 1) * math.gamma(k)
    )
