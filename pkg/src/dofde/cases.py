"""Manufactured test problems with known exact solutions.

Every exact solution is a finite (or rapidly convergent) sum of powers
c t^p, so its Riemann-Liouville derivatives follow from the power rule.
Forcings with removable singularities are evaluated through their limit
expansions inside a narrow band in log t.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as _gamma
from scipy.special import rgamma

from .distribution import alpha_quadrature, make_atoms, make_manufactured, make_named

__all__ = ["ManufacturedCase", "CASE_IDS", "GUARD", "make_case", "normalize_case_id", "eval_forcing_guarded"]

CASE_IDS = ("I", "II", "III", "IV", "MultiTerm")
GUARD = 1e-6
MULTI_TERM_ATOMS = ((0.1, 1.0), (0.5, 1.0), (1.3, 1.0), (1.9, 1.0))

_SINH2 = math.sinh(2.0)
_COSH2 = math.cosh(2.0)


@dataclass(frozen=True, eq=False)
class ManufacturedCase:
    id: str
    terms: tuple
    forcing: object
    dist: object
    mu_note: str
    T: float = 2.0
    load_rule: str = "jacobi"
    params: tuple = ()

    @property
    def support(self):
        return self.dist.support

    def exact(self, t):
        t = np.asarray(t, dtype=float)
        val = sum(c * np.power(t, p) for c, p in self.terms)
        return float(val) if np.ndim(val) == 0 else val

    def exact_rl_deriv(self, s, t):
        """Left RL derivative of order s >= 0 of the exact solution (t > 0)."""
        t = np.asarray(t, dtype=float)
        if s == 0.0:
            return self.exact(t)
        val = sum(c * _gamma(p + 1.0) * rgamma(p + 1.0 - s) * np.power(t, p - s) for c, p in self.terms)
        return float(val) if np.ndim(val) == 0 else val

    def __call__(self, t):
        return eval_forcing_guarded(self, t)


def _positive(t):
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0.0)):
        raise ValueError("forcing is defined for t > 0 only")
    return t


def _forcing_I(t):
    t = _positive(t)
    L = np.log(t)
    near = np.abs(L) < GUARD
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = (t**5 - t**3) / L
    return np.where(near, 2.0 + 8.0 * L, direct)


def _forcing_II(t):
    t = _positive(t)
    L = np.log(t)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = 6.0 * t * (t * t - _COSH2 - _SINH2 * L) / (L * L - 1.0)
    # h(L) = exp(2L) - cosh 2 - sinh(2) L vanishes at L = +-1
    e = L + 1.0
    near = np.abs(e) < GUARD
    h1, h2 = 2.0 * math.exp(-2.0) - _SINH2, 4.0 * math.exp(-2.0)
    out = np.where(near, -3.0 * math.exp(-1.0) * (h1 + (1.5 * h1 + 0.5 * h2) * e), out)
    e = L - 1.0
    near = np.abs(e) < GUARD
    h1, h2 = 2.0 * math.exp(2.0) - _SINH2, 4.0 * math.exp(2.0)
    return np.where(near, 3.0 * math.e * (h1 + 0.5 * (h1 + h2) * e), out)


def _forcing_III(mu0):
    def forcing(t):
        t = _positive(t)
        L = np.log(t)
        near = np.abs(L) < GUARD
        with np.errstate(divide="ignore", invalid="ignore"):
            direct = (t**mu0 - t ** (mu0 - 1.0)) / L
        return np.where(near, 1.0 + (mu0 - 0.5) * L, direct)

    return forcing


def _forcing_from_terms(terms, dist, Q=50):
    """f(t) = int phi(alpha) D^alpha u*(t) d alpha by Gauss-Legendre in alpha."""
    quad = alpha_quadrature(dist, Q)
    coef = np.array([c for c, _ in terms])
    power = np.array([p for _, p in terms])

    def forcing(t):
        t = _positive(t)
        flat = t.reshape(-1)
        logt = np.log(flat)
        total = np.zeros_like(flat)
        for alpha, w in quad:
            g = coef * _gamma(power + 1.0) * rgamma(power + 1.0 - alpha)
            total += w * (g @ np.exp(np.outer(power - alpha, logt)))
        return total.reshape(t.shape)

    return forcing


def _sin_series(mu0, tmax):
    """Taylor terms of t^mu0 sin t, truncated once the term ratio at tmax drops below 1e-16."""
    terms = []
    for k in range(60):
        ratio = tmax ** (2 * k) / math.factorial(2 * k + 1)
        terms.append(((-1.0) ** k / math.factorial(2 * k + 1), mu0 + 2 * k + 1))
        if ratio < 1e-16:
            break
    return tuple(terms)


def normalize_case_id(id):
    """Canonical case id, or None if ``id`` names no case."""
    key = str(id)
    if key.lower() in ("multi", "multiterm", "multi-term", "mt"):
        return "MultiTerm"
    return key.upper() if key.upper() in CASE_IDS else None


def make_case(id, mu0=None, phi="uniform", normal=(0.5, 0.15), atoms=None, T=2.0):
    """Build one of the manufactured problems I, II, III, IV or MultiTerm."""
    key = normalize_case_id(id)
    if key is None:
        raise ValueError(f"unknown case {id!r}; choose from {CASE_IDS}")
    T = float(T)
    if key == "I":
        dist = make_manufactured(lambda a: _gamma(6.0 - a) / 120.0, (0.0, 2.0), "Gamma(6-a)/120")
        return ManufacturedCase("I", ((1.0, 5.0),), _forcing_I, dist, "mu in (1, 2)", T)
    if key == "II":
        dist = make_manufactured(lambda a: _gamma(4.0 - a) * np.sinh(a), (0.0, 2.0), "Gamma(4-a)sinh(a)")
        return ManufacturedCase("II", ((1.0, 3.0),), _forcing_II, dist, "mu in (1, 2)", T)
    if key == "III":
        mu0 = 0.1 if mu0 is None else float(mu0)
        if not 0.0 < mu0 < 1.0:
            raise ValueError("mu0 must lie in (0, 1)")
        g0 = math.gamma(1.0 + mu0)
        dist = make_manufactured(lambda a: _gamma(1.0 + mu0 - a) / g0, (0.0, 1.0), "Gamma(1+mu0-a)/Gamma(1+mu0)")
        return ManufacturedCase(
            "III", ((1.0, mu0),), _forcing_III(mu0), dist, f"mu = mu0 = {mu0} captures the solution",
            T, load_rule="tanh-sinh", params=(("mu0", mu0),),
        )
    if key == "IV":
        mu0 = 0.75 if mu0 is None else float(mu0)
        if not 0.0 < mu0 < 1.0:
            raise ValueError("mu0 must lie in (0, 1)")
        if phi == "uniform":
            dist = make_named("Uniform", {}, (0.0, 1.0))
        elif phi == "normal":
            dist = make_named("Normal", {"mean": normal[0], "sd": normal[1]}, (0.0, 1.0))
        else:
            raise ValueError("Case IV phi must be 'uniform' or 'normal'")
        terms = _sin_series(mu0, T)
        return ManufacturedCase(
            "IV", terms, _forcing_from_terms(terms, dist), dist, f"mu = mu0 = {mu0}", T,
            load_rule="tanh-sinh", params=(("mu0", mu0), ("phi", phi)),
        )
    atoms = MULTI_TERM_ATOMS if atoms is None else tuple(atoms)
    dist = make_atoms(atoms, (0.0, 2.0), "multi-term")

    def forcing(t):
        t = _positive(t)
        return sum(w * 120.0 / math.gamma(6.0 - a) * t ** (5.0 - a) for a, w in atoms)

    return ManufacturedCase("MultiTerm", ((1.0, 5.0),), forcing, dist, "mu in (0, 1) for collocation", T,
                            params=(("atoms", atoms),))


def eval_forcing_guarded(case, t):
    """Forcing of ``case`` at t in (0, T], limit expansions near removable singularities."""
    val = case.forcing(np.asarray(t, dtype=float))
    return float(val) if np.ndim(val) == 0 else val
