"""Distribution functions phi(alpha) and their alpha-quadrature.

A distribution is either a pointwise density on [alpha_min, alpha_max] or a
finite list of Dirac atoms (the multi-term operator).  Catalog densities are
truncated to the support and renormalized; manufactured densities are kept
exactly as given because their forcings were derived for that phi.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .quadrature import gauss_legendre, map_to_interval

__all__ = [
    "DistributionSpec",
    "AlphaQuadrature",
    "FAMILIES",
    "default_params",
    "make_named",
    "make_manufactured",
    "make_atoms",
    "alpha_quadrature",
]


def _truncated_mass(frozen, lo, hi):
    # differencing whichever tail is smaller keeps the mass accurate far from the mode
    if frozen.cdf(lo) > 0.5:
        return float(frozen.sf(lo) - frozen.sf(hi))
    return float(frozen.cdf(hi) - frozen.cdf(lo))


@dataclass(frozen=True, eq=False)
class DistributionSpec:
    support: tuple
    density: object = None
    atoms: tuple = None
    normalized: bool = False
    label: str = ""

    def __post_init__(self):
        lo, hi = map(float, self.support)
        if not 0.0 <= lo < hi <= 2.0:
            raise ValueError(f"support must satisfy 0 <= lo < hi <= 2, got ({lo}, {hi})")
        object.__setattr__(self, "support", (lo, hi))
        if (self.density is None) == (self.atoms is None):
            raise ValueError("exactly one of density or atoms must be given")

    @property
    def is_atoms(self):
        return self.atoms is not None

    @property
    def alpha_min(self):
        return self.support[0]

    @property
    def alpha_max(self):
        if self.is_atoms:
            return max(a for a, _ in self.atoms)
        return self.support[1]

    def __call__(self, alpha):
        if self.is_atoms:
            raise TypeError("an atom distribution has no pointwise density")
        return self.density(np.asarray(alpha, dtype=float))


@dataclass(frozen=True, eq=False)
class AlphaQuadrature:
    """(alpha_q, combined weight) pairs discretizing int phi(alpha) (.) d alpha."""

    alphas: np.ndarray
    weights: np.ndarray
    exact: bool = False

    def __iter__(self):
        return zip(self.alphas.tolist(), self.weights.tolist())

    def __len__(self):
        return self.alphas.size

    @property
    def pairs(self):
        return list(self)

    def total(self):
        return math.fsum(self.weights.tolist())


def _vectorize(fn):
    def density(alpha):
        alpha = np.asarray(alpha, dtype=float)
        return np.asarray(fn(alpha), dtype=float) * np.ones_like(alpha)

    return density


def _frozen(name, params, support):
    lo, hi = support
    p = dict(params)
    if name == "Uniform":
        return stats.uniform(loc=lo, scale=hi - lo)
    if name == "Normal":
        return stats.norm(loc=p["mean"], scale=p["sd"])
    if name == "LogNormal":
        return stats.lognorm(s=p["sigma"], scale=math.exp(p["mu"]))
    if name == "Exponential":
        return stats.expon(scale=1.0 / p["rate"])
    if name == "Cauchy":
        return stats.cauchy(loc=p["loc"], scale=p["scale"])
    if name == "Laplace":
        return stats.laplace(loc=p["loc"], scale=p["scale"])
    if name == "Beta":
        return stats.beta(p["a"], p["b"], loc=lo, scale=hi - lo)
    if name == "Maxwell":
        return stats.maxwell(scale=p["scale"])
    raise ValueError(f"unknown distribution family {name!r}")


FAMILIES = ("Uniform", "Normal", "LogNormal", "Exponential", "Cauchy", "Laplace", "Beta", "Maxwell")

_POSITIVE = {
    "Normal": ("sd",),
    "LogNormal": ("sigma",),
    "Exponential": ("rate",),
    "Cauchy": ("scale",),
    "Laplace": ("scale",),
    "Beta": ("a", "b"),
    "Maxwell": ("scale",),
}

_REQUIRED = {
    "Uniform": (),
    "Normal": ("mean", "sd"),
    "LogNormal": ("mu", "sigma"),
    "Exponential": ("rate",),
    "Cauchy": ("loc", "scale"),
    "Laplace": ("loc", "scale"),
    "Beta": ("a", "b"),
    "Maxwell": ("scale",),
}


def default_params(name, support, bias="symmetric"):
    """Documented default parameters placing the mass left, centre or right of the support."""
    lo, hi = map(float, support)
    width = hi - lo
    where = {"left": 0.25, "symmetric": 0.5, "right": 0.75}
    if bias not in where:
        raise ValueError("bias must be 'left', 'symmetric' or 'right'")
    centre = lo + where[bias] * width
    if name == "Uniform":
        return {}
    if name == "Normal":
        return {"mean": centre, "sd": width / 6.0}
    if name == "Cauchy":
        return {"loc": centre, "scale": width / 10.0}
    if name == "Laplace":
        return {"loc": centre, "scale": width / 8.0}
    if name == "Beta":
        return {"left": {"a": 2.0, "b": 5.0}, "symmetric": {"a": 3.0, "b": 3.0}, "right": {"a": 5.0, "b": 2.0}}[bias]
    if name == "Exponential":
        return {"rate": 4.0 / width}
    if name == "LogNormal":
        # mode exp(mu - sigma^2) placed at the chosen centre
        sigma = 0.5
        return {"mu": math.log(max(centre, 1e-3)) + sigma**2, "sigma": sigma}
    if name == "Maxwell":
        # mode sqrt(2) * scale placed at the chosen centre
        return {"scale": max(centre, 1e-3) / math.sqrt(2.0)}
    raise ValueError(f"unknown distribution family {name!r}")


def make_named(name, params=None, support=(0.0, 1.0)):
    """Catalog density truncated to ``support`` and normalized to unit mass."""
    if name not in FAMILIES:
        raise ValueError(f"unknown distribution family {name!r}; choose from {FAMILIES}")
    params = dict(default_params(name, support) if params is None else params)
    missing = [k for k in _REQUIRED[name] if k not in params]
    if missing:
        raise ValueError(f"{name} needs parameters {missing}")
    bad = [k for k in _POSITIVE.get(name, ()) if not params[k] > 0.0]
    if bad:
        raise ValueError(f"{name} parameters {bad} must be positive")
    lo, hi = map(float, support)
    if not 0.0 <= lo < hi <= 2.0:
        raise ValueError(f"support must lie in [0, 2], got ({lo}, {hi})")
    frozen = _frozen(name, params, (lo, hi))
    mass = _truncated_mass(frozen, lo, hi)
    if not (math.isfinite(mass) and mass > 0.0):
        raise ValueError(f"{name} density has no mass on ({lo}, {hi})")

    def density(alpha):
        alpha = np.asarray(alpha, dtype=float)
        inside = (alpha >= lo) & (alpha <= hi)
        return np.where(inside, frozen.pdf(alpha) / mass, 0.0)

    return DistributionSpec((lo, hi), density=density, normalized=True, label=name)


def make_manufactured(phi, support, label="manufactured"):
    """Unnormalized density used exactly as given."""
    lo, hi = map(float, support)
    density = _vectorize(phi)
    scan = density(np.linspace(lo, hi, 1000))
    if np.any(scan < 0.0) or not np.all(np.isfinite(scan)):
        raise ValueError("distribution must be finite and non-negative on its support")
    return DistributionSpec((lo, hi), density=density, normalized=False, label=label)


def make_atoms(atoms, support=(0.0, 2.0), label="atoms"):
    """Multi-term operator sum_p w_p D^{alpha_p}."""
    atoms = tuple((float(a), float(w)) for a, w in atoms)
    if not atoms:
        raise ValueError("at least one atom is required")
    lo, hi = map(float, support)
    orders = [a for a, _ in atoms]
    if len(set(orders)) != len(orders):
        raise ValueError(f"duplicate atoms in {orders}")
    for a, w in atoms:
        if not lo <= a <= hi:
            raise ValueError(f"atom {a} outside support ({lo}, {hi})")
        if not w > 0.0:
            raise ValueError(f"atom weight {w} must be positive")
    return DistributionSpec((lo, hi), atoms=atoms, label=label)


def alpha_quadrature(spec, Q=50, split_at_one=False):
    """Gauss-Legendre discretization of the alpha-integral.

    With ``split_at_one`` and alpha_max > 1 the support is cut at alpha = 1
    and each piece receives its own Q-point rule.
    """
    if spec.is_atoms:
        a, w = zip(*spec.atoms)
        return AlphaQuadrature(np.array(a), np.array(w), exact=True)
    Q = int(Q)
    if Q < 1:
        raise ValueError("Q must be a positive integer")
    lo, hi = spec.support
    pieces = [(lo, hi)]
    if split_at_one and lo < 1.0 < hi:
        pieces = [(lo, 1.0), (1.0, hi)]
    alphas, weights = [], []
    base = gauss_legendre(Q)
    for a, b in pieces:
        rule = map_to_interval(base, a, b)
        alphas.append(rule.nodes)
        weights.append(rule.weights * spec(rule.nodes))
    return AlphaQuadrature(np.concatenate(alphas), np.concatenate(weights))
