import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import gamma, rgamma

from dofde.cases import CASE_IDS, GUARD, make_case, normalize_case_id

T_POINTS = np.linspace(0.05, 2.0, 20)


def nested_forcing(case, t):
    """int phi(a) D^a u*(t) da with D^a applied termwise by the power rule and adaptive quadrature in a."""
    lo, hi = case.support
    if case.dist.is_atoms:
        return sum(w * _power_deriv(case.terms, a, t) for a, w in case.dist.atoms)
    return quad(lambda a: case.dist(a) * _power_deriv(case.terms, a, t), lo, hi, epsabs=0.0, epsrel=1e-12, limit=200)[0]


def _power_deriv(terms, a, t):
    return sum(c * gamma(p + 1) * rgamma(p + 1 - a) * t ** (p - a) for c, p in terms)


@pytest.mark.parametrize(
    "id,kw",
    [("I", {}), ("II", {}), ("III", {"mu0": 0.1}), ("III", {"mu0": 0.6}),
     ("IV", {"mu0": 0.75}), ("IV", {"mu0": 0.25, "phi": "normal"}), ("MultiTerm", {})],
)
def test_forcing_consistency(id, kw):
    case = make_case(id, **kw)
    got = case(T_POINTS)
    want = np.array([nested_forcing(case, t) for t in T_POINTS])
    assert np.max(np.abs(got - want) / np.maximum(np.abs(want), 1.0)) <= 1e-6


@pytest.mark.parametrize("id", ["I", "III"])
def test_guard_continuity_at_one(id):
    case = make_case(id)
    inside = case(np.array([1.0, 1.0 + 0.5 * GUARD]))
    outside = case(np.array([1.0 + 4 * GUARD, 1.0 - 4 * GUARD]))
    assert np.all(np.isfinite(inside))
    assert abs(inside[0] - outside.mean()) <= 1e-4


def test_case_i_limit_value():
    assert make_case("I")(1.0) == pytest.approx(2.0, rel=1e-15)


def test_case_ii_guard():
    # the removable singularity at log t = -1 is the only one inside (0, 2]
    t = math.exp(-1.0)
    case = make_case("II")
    near = case(np.array([t, t * (1 + 1e-3), t * (1 - 1e-3)]))
    assert np.all(np.isfinite(near))
    assert abs(near[0] - 0.5 * (near[1] + near[2])) <= 1e-2 * abs(near[0])
    assert near[0] == pytest.approx(nested_forcing(case, t), rel=1e-6)


def test_positive_time_only():
    with pytest.raises(ValueError):
        make_case("I")(0.0)


def test_case_iv_series():
    case = make_case("IV", mu0=0.75)
    t = np.linspace(0.0, 2.0, 11)
    assert np.max(np.abs(case.exact(t) - t**0.75 * np.sin(t))) <= 1e-15
    assert case.dist.normalized


def test_exact_derivative():
    case = make_case("I")
    assert case.exact_rl_deriv(0.5, 1.2) == pytest.approx(120 / math.gamma(5.5) * 1.2**4.5, rel=1e-14)
    assert case.exact_rl_deriv(0.0, 1.2) == case.exact(1.2)


@pytest.mark.parametrize(
    "raw,canonical",
    [("I", "I"), ("iv", "IV"), ("multi", "MultiTerm"), ("Multi-Term", "MultiTerm"), ("V", None), (3, None)],
)
def test_normalize_case_id(raw, canonical):
    assert normalize_case_id(raw) == canonical


def test_all_ids_build():
    for id in CASE_IDS:
        assert make_case(id).id == id


@pytest.mark.parametrize("kw", [{"mu0": 1.2}, {"mu0": 0.0}])
def test_bad_mu0(kw):
    with pytest.raises(ValueError):
        make_case("III", **kw)


def test_bad_case():
    with pytest.raises(ValueError):
        make_case("VII")


@pytest.mark.parametrize(
    "id,t0,limit",
    [("I", 1.0, 2.0), ("II", math.exp(-1.0), 1.5 * math.e - 7.5 * math.exp(-3.0)), ("III", 1.0, 1.0)],
)
def test_guard_band_limits(id, t0, limit):
    case = make_case(id)
    assert case(t0) == pytest.approx(limit, rel=1e-12)
    for dt in (1e-7, -1e-7):
        assert abs(case(t0 + dt) - limit) <= 1e-5


def test_case_ii_limit_by_richardson():
    case = make_case("II")
    t0 = math.exp(-1.0)
    # outside the guard band the direct formula is used on both sides
    h = 1e-4
    sym = lambda h: 0.5 * (case(t0 * (1 + h)) + case(t0 * (1 - h)))
    extrapolated = (4 * sym(h / 2) - sym(h)) / 3
    assert extrapolated == pytest.approx(case(t0), rel=1e-8)


def test_trivial_values():
    assert make_case("I").exact(2.0) == 32.0
    assert make_case("III", mu0=0.9).exact(1.0) == 1.0
    assert make_case("I")(1e-12) == pytest.approx(0.0, abs=1e-30)
    assert np.all(make_case("IV").exact(np.zeros(1)) == 0.0)
