import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dofde.specfun import JacobiParams, gamma_fn, gen_binomial, jacobi_all, jacobi_eval, jacobi_weighted_norm

# frozen from mpmath at 40 digits
GAMMA_7_3 = 1271.4236336639088399
P5_035_M035_AT_M02 = -0.17178742968750002676
NORM_K3_MU025 = 0.41001214614840391635


def binomial_sum(n, a, b, x):
    """P_n^{a,b}(x) = sum_s C(n+a, n-s) C(n+b, s) ((x-1)/2)^s ((x+1)/2)^(n-s)."""
    x = mpmath.mpf(x)
    return float(
        sum(
            mpmath.binomial(n + a, n - s) * mpmath.binomial(n + b, s) * ((x - 1) / 2) ** s * ((x + 1) / 2) ** (n - s)
            for s in range(n + 1)
        )
    )


def exact_norm(k, mu):
    """int (1-x)^mu (1+x)^-mu (P_{k-1}^{mu,-mu})^2 dx from the (1+x)-power expansion and Beta moments."""
    with mpmath.workdps(50):
        mu = mpmath.mpf(mu)
        n = k - 1
        # P_n^{a,b}(x) = (-1)^n G(b+n+1)/(n! G(a+b+n+1)) sum_m C(n,m) G(a+b+n+m+1)/G(b+m+1) (-(1+x)/2)^m
        a, b = mu, -mu
        pre = (-1) ** n * mpmath.gamma(b + n + 1) / (mpmath.factorial(n) * mpmath.gamma(a + b + n + 1))
        c = [
            pre * mpmath.binomial(n, m) * mpmath.gamma(a + b + n + m + 1) / mpmath.gamma(b + m + 1) * (-0.5) ** m
            for m in range(n + 1)
        ]
        total = mpmath.mpf(0)
        for i in range(n + 1):
            for j in range(n + 1):
                p = i + j - mu
                total += c[i] * c[j] * 2 ** (mu + p + 1) * mpmath.beta(mu + 1, p + 1)
        return float(total)


class TestGamma:
    def test_unit(self):
        assert gamma_fn(1.0) == 1.0

    def test_half(self):
        assert gamma_fn(0.5) == pytest.approx(1.7724538509055160, rel=1e-15)

    def test_frozen_oracle(self):
        assert gamma_fn(7.3) == pytest.approx(GAMMA_7_3, rel=1e-12)

    @pytest.mark.parametrize("x", [0.1, 0.5, 1.7, 10.3])
    def test_functional_equation(self, x):
        assert gamma_fn(x + 1.0) == pytest.approx(x * gamma_fn(x), rel=1e-12)

    @pytest.mark.parametrize("x", [0.0, -0.5, -3.0])
    def test_domain(self, x):
        with pytest.raises(ValueError):
            gamma_fn(x)

    @settings(max_examples=60, deadline=None)
    @given(st.floats(1e-3, 60.0))
    def test_against_mpmath(self, x):
        assert gamma_fn(x) == pytest.approx(float(mpmath.gamma(x)), rel=1e-12)


class TestBinomial:
    @pytest.mark.parametrize("p,q", [(5.0, 2), (3.7, 3), (0.4, 4), (-0.6, 3), (2.5, 0)])
    def test_against_mpmath(self, p, q):
        assert gen_binomial(p, q) == pytest.approx(float(mpmath.binomial(p, q)), rel=1e-13, abs=1e-15)

    def test_integer_case(self):
        assert gen_binomial(6, 2) == pytest.approx(15.0)


class TestJacobi:
    def test_p0(self):
        assert jacobi_eval(0, (0.7, -0.2), 0.3) == 1.0

    def test_p1_closed_form(self):
        assert jacobi_eval(1, JacobiParams(-0.4, 0.4), 0.7) == pytest.approx(0.3, abs=1e-15)

    def test_frozen_oracle(self):
        assert jacobi_eval(5, (0.35, -0.35), -0.2) == pytest.approx(P5_035_M035_AT_M02, rel=1e-13)

    def test_scalar_b_argument(self):
        assert jacobi_eval(3, 0.2, 0.1, b=0.5) == jacobi_eval(3, (0.2, 0.5), 0.1)

    def test_params_validated(self):
        with pytest.raises(ValueError):
            JacobiParams(-2.5, 0.0)

    @pytest.mark.parametrize("mu", [0.1, 0.5, 0.9, 1.1, 1.5, 1.9])
    def test_binomial_sum_grid(self, mu):
        x = np.linspace(-1.0, 1.0, 101)
        for a, b in ((mu, -mu), (-mu, mu)):
            P = jacobi_all(12, a, b, x)
            for n in range(13):
                ref = np.array([binomial_sum(n, a, b, xi) for xi in x])
                scale = np.maximum(np.abs(ref), 1.0)
                # relative where the polynomial is not near a zero
                assert np.max(np.abs(P[n] - ref) / scale) <= 1e-10, (n, a, b)

    @settings(max_examples=80, deadline=None)
    @given(
        st.integers(0, 14),
        st.floats(-0.95, 1.9),
        st.floats(-0.95, 1.9),
        st.floats(-1.0, 1.0),
    )
    def test_reflection_symmetry(self, n, a, b, x):
        lhs = jacobi_eval(n, (a, b), -x)
        rhs = (-1) ** n * jacobi_eval(n, (b, a), x)
        assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-10 * max(1.0, abs(rhs)))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10), st.floats(-0.95, 1.5), st.floats(-0.95, 1.5), st.floats(-1.0, 1.0))
    def test_against_binomial_sum(self, n, a, b, x):
        ref = binomial_sum(n, a, b, x)
        assert jacobi_eval(n, (a, b), x) == pytest.approx(ref, rel=1e-10, abs=1e-11)

    def test_degenerate_first_step_not_hit(self):
        # a + b = 0 makes the m = 0 recurrence denominator vanish; seeding P_1 avoids it
        x = np.linspace(-1, 1, 7)
        P = jacobi_all(3, -0.5, 0.5, x)
        assert np.all(np.isfinite(P))
        assert np.allclose(P[1], x - 0.5)

    def test_vectorized_shape(self):
        x = np.zeros((3, 4))
        assert jacobi_all(5, 0.2, 0.3, x).shape == (6, 3, 4)


class TestWeightedNorm:
    def test_legendre(self):
        assert jacobi_weighted_norm(1, 0.0) == pytest.approx(2.0)
        assert jacobi_weighted_norm(2, 0.0) == pytest.approx(2.0 / 3.0)

    def test_frozen_oracle(self):
        assert jacobi_weighted_norm(3, 0.25) == pytest.approx(NORM_K3_MU025, rel=1e-13)

    @pytest.mark.parametrize("k", [1, 2, 4, 7])
    @pytest.mark.parametrize("mu", [-0.8, -0.3, 0.45, 0.9])
    def test_against_exact_moments(self, k, mu):
        assert jacobi_weighted_norm(k, mu) == pytest.approx(exact_norm(k, mu), rel=1e-12)

    @pytest.mark.parametrize("mu", [1.0, -1.0, 1.5])
    def test_domain(self, mu):
        with pytest.raises(ValueError):
            jacobi_weighted_norm(2, mu)

    def test_index_domain(self):
        with pytest.raises(ValueError):
            jacobi_weighted_norm(0, 0.2)


def test_pure_function_determinism():
    x = np.linspace(-1, 1, 33)
    a = jacobi_all(9, 0.3, -0.3, x)
    b = jacobi_all(9, 0.3, -0.3, x)
    assert np.array_equal(a, b)
    assert math.isfinite(gamma_fn(59.9))
