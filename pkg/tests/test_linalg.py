import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dofde.linalg import SingularMatrixError, cond, cond2, dump_csv, lu_solve, singular_values


class TestSolve:
    def test_identity(self):
        assert lu_solve(np.eye(3), [1.0, 2.0, 3.0]).tolist() == [1.0, 2.0, 3.0]

    def test_diagonal(self):
        assert lu_solve(np.diag([2.0, 4.0]), [2.0, 2.0]) == pytest.approx([1.0, 0.5], abs=1e-15)

    def test_needs_pivoting(self):
        # zero leading entry
        A = np.array([[0.0, 1.0], [1.0, 0.0]])
        assert lu_solve(A, [3.0, 5.0]) == pytest.approx([5.0, 3.0], abs=1e-15)

    def test_random_round_trip(self):
        rng = np.random.default_rng(7)
        A = rng.standard_normal((20, 20)) + 20 * np.eye(20)
        x = rng.standard_normal(20)
        assert np.max(np.abs(lu_solve(A, A @ x) - x)) <= 1e-10

    def test_many_random_systems(self):
        rng = np.random.default_rng(11)
        worst = 0.0
        for _ in range(100):
            n = int(rng.integers(2, 30))
            A = rng.standard_normal((n, n))
            if np.linalg.cond(A) > 1e6:
                continue
            x = rng.standard_normal(n)
            worst = max(worst, np.max(np.abs(lu_solve(A, A @ x) - x)) / np.abs(x).max())
        assert worst <= 1e-9

    def test_singular(self):
        with pytest.raises(SingularMatrixError):
            lu_solve([[1.0, 2.0], [2.0, 4.0]], [1.0, 1.0])

    def test_non_square(self):
        with pytest.raises(ValueError):
            lu_solve(np.ones((2, 3)), [1.0, 1.0])

    def test_rhs_length(self):
        with pytest.raises(ValueError):
            lu_solve(np.eye(3), [1.0, 1.0])

    def test_non_finite(self):
        with pytest.raises(ValueError):
            lu_solve([[1.0, np.nan], [0.0, 1.0]], [1.0, 1.0])


class TestSVD:
    def test_diagonal(self):
        assert singular_values(np.diag([3.0, 1.0])) == pytest.approx([3.0, 1.0], abs=1e-15)

    def test_permutation(self):
        assert singular_values([[0.0, 2.0], [1.0, 0.0]]) == pytest.approx([2.0, 1.0], abs=1e-15)

    def test_rectangular(self):
        assert singular_values(np.ones((2, 3))) == pytest.approx([np.sqrt(6.0), 0.0], abs=1e-14)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 12), st.integers(0, 2**31))
    def test_frobenius_identity(self, n, seed):
        A = np.random.default_rng(seed).standard_normal((n, n))
        s = singular_values(A)
        assert np.all(np.diff(s) <= 0.0) and np.all(s >= 0.0)
        assert np.sum(s**2) == pytest.approx(np.sum(A**2), rel=1e-12)


class TestCond:
    def test_identity(self):
        assert cond2(np.eye(5)) == pytest.approx(1.0, abs=1e-15)

    def test_diagonal(self):
        assert cond2(np.diag([10.0, 0.1])) == pytest.approx(100.0, rel=1e-14)

    def test_one_norm(self):
        A = np.array([[1.0, 2.0], [0.0, 1.0]])
        # ||A||_1 = 3, A^-1 = [[1, -2], [0, 1]] with ||.||_1 = 3
        assert cond(A, 1) == pytest.approx(9.0, rel=1e-14)
        assert cond(A, "inf") == pytest.approx(9.0, rel=1e-14)

    def test_singular_is_infinite(self):
        assert cond2(np.zeros((2, 2))) == float("inf")

    def test_bad_norm(self):
        with pytest.raises(ValueError):
            cond(np.eye(2), 3)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 10), st.integers(0, 2**31), st.floats(1e-3, 1e3))
    def test_scaling_invariance(self, n, seed, c):
        A = np.random.default_rng(seed).standard_normal((n, n)) + n * np.eye(n)
        assert cond2(c * A) == pytest.approx(cond2(A), rel=1e-10)
        assert cond2(A) >= 1.0 - 1e-12


def test_dump_round_trip(tmp_path):
    A = np.random.default_rng(3).standard_normal((4, 5)) / 3.0
    path = tmp_path / "A.csv"
    dump_csv(A, path)
    back = np.loadtxt(path, delimiter=",")
    assert np.array_equal(back, A)
