import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dofde.analysis import (
    COLUMNS,
    ErrorReport,
    condition_report,
    convergence_study,
    error_hs,
    error_l2,
    error_linf,
    error_phi_norm,
    quadrature_convergence_probe,
    render_reports,
    write_reports,
)
from dofde.cases import make_case
from dofde.distribution import make_atoms, make_named
from dofde.pg_solver import ModalSolution

UNIFORM = make_named("Uniform", {}, (0.0, 1.0))


def square(t):
    return np.asarray(t) ** 2


def zero(t):
    return 0.0 * np.asarray(t)


class TestNorms:
    def test_zero_error(self):
        assert error_linf(square, square, 1.0) == 0.0
        assert error_l2(square, square, 1.0) == 0.0

    def test_l2_of_square(self):
        assert error_l2(square, zero, 1.0) == pytest.approx(math.sqrt(1 / 5), rel=1e-14)

    def test_linf_of_square(self):
        assert error_linf(square, zero, 3.0) == pytest.approx(9.0, rel=1e-15)

    def test_hs_of_power(self):
        # e = t, D^0.5 e = t^0.5 / Gamma(1.5) on [0, 1]
        d = lambda t: np.sqrt(t) / math.gamma(1.5)
        want = math.sqrt(1 / 3 + 0.5 / math.gamma(1.5) ** 2)
        assert error_hs(lambda t: t, zero, d, zero, 1.0) == pytest.approx(want, rel=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.floats(-3, 3), min_size=1, max_size=6), st.floats(0.2, 5.0))
    def test_norm_ordering(self, coeffs, T):
        p = np.polynomial.Polynomial(coeffs)
        l2 = error_l2(p, zero, T)
        linf = error_linf(p, zero, T, grid_size=20001)
        assert l2 <= math.sqrt(T) * linf * (1 + 1e-6) + 1e-14

    def test_phi_norm_dominates_l2(self):
        sol = ModalSolution([0.3, -0.2, 0.1], 0.6, 2.0)
        ex = lambda t: 0.0 * t
        phi = error_phi_norm(sol, ex, sol.deriv, lambda s, t: 0.0 * t, UNIFORM, 2.0)
        assert phi >= error_l2(sol, ex, 2.0)

    def test_single_atom_reduces_to_hs(self):
        sol = ModalSolution([0.3, -0.2, 0.1], 0.6, 2.0)
        case = make_case("III", mu0=0.6)
        atom = make_atoms([(0.8, 1.0)], (0.0, 1.0))
        phi = error_phi_norm(sol, case.exact, sol.deriv, case.exact_rl_deriv, atom, 2.0)
        hs = error_hs(sol, case.exact, lambda t: sol.deriv(0.4, t), lambda t: case.exact_rl_deriv(0.4, t), 2.0)
        assert phi == pytest.approx(hs, rel=1e-14)


class TestStudies:
    def test_convergence_rows(self):
        reps = convergence_study("pg", "I", 1.5, [2, 4, 6])
        assert [r.N for r in reps] == [2, 4, 6]
        assert all(r.error is None for r in reps)
        assert reps[2].l2 < reps[1].l2 < reps[0].l2
        assert all(r.phi_norm >= r.l2 for r in reps)

    def test_deterministic(self):
        a = convergence_study("pg", "II", 1.3, [3, 5])
        b = convergence_study("pg", "II", 1.3, [3, 5])
        assert render_reports(a, timing=False) == render_reports(b, timing=False)

    def test_failures_are_collected(self):
        reps = convergence_study("pg", "I", 0.5, [3])
        assert reps[0].error and "mu" in reps[0].error

    def test_mu1_above_mu(self):
        reps = convergence_study("pg", "I", 1.5, [3], options={"mu1": 1.7})
        assert "H^s" in reps[0].error

    def test_collocation_row(self):
        rep = convergence_study("colloc", "MultiTerm", 0.7, [6])[0]
        assert rep.linf < 1e-2 and rep.l2 is None and rep.cond2 > 1.0

    def test_phi_norm_skipped_when_undefined(self):
        rep = convergence_study("pg", "IV", 0.25, [4], case_params={"mu0": 0.25})[0]
        assert rep.error is None and rep.phi_norm is None and rep.l2 is not None

    def test_condition_report(self):
        rows = condition_report("pg", "I", 1.5, [2, 4, 6])
        assert [n for n, _ in rows] == [2, 4, 6]
        assert all(c >= 1.0 for _, c in rows)

    def test_condition_report_without_case(self):
        rows = condition_report("colloc", None, 0.5, [4], dist=UNIFORM)
        assert rows[0][1] > 1.0


class TestProbe:
    def test_polynomial_exact(self):
        g = lambda a: 3 * a**5 - a**2 + 1.0
        errs = quadrature_convergence_probe(1, 1, 0.6, 0.0, UNIFORM, [3, 4, 8], integrand=g)
        assert all(e <= 1e-14 for _, e in errs)

    def test_kink_is_algebraic(self):
        g = lambda a: abs(a - 0.3)
        errs = dict(quadrature_convergence_probe(1, 1, 0.6, 0.0, UNIFORM, [10, 40, 160], Q_ref=800, integrand=g))
        # the decay is not monotone for a kink, so fit over a wide range only
        slope = math.log(errs[10] / errs[160]) / math.log(16.0)
        assert 1.0 <= slope <= 3.0
        assert errs[160] > 1e-8

    def test_smooth_integrand_geometric(self):
        case = make_case("I")
        errs = [e for _, e in quadrature_convergence_probe(3, 4, 1.5, 0.3, case.dist, [4, 8, 12, 16])]
        for e0, e1 in zip(errs, errs[1:]):
            assert e1 <= max(0.1 * e0, 1e-13)

    def test_needs_density(self):
        with pytest.raises(ValueError):
            quadrature_convergence_probe(1, 1, 0.6, 0.0, make_atoms([(0.5, 1.0)]), [4])


class TestOutput:
    def test_schema(self, tmp_path):
        rep = ErrorReport("pg", "I", 1.5, 4, linf=0.1, l2=0.2, runtime_ms=3.0)
        path = tmp_path / "r.csv"
        write_reports([rep], path, timing=False)
        lines = path.read_text().splitlines()
        assert lines[0] == ",".join(COLUMNS)
        cells = lines[1].split(",")
        assert cells[:6] == ["pg", "I", "1.5", "4", "0.10000000000000001", "0.20000000000000001"]
        assert cells[-1] == ""

    def test_markdown(self):
        text = render_reports([ErrorReport("colloc", "MultiTerm", 0.7, 6, linf=1e-3)], "md")
        lines = text.splitlines()
        assert lines[0].startswith("| scheme") and set(lines[1]) <= {"|", "-"}
        assert len(lines) == 3

    def test_bad_format(self):
        with pytest.raises(ValueError):
            render_reports([], "json")
