"""Error norms, convergence studies, conditioning reports and the alpha-quadrature probe.

All norms are taken on [0, T] in the physical variable t.  Fractional
derivatives of the numerical solution are exact (modal expansions); those of
the manufactured solutions come from the power rule.
"""

import csv
import io
import math
import time
from dataclasses import asdict, dataclass

import numpy as np

from .cases import make_case
from .collocation_solver import CollocConfig, assemble_distributed_operator, solve_collocation
from .distribution import alpha_quadrature
from .linalg import cond
from .pg_solver import PGConfig, assemble_stiffness, solve_pg
from .quadrature import gauss_legendre, map_to_interval
from .specfun import jacobi_all

__all__ = [
    "ErrorReport",
    "COLUMNS",
    "error_linf",
    "error_l2",
    "error_hs",
    "error_phi_norm",
    "convergence_study",
    "quadrature_convergence_probe",
    "condition_report",
    "write_reports",
    "render_reports",
    "report_rows",
    "format_markdown",
]

COLUMNS = ("scheme", "case", "mu", "N", "linf", "l2", "h_mu1", "phi_norm", "cond2", "runtime_ms")


@dataclass
class ErrorReport:
    scheme: str
    case: str
    mu: float
    N: int
    linf: float = None
    l2: float = None
    h_mu1: float = None
    phi_norm: float = None
    cond2: float = None
    runtime_ms: float = None
    error: str = None

    def values(self):
        return {k: v for k, v in asdict(self).items() if k in COLUMNS}


def linf_grid(T, grid_size=2001):
    """Equispaced points of [0, T] without t = 0."""
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    return np.linspace(0.0, T, int(grid_size))[1:]


def _l2_rule(T, quad_size):
    if quad_size < 2:
        raise ValueError("quad_size must be at least 2")
    return map_to_interval(gauss_legendre(int(quad_size)), 0.0, T)


def _sq_norm(fn, rule):
    return float(np.dot(rule.weights, np.asarray(fn(rule.nodes)) ** 2))


def error_linf(numeric, exact, T, grid_size=2001):
    t = linf_grid(T, grid_size)
    return float(np.max(np.abs(numeric(t) - exact(t))))


def error_l2(numeric, exact, T, quad_size=200):
    rule = _l2_rule(T, quad_size)
    return math.sqrt(_sq_norm(lambda t: numeric(t) - exact(t), rule))


def error_hs(numeric, exact, numeric_deriv, exact_deriv, T, quad_size=200):
    """(||e||^2 + ||D^s e||^2)^(1/2); the derivative callables already carry the order s."""
    rule = _l2_rule(T, quad_size)
    e2 = _sq_norm(lambda t: numeric(t) - exact(t), rule)
    d2 = _sq_norm(lambda t: numeric_deriv(t) - exact_deriv(t), rule)
    return math.sqrt(e2 + d2)


def error_phi_norm(numeric, exact, numeric_deriv, exact_deriv, dist, T, Q_alpha=50, quad_size=200):
    """(||e||^2 + int phi(alpha) ||D^{alpha/2} e||^2 d alpha)^(1/2).

    ``numeric_deriv`` and ``exact_deriv`` take (s, t).
    """
    rule = _l2_rule(T, quad_size)
    total = _sq_norm(lambda t: numeric(t) - exact(t), rule)
    for alpha, w in alpha_quadrature(dist, Q_alpha):
        s = 0.5 * alpha
        if s == 0.0:
            total += w * _sq_norm(lambda t: numeric(t) - exact(t), rule)
        else:
            total += w * _sq_norm(lambda t: numeric_deriv(s, t) - exact_deriv(s, t), rule)
    return math.sqrt(total)


def _resolve_case(case, case_params):
    if isinstance(case, str):
        return make_case(case, **(case_params or {}))
    return case


def _one_run(scheme, case, mu, N, dist, opts):
    T = opts.get("T", case.T)
    start = time.perf_counter()
    rep = ErrorReport(scheme, case.id, float(mu), int(N))
    grid, qsize = opts.get("grid_size", 2001), opts.get("quad_size", 200)
    if scheme == "pg":
        cfg = PGConfig(
            N, mu, T,
            Q_alpha=opts.get("Q_alpha", 50),
            Q_xi=opts.get("Q_xi"),
            Q_f=opts.get("Q_f"),
            load_rule=opts.get("load_rule") or case.load_rule,
        )
        sol, S, _ = solve_pg(cfg, dist, case, return_system=True)
        rep.linf = error_linf(sol, case.exact, T, grid)
        rep.l2 = error_l2(sol, case.exact, T, qsize)
        s = opts.get("mu1", mu)
        if s > mu:
            raise ValueError(f"H^s error needs s <= mu, got s={s} > mu={mu}")
        rep.h_mu1 = error_hs(
            sol, case.exact,
            lambda t: sol.deriv(s, t), lambda t: case.exact_rl_deriv(s, t),
            T, qsize,
        )
        if dist.alpha_max / 2.0 <= mu:
            rep.phi_norm = error_phi_norm(
                sol, case.exact, sol.deriv, case.exact_rl_deriv, dist, T, cfg.Q_alpha, qsize
            )
        rep.cond2 = cond(S, 2)
    elif scheme == "colloc":
        cfg = CollocConfig(
            N, mu, T,
            Q_alpha=opts.get("Q_alpha", 50),
            points=opts.get("points", "gauss"),
            beta_method=opts.get("beta_method", "vandermonde"),
            dmatrix_method=opts.get("dmatrix_method", "jacobi"),
        )
        sol, A, _ = solve_collocation(cfg, dist, case, return_system=True)
        rep.linf = error_linf(sol, case.exact, T, grid)
        rep.cond2 = cond(A, 2)
    else:
        raise ValueError(f"unknown scheme {scheme!r}; use 'pg' or 'colloc'")
    rep.runtime_ms = 1e3 * (time.perf_counter() - start)
    return rep


def convergence_study(scheme, case, mu, Ns, dist=None, options=None, case_params=None, executor=None):
    """One ErrorReport per N, in the order given.

    A failing run is reported with its error message and the study goes on.
    ``executor`` (a concurrent.futures executor) runs the N values in parallel;
    results keep the input order.
    """
    case = _resolve_case(case, case_params)
    dist = case.dist if dist is None else dist
    opts = dict(options or {})

    def run(N):
        try:
            return _one_run(scheme, case, mu, N, dist, opts)
        except Exception as exc:  # collected per run
            return ErrorReport(scheme, case.id, float(mu), int(N), error=f"{type(exc).__name__}: {exc}")

    if executor is None:
        return [run(N) for N in Ns]
    return list(executor.map(run, Ns))


def condition_report(scheme, case, mu, Ns, dist=None, norm=2, options=None, case_params=None):
    """(N, condition number) of the assembled system for each N.

    ``case`` may be None when ``dist`` is given.
    """
    case = _resolve_case(case, case_params)
    dist = case.dist if dist is None else dist
    opts = dict(options or {})
    T = opts.get("T", case.T if case is not None else 2.0)
    out = []
    for N in Ns:
        if scheme == "pg":
            A = assemble_stiffness(PGConfig(N, mu, T, Q_alpha=opts.get("Q_alpha", 50), Q_xi=opts.get("Q_xi")), dist)
        elif scheme == "colloc":
            cfg = CollocConfig(
                N, mu, T,
                Q_alpha=opts.get("Q_alpha", 50),
                points=opts.get("points", "gauss"),
                beta_method=opts.get("beta_method", "vandermonde"),
                dmatrix_method=opts.get("dmatrix_method", "jacobi"),
            )
            A = assemble_distributed_operator(cfg, dist)
        else:
            raise ValueError(f"unknown scheme {scheme!r}")
        out.append((int(N), cond(A, norm)))
    return out


def _probe_integrand(n, k, mu, xi, T):
    def g(alpha):
        eta = mu - 0.5 * alpha
        ratio = math.exp(
            math.lgamma(n + mu) + math.lgamma(k + mu) - math.lgamma(n + eta) - math.lgamma(k + eta)
        )
        trial = (1.0 + xi) ** eta * jacobi_all(n - 1, -eta, eta, xi)[n - 1]
        test = (1.0 - xi) ** eta * jacobi_all(k - 1, eta, -eta, xi)[k - 1]
        return (2.0 / T) ** alpha * ratio * trial * test

    return g


def quadrature_convergence_probe(n, k, mu, xi, dist, Qs, Q_ref=200, T=2.0, integrand=None):
    """Error of the Q-point alpha-quadrature of int phi(alpha) g(alpha) d alpha against Q_ref.

    The default g is the product of the order-(alpha/2) derivatives of the n-th
    trial and k-th test poly-fractonomials at xi, scaled by (2/T)^alpha.
    """
    if dist.is_atoms:
        raise ValueError("probe needs a density")
    if mu < 0.5 * dist.alpha_max:
        raise ValueError("probe requires mu >= alpha_max / 2")
    g = _probe_integrand(n, k, mu, xi, T) if integrand is None else integrand

    def integrate(Q):
        quad = alpha_quadrature(dist, Q)
        return math.fsum(w * float(g(a)) for a, w in quad)

    ref = integrate(Q_ref)
    return [(int(Q), abs(integrate(Q) - ref)) for Q in Qs]


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def report_rows(reports, timing=True):
    """Rows of formatted cells in COLUMNS order; ``timing=False`` blanks runtime_ms."""
    rows = []
    for r in reports:
        vals = r.values()
        if not timing:
            vals["runtime_ms"] = None
        rows.append([_fmt(vals[c]) for c in COLUMNS])
    return rows


def render_reports(reports, fmt="csv", timing=True):
    rows = report_rows(reports, timing)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        w.writerows(rows)
        return buf.getvalue()
    if fmt == "md":
        return format_markdown(COLUMNS, rows)
    raise ValueError(f"unknown format {fmt!r}")


def write_reports(reports, path, fmt="csv", timing=True):
    """Write reports with the fixed column schema (csv or markdown)."""
    text = render_reports(reports, fmt, timing)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def format_markdown(header, rows):
    """Aligned markdown table."""
    cells = [list(map(str, header))] + [list(map(str, r)) for r in rows]
    width = [max(len(row[i]) for row in cells) for i in range(len(header))]

    def line(row):
        return "| " + " | ".join(c.ljust(w) for c, w in zip(row, width)) + " |"

    out = [line(cells[0]), "|" + "|".join("-" * (w + 2) for w in width) + "|"]
    out += [line(r) for r in cells[1:]]
    return "\n".join(out) + "\n"
