"""Command-line driver.

    dofde converge --scheme pg --case I --mu 1.0001 --N 2,4,6,8,10
    dofde cond --scheme colloc --case II --mu 0.9 --N 6,10,14,18
    dofde solve --scheme pg --case III --mu0 0.1 --mu 0.1 --N 1
    dofde quadprobe --case I --mu 1.5 --n 3 --k 4 --xi 0.3 --Q 4,8,16,24,40
    dofde verify

Settings come from built-in defaults, then a flat ``key = value`` file given
with ``--config``, then command-line flags; later sources win.  Config keys
are the long flag names with dashes or underscores (``Q-alpha`` and
``Q_alpha`` both work).  ``DOFDE_THREADS`` sets the number of worker threads
for independent N values (unset means 1, 0 means one per CPU).

Failures print a single ``ERROR {json}`` line on stderr and exit nonzero:
2 for invalid configuration, 1 for a failed run.
"""

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.interpolate import CubicSpline

from .analysis import (
    ErrorReport,
    condition_report,
    convergence_study,
    format_markdown,
    quadrature_convergence_probe,
    render_reports,
)
from .cases import CASE_IDS, make_case, normalize_case_id
from .checks import run_checks
from .collocation_solver import CollocConfig, POINT_SETS, solve_collocation
from .distribution import FAMILIES, default_params, make_atoms, make_named
from .linalg import cond, dump_csv
from .pg_solver import LOAD_RULES, PGConfig, solve_pg

__all__ = ["main", "build_parser", "resolve_config", "validate", "ConfigError"]

COMMANDS = ("solve", "converge", "cond", "quadprobe", "verify")
THREADS_ENV = "DOFDE_THREADS"

# key: (type, default, help)
OPTIONS = {
    "scheme": (str, "pg", "pg or colloc"),
    "case": (str, None, f"manufactured case, one of {', '.join(CASE_IDS)}"),
    "forcing_file": (str, None, "two-column CSV (t, f) used instead of a case forcing"),
    "mu": (float, None, "basis exponent"),
    "mu0": (float, None, "solution exponent for cases III and IV"),
    "phi": (str, "uniform", "case IV distribution: uniform or normal"),
    "normal": (str, "0.5,0.15", "case IV normal mean,sd"),
    "N": (str, None, "comma-separated list of resolutions"),
    "T": (float, 2.0, "final time"),
    "dist": (str, None, f"catalog distribution ({', '.join(FAMILIES)}) for --forcing-file runs"),
    "dist_params": (str, None, "distribution parameters as name=value,name=value"),
    "bias": (str, "symmetric", "default-parameter placement: left, symmetric or right"),
    "support": (str, "0,1", "distribution support lo,hi"),
    "atoms": (str, None, "multi-term orders and weights as alpha:w,alpha:w"),
    "Q_alpha": (int, 50, "alpha-quadrature size"),
    "Q_xi": (int, None, "stiffness quadrature size (default N+2)"),
    "Q_f": (int, None, "load quadrature size (default N+20)"),
    "load_rule": (str, None, f"load quadrature: {' or '.join(LOAD_RULES)} (default per case)"),
    "grid_size": (int, 2001, "L-inf sampling points on [0, T]"),
    "quad_size": (int, 200, "Gauss-Legendre points for L2-type norms"),
    "points": (str, "gauss", f"collocation points: {' or '.join(POINT_SETS)}"),
    "beta_method": (str, "vandermonde", "vandermonde or projection"),
    "dmatrix_method": (str, "jacobi", "jacobi or power"),
    "norm": (str, "2", "condition-number norm: 1, 2 or inf"),
    "n": (int, 3, "probe trial index"),
    "k": (int, 4, "probe test index"),
    "xi": (float, 0.3, "probe point"),
    "Q": (str, "4,8,12,16,20,24,32,40", "probe quadrature sizes"),
    "Q_ref": (int, 200, "probe reference size"),
    "out": (str, None, "output file (default: stdout)"),
    "format": (str, "csv", "csv or md"),
    "timing": (bool, False, "fill the runtime_ms column"),
    "dump_matrix": (str, None, "write the assembled matrix (CSV); with several N, a {N} placeholder is required"),
    "solution_out": (str, None, "solve: write modal coefficients or nodal values (CSV)"),
}


class ConfigError(ValueError):
    def __init__(self, problems):
        super().__init__("; ".join(problems))
        self.problems = list(problems)


def _flag(key):
    return "--" + key.replace("_", "-")


def build_parser():
    parser = argparse.ArgumentParser(prog="dofde", description="Distributed-order fractional ODE solvers.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="flat key = value file")
        for key, (typ, _, helptext) in OPTIONS.items():
            if typ is bool:
                p.add_argument(_flag(key), dest=key, action="store_const", const=True, default=argparse.SUPPRESS,
                               help=helptext)
            else:
                p.add_argument(_flag(key), dest=key, default=argparse.SUPPRESS, help=helptext)
    return parser


def read_config_file(path):
    """Flat key = value lines; '#' starts a comment."""
    values, problems = {}, []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                problems.append(f"{path}:{lineno}: expected key = value")
                continue
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in OPTIONS:
                problems.append(f"{path}:{lineno}: unknown key {key!r}")
                continue
            values[key] = value
    if problems:
        raise ConfigError(problems)
    return values


def _convert(key, raw, problems):
    typ = OPTIONS[key][0]
    if raw is None or not isinstance(raw, str):
        return raw
    if typ is bool:
        low = raw.strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        problems.append(f"{key}: expected a boolean, got {raw!r}")
        return None
    try:
        return typ(raw)
    except ValueError:
        problems.append(f"{key}: expected {typ.__name__}, got {raw!r}")
        return None


def resolve_config(ns):
    """Defaults < config file < flags, converted to typed values."""
    merged = {k: v[1] for k, v in OPTIONS.items()}
    args = vars(ns).copy()
    command = args.pop("command")
    path = args.pop("config", None)
    if path is not None:
        try:
            merged.update(read_config_file(path))
        except OSError as exc:
            raise ConfigError([f"cannot read config file: {exc}"]) from exc
    merged.update(args)
    problems = []
    cfg = {k: _convert(k, v, problems) for k, v in merged.items()}
    if problems:
        raise ConfigError(problems)
    cfg["command"] = command
    return cfg


def _floats(text, key, problems, sep=","):
    try:
        return [float(x) for x in text.split(sep) if x.strip()]
    except ValueError:
        problems.append(f"{key}: expected numbers separated by {sep!r}, got {text!r}")
        return None


def _ints(text, key, problems):
    try:
        vals = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        problems.append(f"{key}: expected integers separated by ',', got {text!r}")
        return None
    if not vals:
        problems.append(f"{key}: empty list")
    return vals


def _pairs(text, key, problems, sep, cast):
    out = []
    for item in filter(None, (s.strip() for s in text.split(","))):
        if sep not in item:
            problems.append(f"{key}: entry {item!r} lacks {sep!r}")
            continue
        a, b = item.split(sep, 1)
        try:
            out.append(cast(a.strip(), b.strip()))
        except ValueError:
            problems.append(f"{key}: cannot parse {item!r}")
    return out


def validate(cfg):
    """Check every precondition and return the plan; raises ConfigError listing all problems."""
    problems = []
    cmd = cfg["command"]
    plan = dict(cfg)
    if cmd == "verify":
        return plan

    scheme = cfg["scheme"]
    if scheme not in ("pg", "colloc"):
        problems.append(f"scheme must be 'pg' or 'colloc', got {scheme!r}")
    if cfg["format"] not in ("csv", "md"):
        problems.append(f"format must be 'csv' or 'md', got {cfg['format']!r}")
    if not (cfg["T"] is not None and cfg["T"] > 0):
        problems.append("T must be positive")
    for key in ("Q_alpha", "grid_size", "quad_size"):
        if cfg[key] is not None and cfg[key] < (1 if key == "Q_alpha" else 2):
            problems.append(f"{key} is too small: {cfg[key]}")
    if cfg["load_rule"] is not None and cfg["load_rule"] not in LOAD_RULES:
        problems.append(f"load_rule must be one of {LOAD_RULES}")
    if cfg["points"] not in POINT_SETS:
        problems.append(f"points must be one of {POINT_SETS}")
    if cfg["beta_method"] not in ("vandermonde", "projection"):
        problems.append("beta_method must be 'vandermonde' or 'projection'")
    if cfg["dmatrix_method"] not in ("jacobi", "power"):
        problems.append("dmatrix_method must be 'jacobi' or 'power'")
    if cfg["norm"] not in ("1", "2", "inf"):
        problems.append(f"norm must be 1, 2 or inf, got {cfg['norm']!r}")
    plan["norm"] = {"1": 1, "2": 2}.get(cfg["norm"], "inf")

    mu = cfg["mu"]
    if mu is None:
        problems.append("mu is required")
    elif scheme == "pg" and not 0.0 < mu < 2.0:
        problems.append(f"pg needs mu in (0, 2), got {mu}")
    elif scheme == "colloc" and not 0.0 < mu < 1.0:
        problems.append(f"colloc needs mu in (0, 1), got {mu}")

    Ns = [] if cmd == "quadprobe" else None
    if cmd != "quadprobe":
        if cfg["N"] is None:
            problems.append("N is required")
        else:
            Ns = _ints(cfg["N"], "N", problems) or []
            low = 2 if scheme == "colloc" else 1
            bad = [n for n in Ns if n < low]
            if bad:
                problems.append(f"N values {bad} are below the minimum {low} for {scheme}")
            if cmd == "solve" and len(Ns) > 1:
                problems.append("solve takes a single N")
            if cfg["dump_matrix"] and len(Ns) > 1 and "{N}" not in cfg["dump_matrix"]:
                problems.append("dump_matrix needs a {N} placeholder when several N are given")
    plan["Ns"] = Ns

    if cfg["case"] is not None and normalize_case_id(cfg["case"]) is None:
        problems.append(f"unknown case {cfg['case']!r}; choose from {CASE_IDS}")
    if cfg["case"] is None and cfg["forcing_file"] is None:
        problems.append("give either case or forcing_file")
    if cfg["case"] is not None and cfg["forcing_file"] is not None:
        problems.append("case and forcing_file are mutually exclusive")
    if cfg["forcing_file"] is not None and cmd == "converge":
        problems.append("converge needs a manufactured case (an external forcing has no exact solution)")
    if cfg["dist"] is not None and cfg["case"] is not None:
        problems.append("dist overrides are only allowed with forcing_file (case forcings fix their own phi)")
    if cfg["mu0"] is not None and not 0.0 < cfg["mu0"] < 1.0:
        problems.append(f"mu0 must lie in (0, 1), got {cfg['mu0']}")
    if cfg["phi"] not in ("uniform", "normal"):
        problems.append("phi must be 'uniform' or 'normal'")
    normal = _floats(cfg["normal"], "normal", problems)
    if normal is not None and (len(normal) != 2 or not normal[1] > 0):
        problems.append("normal must be mean,sd with sd > 0")
    atoms = None
    if cfg["atoms"] is not None:
        atoms = _pairs(cfg["atoms"], "atoms", problems, ":", lambda a, w: (float(a), float(w)))

    if cmd == "quadprobe":
        plan["Qs"] = _ints(cfg["Q"], "Q", problems)
        if plan["Qs"] and min(plan["Qs"]) < 1:
            problems.append("probe Q values must be positive")
        if cfg["n"] < 1 or cfg["k"] < 1:
            problems.append("probe indices n, k must be positive")
        if not -1.0 < cfg["xi"] < 1.0:
            problems.append("probe xi must lie in (-1, 1)")

    case = dist = forcing = None
    if not problems:
        try:
            case, dist, forcing = _build_problem(cfg, normal, atoms, problems)
        except (ValueError, OSError) as exc:
            problems.append(str(exc))
    if not problems and cmd in ("solve", "converge", "cond") and scheme == "pg":
        try:
            PGConfig(max(Ns), mu, cfg["T"]).check_against(dist)
        except ValueError as exc:
            problems.append(str(exc))
    if not problems and scheme == "colloc":
        if dist.alpha_max > 2.0:
            problems.append("colloc supports alpha up to 2")
    if problems:
        raise ConfigError(problems)
    plan.update(case=case, dist=dist, forcing=forcing)
    return plan


def _build_problem(cfg, normal, atoms, problems):
    if cfg["case"] is not None:
        case = make_case(cfg["case"], mu0=cfg["mu0"], phi=cfg["phi"], normal=tuple(normal), atoms=atoms,
                         T=cfg["T"])
        return case, case.dist, case
    support = _floats(cfg["support"], "support", problems)
    if support is None or len(support) != 2:
        raise ValueError("support must be lo,hi")
    if atoms is not None:
        dist = make_atoms(atoms, (0.0, 2.0))
    elif cfg["dist"] is not None:
        name = {f.lower(): f for f in FAMILIES}.get(cfg["dist"].lower())
        if name is None:
            raise ValueError(f"unknown distribution {cfg['dist']!r}; choose from {FAMILIES}")
        params = default_params(name, support, cfg["bias"])
        if cfg["dist_params"]:
            params.update(_pairs(cfg["dist_params"], "dist_params", problems, "=", lambda k, v: (k, float(v))))
        dist = make_named(name, params, tuple(support))
    else:
        raise ValueError("forcing_file runs need dist or atoms")
    return None, dist, load_forcing(cfg["forcing_file"], cfg["T"])


def load_forcing(path, T):
    """Cubic spline through a (t, f) table; accuracy is that of the spline, not spectral."""
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                rows.append((float(row[0]), float(row[1])))
            except (ValueError, IndexError):
                if rows:
                    raise ValueError(f"{path}: bad row {row!r}") from None
    if len(rows) < 4:
        raise ValueError(f"{path}: need at least 4 (t, f) rows")
    t, f = map(np.array, zip(*rows))
    if np.any(np.diff(t) <= 0):
        raise ValueError(f"{path}: t must be strictly increasing")
    if t[-1] < T * (1 - 1e-12):
        raise ValueError(f"{path}: data end at t={t[-1]} < T={T}")
    spline = CubicSpline(t, f)

    def forcing(tt):
        return spline(np.asarray(tt, dtype=float))

    return forcing


def _options(plan):
    keys = ("T", "Q_alpha", "Q_xi", "Q_f", "load_rule", "grid_size", "quad_size", "points", "beta_method",
            "dmatrix_method")
    return {k: plan[k] for k in keys if plan[k] is not None}


def _threads():
    raw = os.environ.get(THREADS_ENV, "1").strip() or "1"
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError([f"{THREADS_ENV} must be an integer, got {raw!r}"]) from None
    if n < 0:
        raise ConfigError([f"{THREADS_ENV} must be >= 0"])
    if n == 0:
        return os.cpu_count() or 1
    return n


def _emit(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _render_pairs(header, rows, fmt):
    cells = [[str(a), f"{b:.17g}"] for a, b in rows]
    if fmt == "md":
        return format_markdown(header, cells)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(cells)
    return buf.getvalue()


def _dump_path(template, N, many):
    if many:
        return template.format(N=N)
    return template.format(N=N) if "{N}" in template else template


def _dump_matrices(plan):
    if plan["dump_matrix"]:
        many = len(plan["Ns"]) > 1
        for N in plan["Ns"]:
            dump_csv(_system(plan, N)[1], _dump_path(plan["dump_matrix"], N, many))


def _system(plan, N):
    mu, T = plan["mu"], plan["T"]
    opts = _options(plan)
    if plan["scheme"] == "pg":
        lr = plan["load_rule"] or (plan["case"].load_rule if plan["case"] is not None else "jacobi")
        cfg = PGConfig(N, mu, T, Q_alpha=opts.get("Q_alpha", 50), Q_xi=plan["Q_xi"], Q_f=plan["Q_f"], load_rule=lr)
        return solve_pg(cfg, plan["dist"], plan["forcing"], return_system=True)
    cfg = CollocConfig(N, mu, T, Q_alpha=opts.get("Q_alpha", 50), points=plan["points"],
                       beta_method=plan["beta_method"], dmatrix_method=plan["dmatrix_method"])
    return solve_collocation(cfg, plan["dist"], plan["forcing"], return_system=True)


def _cmd_converge(plan):
    workers = _threads()
    executor = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        reports = convergence_study(plan["scheme"], plan["case"], plan["mu"], plan["Ns"], plan["dist"],
                                    _options(plan), executor=executor)
    finally:
        if executor is not None:
            executor.shutdown()
    _dump_matrices(plan)
    _emit(render_reports(reports, plan["format"], plan["timing"]), plan["out"])
    failed = [r for r in reports if r.error]
    if failed:
        return _fail(1, "run failed", [f"N={r.N}: {r.error}" for r in failed])
    return 0


def _cmd_solve(plan):
    N = plan["Ns"][0]
    sol, A, _ = _system(plan, N)
    if plan["dump_matrix"]:
        dump_csv(A, _dump_path(plan["dump_matrix"], N, False))
    if plan["solution_out"]:
        sol.to_csv(plan["solution_out"])
    if plan["case"] is not None:
        (rep,) = convergence_study(plan["scheme"], plan["case"], plan["mu"], [N], plan["dist"], _options(plan))
        if rep.error:
            return _fail(1, "run failed", [rep.error])
    else:
        rep = ErrorReport(plan["scheme"], "external", float(plan["mu"]), N, cond2=cond(A, 2))
    _emit(render_reports([rep], plan["format"], plan["timing"]), plan["out"])
    return 0


def _cmd_cond(plan):
    rows = condition_report(plan["scheme"], plan["case"], plan["mu"], plan["Ns"], plan["dist"],
                            norm=plan["norm"], options=_options(plan))
    label = "cond2" if plan["norm"] == 2 else f"cond{plan['norm']}"
    _dump_matrices(plan)
    _emit(_render_pairs(["N", label], rows, plan["format"]), plan["out"])
    return 0


def _cmd_quadprobe(plan):
    rows = quadrature_convergence_probe(plan["n"], plan["k"], plan["mu"], plan["xi"], plan["dist"], plan["Qs"],
                                        Q_ref=plan["Q_ref"], T=plan["T"])
    _emit(_render_pairs(["Q", "error"], rows, plan["format"]), plan["out"])
    return 0


def _cmd_verify(plan):
    results = run_checks()
    rows = [[name, "PASS" if ok else "FAIL", detail] for name, ok, detail in results]
    _emit(format_markdown(["check", "result", "detail"], rows), plan["out"])
    failed = [name for name, ok, _ in results if not ok]
    if failed:
        return _fail(1, "verification failed", failed)
    return 0


def _fail(code, kind, problems):
    line = json.dumps({"status": "error", "kind": kind, "errors": list(problems)}, sort_keys=True)
    print("ERROR " + line, file=sys.stderr)
    return code


DISPATCH = {
    "solve": _cmd_solve,
    "converge": _cmd_converge,
    "cond": _cmd_cond,
    "quadprobe": _cmd_quadprobe,
    "verify": _cmd_verify,
}


def main(argv=None):
    ns = build_parser().parse_args(argv)
    try:
        plan = validate(resolve_config(ns))
        return DISPATCH[plan["command"]](plan)
    except ConfigError as exc:
        return _fail(2, "config", exc.problems)
    except Exception as exc:
        return _fail(1, "run failed", [f"{type(exc).__name__}: {exc}"])


if __name__ == "__main__":
    sys.exit(main())
