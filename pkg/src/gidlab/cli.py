"""Command-line front end: ``gidlab <subcommand> [options]``.

Every run writes ``<out>/<subcommand>.csv`` (run configuration and seed as
``#`` comment lines, then the table), a plain-text summary and a gnuplot
script that reads the CSV by relative path.

Exit codes: 0 pass, 1 fail, 2 usage or input error, 3 inconclusive.
"""
from __future__ import annotations

import argparse
import ast
import math
import operator
import os
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _backend, __version__
from .attraction import (CONVERGENCE_TOL, GSS_TOL, AttractionSchedule, MonteCarlo,
                         linnik_chain, run_duality_experiment,
                         run_gss_self_attraction, run_pga_experiment,
                         run_transitivity_experiment, run_un_convergence, semistable_chain,
                         validate_schedule_floor)
from .cf_core import (ALGEBRAIC_TOL, PSD_TOL, ExponentDescriptor, GridSpec, PoleError,
                      check_admissible, check_charfn, geometric_compound_cf,
                      gid_necessary_check, gv_invert, gv_transform, id_cf,
                      order_collapse_check, psd_witness_search, scaled_exponent,
                      semilaplace_scaling_residual)
from .samplers import RandomStream
from .thinning import thinning_invariance_test

EXIT = {"pass": 0, "fail": 1, "inconclusive": 3}
EXIT_USAGE = 2

# keys never written to the CSV header: they must not change the numbers
_RUNTIME_KEYS = {"jobs", "out", "config", "command"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- Argument types -----------------------------------------------------------

def _float_list(text):
    try:
        return [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def _int_list(text):
    try:
        return [int(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}")


def _bool(text):
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text!r}")


_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
        ast.Div: operator.truediv, ast.Pow: operator.pow}


def parse_sequence(text):
    """Compile an expression in ``n`` such as ``1/(2n)`` to an exact function.

    Numbers become :class:`Fraction`; juxtaposition (``2n``, ``3(n+1)``) means
    multiplication.  Only arithmetic on numbers and ``n`` is allowed.
    """
    src = re.sub(r"(\d|\))\s*(?=[n(])", r"\1*", str(text))
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError:
        raise ValueError(f"cannot parse sequence {text!r}")

    def ev(node, n):
        if isinstance(node, ast.Expression):
            return ev(node.body, n)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return Fraction(str(node.value))
        if isinstance(node, ast.Name) and node.id == "n":
            return Fraction(n)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand, n)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            left, right = ev(node.left, n), ev(node.right, n)
            if isinstance(node.op, ast.Pow):
                if right.denominator != 1:
                    raise ValueError("only integer powers are supported")
                right = int(right)
            return _OPS[type(node.op)](left, right)
        raise ValueError(f"unsupported element in sequence {text!r}")

    def seq(n):
        try:
            return ev(tree, n)
        except ZeroDivisionError:
            raise ValueError(f"sequence {text!r} divides by zero at n = {n}")

    seq(1)  # fail early on bad syntax or division by zero
    return seq


# -- Parser -------------------------------------------------------------------

def _common(p, seed=False, grid=True):
    p.add_argument("--out", default="gidlab-out", help="output directory")
    p.add_argument("--config", help="key = value file; flags take precedence")
    p.add_argument("--jobs", type=int, default=1, help="worker threads (results do not depend on it)")
    if seed:
        p.add_argument("--seed", type=int, default=0)
    if grid:
        p.add_argument("--grid-min", type=float, default=-10.0)
        p.add_argument("--grid-max", type=float, default=10.0)
        p.add_argument("--grid-step", type=float, default=0.05)


def _exponent_args(p, families=("gaussian", "stable", "semistable"), default="stable"):
    p.add_argument("--family", choices=families, default=default)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--c", type=float, default=None,
                   help="exponent scale (default 0.5 for gaussian, 1 otherwise)")
    if "semistable" in families:
        p.add_argument("--b", type=float, default=0.5, help="semi-stable order")
        p.add_argument("--eps", type=float, default=0.0, help="log-periodic amplitude")


def build_parser():
    parser = _Parser(prog="gidlab", description="Geometric infinite divisibility lab")
    parser.add_argument("--version", action="version", version=f"gidlab {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("gv", help="geometric version 1/(1+g) and its algebra on a grid")
    _common(p)
    _exponent_args(p)
    p.add_argument("--p", type=_float_list, default=[0.1, 0.5, 0.9],
                   help="compounding probabilities checked")

    p = sub.add_parser("un-converge", help="U_n towards the geometric version")
    _common(p, seed=True)
    _exponent_args(p)
    p.add_argument("--n-list", type=_int_list, default=[100, 1000, 10000])
    p.add_argument("--samples", type=int, default=0, help="Monte Carlo draws (0: exact only)")
    p.add_argument("--max-count", type=int, default=1000,
                   help="largest n simulated summand by summand")

    p = sub.add_parser("gss", help="geometric strict stability of the Linnik law")
    _common(p)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--p", type=_float_list, default=[0.1, 0.5, 0.9])
    p.add_argument("--n-max", type=int, default=20)
    p.add_argument("--tol", type=float, default=GSS_TOL)

    p = sub.add_parser("schedule-check", help="check [1/p_n] = n on a prefix")
    _common(p, grid=False)
    p.add_argument("--p-seq", default="1/n", help="expression in n, e.g. 1/(2n)")
    p.add_argument("--n-max", type=int, default=20)

    p = sub.add_parser("pga", help="partial geometric attraction to a semi-alpha-Laplace law")
    _common(p, seed=True)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--a", type=float, default=None, help="multiplier (default b^-alpha)")
    p.add_argument("--b", type=float, default=0.4)
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--n-max", type=int, default=20)
    p.add_argument("--samples", type=int, default=0)
    p.add_argument("--max-count", type=int, default=1000)
    p.add_argument("--tol", type=float, default=CONVERGENCE_TOL)

    p = sub.add_parser("duality", help="classical and geometric partial attraction side by side")
    _common(p, seed=True)
    _exponent_args(p, families=("gaussian", "stable"), default="gaussian")
    p.add_argument("--a", type=float, default=2.0)
    p.add_argument("--n-max", type=int, default=20)
    p.add_argument("--samples", type=int, default=0)
    p.add_argument("--max-count", type=int, default=1000)
    p.add_argument("--tol", type=float, default=CONVERGENCE_TOL)

    p = sub.add_parser("transitivity", help="composed attraction schedules")
    _common(p)
    p.add_argument("--chain", choices=("linnik", "semistable"), default="linnik")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--a", type=float, default=2.0, help="Linnik chain multiplier")
    p.add_argument("--b", type=float, default=0.25, help="semi-stable chain order")
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--gaussian-c", type=float, default=0.1)
    p.add_argument("--n-max", type=int, default=20)
    p.add_argument("--tol", type=float, default=CONVERGENCE_TOL)

    p = sub.add_parser("gid-check", help="PSD necessary condition for GID")
    _common(p)
    p.add_argument("--law", choices=("laplace", "linnik", "normal", "semistable"),
                   default="laplace")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--b", type=float, default=0.5)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--r-list", type=_float_list, default=[0.1, 0.5, 1.0, 2.0, 10.0])
    p.add_argument("--search", type=_bool, nargs="?", const=True, default=False,
                   help="search grids for a violation instead of using one grid")

    p = sub.add_parser("thinning", help="p-thinning invariance of Mittag-Leffler renewals")
    _common(p, seed=True, grid=False)
    p.add_argument("--alpha", type=float, default=0.7)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--events", type=int, default=200_000)
    p.add_argument("--horizon", type=float, default=None,
                   help="time horizon (default: run for --events arrivals)")
    p.add_argument("--deterministic", type=_bool, nargs="?", const=True, default=False,
                   help="negative control with unit intervals")

    p = sub.add_parser("semilaplace-check", help="scaling relation of a semi-stable exponent")
    _common(p)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--b", type=float, default=0.5)
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--b2", type=float, default=None, help="second order to test")
    return parser


# -- Config file --------------------------------------------------------------

def read_config(path):
    """``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}")
    for i, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config {path} line {i}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _subparser(parser, command):
    for action in parser._subparsers._group_actions:
        if command in action.choices:
            return action.choices[command]
    raise UsageError(f"unknown command {command!r}")


def parse_args(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        raise UsageError("a subcommand is required")
    if args.config:
        cfg = read_config(args.config)
        sp = _subparser(parser, args.command)
        known = {a.dest for a in sp._actions} - {"help", "config"}
        unknown = sorted(set(cfg) - known)
        if unknown:
            raise UsageError(f"unknown config key(s): {', '.join(unknown)}")
        # config values become defaults; explicit flags still win on reparse
        sp.set_defaults(**cfg)
        args = parser.parse_args(argv)
        for a in sp._actions:
            v = getattr(args, a.dest, None)
            if isinstance(v, str) and a.type is not None and a.dest in cfg:
                try:
                    setattr(args, a.dest, a.type(v))
                except (argparse.ArgumentTypeError, ValueError) as exc:
                    raise UsageError(f"config key {a.dest}: {exc}")
    return args


# -- Running ------------------------------------------------------------------

@dataclass
class RunResult:
    verdict: str
    columns: list
    rows: list
    metrics: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    plot: tuple = ("n", "sup_distance", True)  # x column, y column, log-scale y

    @classmethod
    def from_report(cls, rep, plot=None):
        return cls(rep.verdict, rep.columns(), rep.rows,
                   _report_metrics(rep), list(rep.notes),
                   plot or ("n", "sup_distance", True))


def _report_metrics(rep):
    m = {}
    if rep.rate is not None:
        m["rate_order"] = rep.rate.order
        m["rate_r_squared"] = rep.rate.r_squared
    m.update(rep.metrics)
    m.update({f"tolerance_{k}": v for k, v in rep.tolerances.items()})
    return m


def _grid(args):
    return GridSpec(args.grid_min, args.grid_max, args.grid_step)


def _descriptor(args):
    fam = args.family
    if fam == "gaussian":
        return ExponentDescriptor.gaussian(0.5 if args.c is None else args.c)
    c = 1.0 if args.c is None else args.c
    if fam == "stable":
        return ExponentDescriptor.stable(args.alpha, c)
    return ExponentDescriptor.semistable(args.alpha, args.b, args.eps, c)


def _positive_int(name, v, low=1):
    if v < low:
        raise ValueError(f"{name} must be at least {low}, got {v}")


def _mc(args):
    if args.samples < 0:
        raise ValueError("samples must be non-negative")
    if args.samples == 0:
        return None
    return MonteCarlo(args.samples, args.seed, args.jobs, args.max_count)


def cmd_gv(args):
    desc = _descriptor(args)
    grid = _grid(args)
    for p in args.p:
        if not 0.0 < p <= 1.0:
            raise ValueError(f"p must lie in (0, 1], got {p}")
    t = grid.points(desc.period)
    gv, idf = gv_transform(desc), id_cf(desc)
    g = desc(t)
    v = check_charfn(gv, t)
    roundtrip = np.abs(gv_invert(gv, t) - g)
    compound = 0.0
    for p in args.p:
        # compounding 1/(1+g) with p gives 1/(1+g/p)
        lhs = geometric_compound_cf(p, gv)(t)
        rhs = gv_transform(scaled_exponent(desc, 1.0 / p))(t)
        compound = max(compound, float(np.max(np.abs(lhs - rhs))))
    w = idf(t)
    rows = [{"t": ti, "g": gi.real, "gv": vi.real, "id": wi.real, "roundtrip_error": ri}
            for ti, gi, vi, wi, ri in zip(t.tolist(), g, v, w, roundtrip.tolist())]
    worst = float(np.max(roundtrip))
    ok = worst <= ALGEBRAIC_TOL and compound <= ALGEBRAIC_TOL
    return RunResult("pass" if ok else "fail", ["t", "g", "gv", "id", "roundtrip_error"],
                     rows, {"exponent": desc.describe(), "max_roundtrip_error": worst,
                            "max_compounding_error": compound,
                            "tolerance": ALGEBRAIC_TOL},
                     plot=("t", "gv", False))


def cmd_un_converge(args):
    desc = _descriptor(args)
    return RunResult.from_report(run_un_convergence(desc, args.n_list, _grid(args), _mc(args)))


def cmd_gss(args):
    _positive_int("n-max", args.n_max)
    for p in args.p:
        if not 0.0 < p < 1.0:
            raise ValueError(f"p must lie in (0, 1), got {p}")
    if not 0.0 < args.alpha <= 2.0:
        raise ValueError(f"alpha must lie in (0, 2], got {args.alpha}")
    rep = run_gss_self_attraction(args.alpha, args.p, args.n_max, _grid(args), args.tol)
    return RunResult.from_report(rep)


def cmd_schedule_check(args):
    _positive_int("n-max", args.n_max)
    seq = parse_sequence(args.p_seq)
    sched = AttractionSchedule.custom(seq, label=args.p_seq)
    rows = []
    for n in range(1, args.n_max + 1):
        p = seq(n)
        if not 0 < p <= 1:
            raise ValueError(f"p_{n} = {p} is outside (0, 1]")
        inv = math.floor(1 / p)
        rows.append({"n": n, "p": str(p), "floor_inverse": inv,
                     "verdict": "pass" if inv == n else "fail"})
    rep = validate_schedule_floor(sched, args.n_max)
    metrics = {"p_seq": args.p_seq, "failures": " ".join(map(str, rep.failures)) or "none",
               "failure_count": len(rep.failures)}
    return RunResult("pass" if rep.ok else "fail", ["n", "p", "floor_inverse", "verdict"],
                     rows, metrics, plot=("n", "floor_inverse", False))


def cmd_pga(args):
    desc = ExponentDescriptor.semistable(args.alpha, args.b, args.eps, args.c, args.a)
    _positive_int("n-max", args.n_max, 3)
    rep = run_pga_experiment(desc, args.n_max, _grid(args), _mc(args), args.tol)
    return RunResult.from_report(rep)


def cmd_duality(args):
    desc = _descriptor(args)
    _positive_int("n-max", args.n_max, 5)
    rep = run_duality_experiment(desc, args.a, args.n_max, _grid(args), _mc(args), args.tol)
    return RunResult.from_report(rep)


def cmd_transitivity(args):
    _positive_int("n-max", args.n_max, 5)
    if args.chain == "linnik":
        descs, scheds = linnik_chain(args.alpha, args.a)
    else:
        descs, scheds = semistable_chain(args.alpha, args.b, args.eps, args.gaussian_c)
    rep = run_transitivity_experiment(*descs, scheds, args.n_max, _grid(args), args.tol)
    return RunResult.from_report(rep)


def _law_cf(args):
    if args.law == "laplace":
        return gv_transform(ExponentDescriptor.stable(2.0))
    if args.law == "linnik":
        return gv_transform(ExponentDescriptor.stable(args.alpha))
    if args.law == "normal":
        return id_cf(ExponentDescriptor.gaussian(0.5))
    return gv_transform(ExponentDescriptor.semistable(args.alpha, args.b, args.eps))


def cmd_gid_check(args):
    for r in args.r_list:
        if not r > 0:
            raise ValueError(f"r must be positive, got {r}")
    phi = _law_cf(args)
    cols = ["r", "step", "size", "min_eigenvalue", "verdict"]
    if args.search:
        found = psd_witness_search(phi, args.r_list)
        rows = [{"r": r, "step": h, "size": m, "min_eigenvalue": e,
                 "verdict": "fail" if e < -PSD_TOL else "pass"} for r, h, m, e in found.trials]
        metrics = {"law": args.law, "witness_found": found.found,
                   "grids_skipped": found.skipped, "tolerance": PSD_TOL}
        if found.best is not None:
            r, h, m, e = found.best
            metrics.update({"witness_r": r, "witness_step": h, "witness_size": m,
                            "witness_min_eigenvalue": e})
        # a witness disproves GID
        return RunResult("fail" if found.found else "pass", cols, rows, metrics,
                         plot=("r", "min_eigenvalue", False))
    grid = _grid(args)
    rep = gid_necessary_check(phi, args.r_list, grid)
    rows = [{"r": r, "step": grid.step, "size": grid.size, "min_eigenvalue": e,
             "verdict": "pass" if e >= -PSD_TOL else "fail"}
            for r, e in rep.min_eigenvalues.items()]
    return RunResult("pass" if rep.passed else "fail", cols, rows,
                     {"law": args.law, "tolerance": PSD_TOL},
                     plot=("r", "min_eigenvalue", False))


def cmd_thinning(args):
    if args.events < 1:
        raise ValueError("events must be positive")
    if args.horizon is not None and not args.horizon > 0:
        raise ValueError("horizon must be positive")
    rep = thinning_invariance_test(args.alpha, args.p, args.horizon, RandomStream(args.seed),
                                   args.events, args.deterministic)
    return RunResult.from_report(rep, plot=("n", "ks", False))


def cmd_semilaplace_check(args):
    desc = ExponentDescriptor.semistable(args.alpha, args.b, args.eps, args.c, args.a)
    grid = _grid(args)
    residual = semilaplace_scaling_residual(desc, grid)
    adm = check_admissible(desc, grid=grid)
    rows = [{"order": desc.order_b, "multiplier": desc.multiplier_a, "residual": residual,
             "verdict": "pass" if residual <= ALGEBRAIC_TOL else "fail"}]
    metrics = {"exponent": desc.describe(), "scaling_residual": residual,
               "epsilon_max": adm.epsilon_max, "admissible": adm.admissible,
               "psd_check_passed": adm.grid_check.passed}
    ok = residual <= ALGEBRAIC_TOL
    if args.b2 is not None:
        col = order_collapse_check(desc, args.b2, grid)
        rows.append({"order": args.b2, "multiplier": args.b2 ** -args.alpha,
                     "residual": col.residual_b2,
                     "verdict": "pass" if col.collapses else "fail"})
        metrics["b2_residual"] = col.residual_b2
        metrics["collapses"] = col.collapses
        ratio = math.log(desc.order_b) / math.log(args.b2)
        metrics["log_order_ratio"] = ratio
    metrics["tolerance"] = ALGEBRAIC_TOL
    return RunResult("pass" if ok else "fail", ["order", "multiplier", "residual", "verdict"],
                     rows, metrics, plot=("order", "residual", True))


COMMANDS = {
    "gv": cmd_gv, "un-converge": cmd_un_converge, "gss": cmd_gss,
    "schedule-check": cmd_schedule_check, "pga": cmd_pga, "duality": cmd_duality,
    "transitivity": cmd_transitivity, "gid-check": cmd_gid_check,
    "thinning": cmd_thinning, "semilaplace-check": cmd_semilaplace_check,
}


# -- Output -------------------------------------------------------------------

def _format(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (list, tuple)):
        return ",".join(_format(x) for x in v)
    return str(v)


def config_header(args):
    items = [("command", args.command)]
    items += sorted((k, v) for k, v in vars(args).items() if k not in _RUNTIME_KEYS)
    items.append(("version", __version__))
    return [f"{k} = {_format(v)}" for k, v in items]


def render_csv(result, header):
    lines = [f"# {h}" for h in header]
    lines.append(",".join(result.columns))
    for row in result.rows:
        lines.append(",".join(_format(row.get(c)) for c in result.columns))
    return "\n".join(lines) + "\n"


def render_summary(result, args):
    lines = [f"verdict: {result.verdict}"]
    lines += [f"{k}: {_format(v)}" for k, v in result.metrics.items()]
    if hasattr(args, "seed"):
        lines.append(f"seed: {args.seed}")
    lines.append(f"backend: {_backend.current()}")
    lines.append(f"jobs: {args.jobs}")
    lines += [f"note: {n}" for n in result.notes]
    return "\n".join(lines) + "\n"


def render_gnuplot(result, csv_name):
    x, y, logy = result.plot
    xi, yi = result.columns.index(x) + 1, result.columns.index(y) + 1
    lines = ["set datafile separator ','", "set key autotitle columnhead",
             f"set xlabel '{x}'", f"set ylabel '{y}'"]
    if logy:
        lines.append("set logscale y")
    lines += ["set terminal pngcairo size 800,500 noenhanced",
              f"set output '{os.path.splitext(csv_name)[0]}.png'",
              f"plot '{csv_name}' using {xi}:{yi} with linespoints"]
    return "\n".join(lines) + "\n"


def write_outputs(result, args):
    os.makedirs(args.out, exist_ok=True)
    stem = args.command
    csv_name = f"{stem}.csv"
    files = {csv_name: render_csv(result, config_header(args)),
             f"{stem}_summary.txt": render_summary(result, args),
             f"{stem}.gp": render_gnuplot(result, csv_name)}
    for name, text in files.items():
        with open(os.path.join(args.out, name), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return [os.path.join(args.out, n) for n in files]


def run(args):
    if args.jobs < 1:
        raise ValueError("jobs must be at least 1")
    result = COMMANDS[args.command](args)
    write_outputs(result, args)
    return result


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parse_args(argv)
        result = run(args)
    except UsageError as exc:
        print(f"error: usage: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, PoleError, NotImplementedError, OSError) as exc:
        print(f"error: input: {' '.join(str(exc).split())}", file=sys.stderr)
        return EXIT_USAGE
    print(f"verdict: {result.verdict}")
    return EXIT[result.verdict]


if __name__ == "__main__":
    sys.exit(main())
