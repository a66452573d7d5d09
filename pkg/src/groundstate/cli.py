"""Batch command line interface.

Exit status: 0 when every check passed, 1 when a mathematical check failed,
2 on usage or input errors.  Reports go to stdout and are deterministic;
timing goes to stderr.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import construct as cons
from . import entropy as ent
from . import htransform as ht
from . import semigroup as sg
from . import spectral as sp
from . import variational as var
from .model import (MarkovModel, ModelFormatError, ProbMeasure, is_irreducible,
                    jordan_model, load_model, two_state_model, validate)

EXIT_OK, EXIT_CHECK, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _num(x) -> str:
    if x is None:
        return "inf"
    return f"{float(x):.12g}"


def _vec(v) -> str:
    return "[" + ", ".join(_num(x) for x in np.asarray(v, dtype=float)) + "]"


class Report:
    def __init__(self, argv):
        self.lines = ["command: groundstate " + " ".join(argv)]
        self.checks = []

    def add(self, text=""):
        self.lines.append(text)

    def value(self, name, v):
        self.lines.append(f"  {name} = {_num(v) if np.ndim(v) == 0 else _vec(v)}")

    def check(self, name, ok, detail=""):
        ok = bool(ok)
        self.checks.append(ok)
        self.lines.append(f"  [{'PASS' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else ""))

    def digest(self, model: MarkovModel):
        self.add(f"model: n = {model.n}, min V = {_num(model.V.min())}, "
                 f"max V = {_num(model.V.max())}, irreducible = {is_irreducible(model)}")

    def render(self) -> str:
        failed = self.checks.count(False)
        verdict = "PASS" if not failed else "FAIL"
        return "\n".join(self.lines + [f"summary: {verdict} ({len(self.checks) - failed}/"
                                       f"{len(self.checks)} checks passed)"]) + "\n"

    @property
    def exit_code(self) -> int:
        return EXIT_OK if all(self.checks) else EXIT_CHECK


# -- argument helpers ---------------------------------------------------------

def _times(text):
    try:
        vals = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma separated list of times: {text!r}")
    if any(v < 0 for v in vals):
        raise argparse.ArgumentTypeError("times must be >= 0")
    return vals


def _load(args) -> MarkovModel:
    if args.model is None:
        raise UsageError("--model is required")
    try:
        model = load_model(args.model)
    except FileNotFoundError:
        raise UsageError(f"model file not found: {args.model}")
    except ModelFormatError as exc:
        raise UsageError(str(exc))
    return model


def _require_valid(model):
    report = validate(model)
    if not report:
        raise UsageError(str(report))


def _measure(model: MarkovModel, spec: str, spectral=None) -> ProbMeasure:
    if spec in model.measures:
        try:
            return ProbMeasure(model.measures[spec])
        except ValueError as exc:
            raise UsageError(f"measure {spec!r}: {exc}")
    if spec == "uniform":
        return ProbMeasure.uniform(model.n)
    if spec in ("perron", "equilibrium"):
        sr = spectral or sp.principal(model)
        if spec == "perron":
            return sr.phi
        try:
            return sp.eigen_equilibrium(model, sr)
        except sp.DegenerateSpectrum as exc:
            raise UsageError(f"no equilibrium measure from Perron data: {exc}")
    try:
        w = [float(x) for x in spec.split(",")]
    except ValueError:
        raise UsageError(f"unknown measure {spec!r}")
    if len(w) != model.n:
        raise UsageError(f"measure {spec!r} has {len(w)} entries, model has {model.n} states")
    try:
        return ProbMeasure(w)
    except ValueError as exc:
        raise UsageError(f"measure {spec!r}: {exc}")


def _lambda0(model, args, report=None):
    source = args.lambda0
    if source == "spectral":
        value = sp.principal(model).lambda0
    elif source == "growth":
        value = sp.lambda0_growth(model, t_max=args.tmax)
    else:
        value = var.dv_supremum(model).lambda0
    if report is not None:
        report.add(f"lambda0 source: {source}")
        report.value("lambda0", value)
    return value


# -- subcommands --------------------------------------------------------------

def cmd_validate(args, report):
    model = _load(args)
    report.digest(model)
    result = validate(model, tol=args.tol_rowsum)
    report.check("generator invariants", result.passed, f"row-sum tol {args.tol_rowsum:g}")
    for v in result.violations:
        report.add(f"    {v}")


def _eigen(model, report, tol=1e-8):
    sr = sp.principal(model)
    scale = float(np.abs(model.A).sum(axis=1).max()) or 1.0
    report.value("lambda0", sr.lambda0)
    report.value("psi (right, max 1)", sr.psi)
    report.value("phi (left, mass 1)", sr.phi.weights)
    report.add(f"  degenerate = {str(sr.degenerate).lower()} (algebraic multiplicity "
               f"{sr.algebraic_multiplicity}, geometric {sr.geometric_multiplicity})")
    report.check("min V <= lambda0 <= max V",
                 model.V.min() - 1e-10 <= sr.lambda0 <= model.V.max() + 1e-10, "tol 1e-10")
    if not sr.degenerate:
        report.check("eigen residuals", max(sr.residuals) <= tol * max(scale, 1.0),
                     f"right {_num(sr.residuals[0])}, left {_num(sr.residuals[1])}, "
                     f"tol {tol:g}*||L+V||")
    return sr


def cmd_eigen(args, report):
    model = _load(args)
    _require_valid(model)
    report.digest(model)
    _eigen(model, report)


def cmd_growth(args, report):
    model = _load(args)
    _require_valid(model)
    report.digest(model)
    lam = _lambda0(model, args, report)
    g = sg.growth_constant(model, lam, t_max=args.tmax, samples=args.samples)
    report.value("sup_t exp(-lambda0 t)||P_t^V|| (sampled)", g.M)
    report.value("lambda0 from growth rate", sp.lambda0_growth(model, t_max=args.tmax))
    if g.unbounded:
        report.add("  unbounded growth detected: boundedness hypothesis of the "
                   "Perron-Frobenius theorem appears violated (heuristic, not a proof)")
    else:
        report.add("  growth appears bounded (heuristic)")


def cmd_dv(args, report):
    model = _load(args)
    _require_valid(model)
    report.digest(model)
    dv = var.dv_supremum(model)
    sr = sp.principal(model)
    report.value("lambda0 (variational)", dv.lambda0)
    report.value("lambda0 (spectral)", sr.lambda0)
    report.value("maximizing measure", dv.maximizer_mu.weights)
    report.value("duality gap certificate", dv.duality_gap)
    report.check("variational = spectral", abs(dv.lambda0 - sr.lambda0) <= args.tol_dv,
                 f"|diff| = {_num(abs(dv.lambda0 - sr.lambda0))}, tol {args.tol_dv:g}")
    iv = var.rate_IV(model, dv.maximizer_mu, sr.lambda0).value
    report.check("maximizer is an equilibrium measure", abs(iv) <= args.tol_dv,
                 f"I^V = {_num(iv)}, tol {args.tol_dv:g}")


def cmd_rate(args, report):
    model = _load(args)
    _require_valid(model)
    report.digest(model)
    mu = _measure(model, args.mu or "uniform")
    lam = _lambda0(model, args, report)
    r = var.rate_I(model, mu)
    riv = var.rate_IV(model, mu, lam)
    report.value("mu", mu.weights)
    report.value("I(mu)", r.value)
    report.value("I^V(mu)", riv.value)
    report.add(f"  inner minimizer converged = {str(r.converged).lower()} "
               f"({r.iterations} Newton steps)")
    report.check("I^V(mu) >= 0", riv.value >= -1e-8, "tol 1e-8")


def cmd_equilibrium(args, report):
    model = _load(args)
    _require_valid(model)
    report.digest(model)
    sr = sp.principal(model)
    try:
        mu = sp.eigen_equilibrium(model, sr)
    except sp.DegenerateSpectrum as exc:
        report.check("equilibrium measure from Perron data", False, str(exc))
        return
    report.value("mu = phi*psi (normalized)", mu.weights)
    iv = var.rate_IV(model, mu, sr.lambda0).value
    report.check("I^V(mu) = 0", abs(iv) <= args.tol_predicate,
                 f"I^V = {_num(iv)}, tol {args.tol_predicate:g}")


def cmd_entropy(args, report):
    model = _load(args)
    report.digest(model)
    mu = _measure(model, args.mu or "uniform")
    pi = _measure(model, args.pi or "uniform")
    dual = ent.entropy_dual(mu, pi)
    dens = ent.entropy_density(mu, pi)
    report.value("H(mu, pi) dual", dual.value)
    report.value("H(mu, pi) density", dens.value)
    report.check("dual and density agree on finiteness", dual.finite == dens.finite)
    if dual.finite and dens.finite:
        report.check("dual = density", abs(dual.value - dens.value) <= 1e-7,
                     f"|diff| = {_num(abs(dual.value - dens.value))}, tol 1e-7")


def cmd_htransform(args, report):
    model = _load(args)
    _require_valid(model)
    report.digest(model)
    sr = sp.principal(model)
    lam = _lambda0(model, args, report)
    mu = _measure(model, args.mu) if args.mu else None
    psi = sr.psi
    report.value("psi (right Perron vector)", psi)
    for t in args.t:
        try:
            K = ht.h_kernel(model, psi, lam, t, mu=mu)
        except ht.ZeroDensityOnSupport as exc:
            report.check(f"t = {_num(t)}: h-transform defined", False, str(exc))
            continue
        supp = np.ones(model.n, bool) if mu is None else mu.support
        defect = float(np.max(np.abs(K.row_sums - 1.0)[supp]))
        report.add(f"  t = {_num(t)}: kernel rows = {[_vec(r) for r in K.entries]}")
        report.check(f"t = {_num(t)}: Markov (row sums 1 on support)",
                     defect <= args.tol_predicate,
                     f"defect {_num(defect)}, tol {args.tol_predicate:g}")


def _triple(model, report, pi, mu, lam, t_set, tol_p, tol_i):
    r = ht.verify_triple(model, pi, mu, t_set, lam, tol_p, tol_i)
    report.value("pi", np.asarray(pi))
    report.value("mu", np.asarray(mu))
    report.value("psi = dmu/dpi", r.psi.values)
    for name, p in (("ground measure", r.ground_measure), ("ground state", r.ground_state),
                    ("equilibrium", r.equilibrium)):
        report.add(f"  {name}: {'yes' if p.passed else 'no'} "
                   f"(residual {_num(p.score)}, tol {p.tol:g})")
    report.add(f"  psi log psi integrable: {str(r.entropy_finite).lower()}")
    report.add(f"  invariance of mu under the h-transform: residual {_num(r.q_invariance_residual)}")
    for imp in r.implications:
        if imp.status == "unexercised":
            report.add(f"  implication {imp}")
        else:
            report.check(f"implication {' & '.join(imp.premises)} => {imp.conclusion}",
                         imp.status == "pass", f"tol {tol_i:g}")
    return r


def cmd_triple(args, report):
    model = _load(args)
    _require_valid(model)
    report.digest(model)
    if args.t == (0.0,):
        report.add("  warning: t = 0 only; every predicate holds trivially")
    lam = _lambda0(model, args, report)
    if args.auto:
        sr = sp.principal(model)
        try:
            mu = sp.eigen_equilibrium(model, sr)
        except sp.DegenerateSpectrum as exc:
            report.check("Perron data available", False, str(exc))
            return
        pi = sr.phi
        report.add("  (pi, mu) from Perron data: pi = left vector, mu = phi*psi")
    else:
        if not (args.pi and args.mu):
            raise UsageError("triple needs --pi and --mu, or --auto")
        pi, mu = _measure(model, args.pi), _measure(model, args.mu)
    try:
        _triple(model, report, pi, mu, lam, args.t, args.tol_predicate, args.tol_implication)
    except ht.AbsoluteContinuityViolation as exc:
        report.check("mu << pi", False, str(exc))


def _construct(model, report, mu_spec, lam, args):
    try:
        mu = _measure(model, mu_spec)
        trace = cons.construct_ground_measure(model, mu, lam, T_max=args.tmax,
                                              grid_steps=args.grid, t_set=args.t)
    except cons.HypothesisViolated as exc:
        g = exc.growth
        report.add("  HypothesisViolated: exp(-lambda0 t)||P_t^V|| is unbounded; "
                   "neither the hypothesis nor the conclusion hold")
        for t in (1.0, 10.0, 100.0):
            k = int(np.argmin(np.abs(g.times - t)))
            if abs(g.times[k] - t) < 1e-12:
                report.value(f"exp(-lambda0 t)||P_t^V|| at t = {_num(t)}", g.values[k])
        report.check("boundedness hypothesis", False, "growth flagged unbounded (heuristic)")
        return None
    except cons.NotEquilibrium as exc:
        report.check("starting measure is an equilibrium measure", False, str(exc))
        return None
    idx = [trace.at(T) for T in (args.tmax / 4, args.tmax / 2, args.tmax)]
    report.value("mu", np.asarray(mu))
    report.value("M (sup of exp(-lambda0 t)||P_t^V||)", trace.M)
    report.value("pi_bar at T_max", trace.limit)
    for k in idx:
        tv = "" if trace.tv_to_limit is None else f", l1 to Perron {_num(trace.tv_to_limit[k])}"
        report.add(f"  T = {_num(trace.t_grid[k])}: H(mu, pi_bar) = {_num(trace.H[k])}, "
                   f"invariance residual {_num(trace.invariance_residual[k])}{tv}")
    report.check("H(mu, pi_bar_T) <= log M", np.all(trace.H <= trace.log_M + 1e-6),
                 f"max H {_num(trace.H.max())}, log M {_num(trace.log_M)}, tol 1e-6")
    report.check("1 <= Z_t <= M", trace.Z.min() >= 1 - 1e-9 and trace.Z.max() <= trace.M + 1e-9,
                 f"Z in [{_num(trace.Z.min())}, {_num(trace.Z.max())}], tol 1e-9")
    flux = cons.flux_balance_check(model, trace.limit, lam, args.tmax, trace.M)
    report.check("flux balance", flux.holds,
                 f"residual {_num(flux.residual)} <= 2M/T = {_num(flux.bound)} (+1e-8)")
    report.check("pi_bar_Tmax is a ground measure", trace.final_check.passed,
                 f"residual {_num(trace.final_check.residual)}, tol {trace.final_check.tol:.6g}")
    ledger = cons.entropy_ledger(model, mu, trace)
    report.check("H(mu, pi_t) <= t I^V(mu) + log Z_t", all(r.holds for r in ledger),
                 f"{len(ledger)} grid times, tol 1e-6")
    if args.csv:
        out = Path(args.csv)
        out.mkdir(parents=True, exist_ok=True)
        trace.to_csv(out / "construct_trace.csv")
        report.add(f"  trace written to {out / 'construct_trace.csv'}")
    return trace


def cmd_construct(args, report):
    model = _load(args)
    _require_valid(model)
    report.digest(model)
    lam = _lambda0(model, args, report)
    _construct(model, report, args.mu or "equilibrium", lam, args)


def _demo_jordan(args, report):
    model = jordan_model()
    report.add("demo: Jordan block L = [[0,0],[1,-1]], V = (0,1); state 0 is absorbing")
    report.digest(model)
    report.check("model valid", validate(model).passed)
    sr = sp.principal(model)
    report.value("lambda0", sr.lambda0)
    report.check("lambda0 = 0", abs(sr.lambda0) <= 1e-12, "tol 1e-12")
    report.check("spectrum flagged degenerate (Jordan block)", sr.degenerate)

    ivs = [var.rate_IV(model, [p, 1 - p], sr.lambda0).value for p in np.linspace(0, 1, 11)]
    report.check("every mu = (p, 1-p) is an equilibrium measure", max(abs(v) for v in ivs) <= 1e-6,
                 f"max |I^V| over p in {{0, 0.1, ..., 1}} = {_num(max(abs(v) for v in ivs))}, tol 1e-6")

    grid = np.round(np.linspace(0, 1, 101), 12)
    passing = [p for p in grid
               if ht.check_ground_measure(model, [p, 1 - p], sr.lambda0).passed]
    report.add(f"  ground measures on the 0.01 simplex grid: {[_vec([p, 1 - p]) for p in passing]}")
    report.check("unique ground measure = point mass at the absorbing state",
                 len(passing) == 1 and passing[0] == 1.0, "tol 1e-7")

    err = max(abs(sg.normalized_kernel(model, 0.0, t).sum(axis=1).max() - (1 + t))
              for t in (1.0, 10.0, 100.0))
    report.check("exp(-lambda0 t)||P_t^V|| = 1 + t at t = 1, 10, 100", err <= 1e-8,
                 f"max error {_num(err)}, tol 1e-8")
    g = sg.growth_constant(model, sr.lambda0)
    report.check("growth flagged unbounded", g.unbounded)

    sub = Report([])
    _construct(model, sub, "uniform", sr.lambda0, args)
    # the refusal is the expected outcome here, so drop the sub-report verdict line
    report.lines.extend(line for line in sub.lines[1:] if not line.startswith("  ["))
    report.check("construction refuses (HypothesisViolated)", sub.checks == [False])


def _demo_chain2(args, report):
    model = two_state_model()
    report.add("demo: two-state chain with unit rates, V = (0, 1)")
    report.digest(model)
    sr = _eigen(model, report)
    golden = (math.sqrt(5) - 1) / 2
    report.check("lambda0 = (sqrt 5 - 1)/2", abs(sr.lambda0 - golden) <= 1e-12, "tol 1e-12")
    dv = var.dv_supremum(model)
    report.value("lambda0 (variational)", dv.lambda0)
    report.check("variational = spectral", abs(dv.lambda0 - sr.lambda0) <= 1e-6, "tol 1e-6")
    mu = sp.eigen_equilibrium(model, sr)
    _triple(model, report, sr.phi, mu, sr.lambda0, args.t, args.tol_predicate,
            args.tol_implication)
    _construct(model, report, "equilibrium", sr.lambda0, args)


def cmd_demo(args, report):
    {"jordan": _demo_jordan, "chain2": _demo_chain2}[args.name](args, report)


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", metavar="PATH", help="model JSON file")
    common.add_argument("--t", type=_times, default=ht.DEFAULT_TIMES, metavar="LIST",
                        help="comma separated times for the predicate checks")
    common.add_argument("--tmax", type=float, default=50.0, metavar="REAL",
                        help="horizon for growth estimates and the construction")
    common.add_argument("--grid", type=int, default=20, metavar="INT",
                        help="grid points per unit time in the construction")
    common.add_argument("--samples", type=int, default=201, help=argparse.SUPPRESS)
    common.add_argument("--csv", metavar="DIR", help="write traces as CSV into DIR")
    common.add_argument("--tol-predicate", type=float, default=ht.TOL_PREDICATE, metavar="REAL")
    common.add_argument("--tol-implication", type=float, default=ht.TOL_IMPLICATION, metavar="REAL")
    common.add_argument("--tol-dv", type=float, default=1e-6, metavar="REAL")
    common.add_argument("--tol-rowsum", type=float, default=1e-12, metavar="REAL")
    common.add_argument("--lambda0", choices=("spectral", "growth", "dv"), default="spectral")
    common.add_argument("--mu", metavar="MEASURE",
                        help="measure name from the model file, 'uniform', 'perron', "
                             "'equilibrium', or comma separated weights")
    common.add_argument("--pi", metavar="MEASURE", help="reference measure, same forms as --mu")

    parser = argparse.ArgumentParser(
        prog="groundstate",
        description="Principal eigenvalues, equilibrium measures, ground states and "
                    "ground measures of finite Schrodinger semigroups.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, help_ in [
        ("validate", cmd_validate, "check generator invariants"),
        ("eigen", cmd_eigen, "principal eigenvalue and Perron vectors"),
        ("growth", cmd_growth, "growth of exp(-lambda0 t)||P_t^V||"),
        ("dv", cmd_dv, "variational principal eigenvalue"),
        ("rate", cmd_rate, "rate functions I and I^V of a measure"),
        ("equilibrium", cmd_equilibrium, "equilibrium measure from Perron data"),
        ("entropy", cmd_entropy, "relative entropy by dual and density formulas"),
        ("htransform", cmd_htransform, "ground-state transform kernels"),
        ("triple", cmd_triple, "ground measure / ground state / equilibrium checks"),
        ("construct", cmd_construct, "ground measure by time averaging"),
    ]:
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=fn)
        if name == "triple":
            p.add_argument("--auto", action="store_true",
                           help="take pi and mu from the Perron vectors")
    p = sub.add_parser("demo", parents=[common], help="built-in worked examples")
    p.add_argument("name", choices=("jordan", "chain2"))
    p.set_defaults(func=cmd_demo)
    return parser


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    report = Report(argv)
    start = time.perf_counter()
    try:
        args.func(args, report)
    except UsageError as exc:
        print(f"groundstate: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(report.render())
    print(f"wall time: {time.perf_counter() - start:.3f} s", file=sys.stderr)
    return report.exit_code


def main():
    sys.exit(run())
