"""Acceptance criteria, one test each.

Every test appends a single ``[PASS]`` / ``[FAIL]`` line to ``VERDICTS``;
``conftest.py`` prints them after the run.  Running this file directly
prints the same lines.  Tolerances are the stated ones and are not tuned.
"""

import math
import time

import numpy as np
import scipy.linalg

from groundstate.construct import (HypothesisViolated, construct_ground_measure,
                                   flux_balance_check)
from groundstate.entropy import entropy_density, entropy_dual
from groundstate.htransform import check_ground_measure, verify_triple
from groundstate.model import MEASURE_SUM_TOL, jordan_model
from groundstate.semigroup import duhamel_solve, growth_constant, kernel, normalized_kernel, sandwich_check
from groundstate.spectral import eigen_equilibrium, principal
from groundstate.variational import (dv_supremum, inner_objective, log_inequality_check,
                                     logpm_inequality_check, rate_I, rate_IV)

from factories import random_irreducible, random_measure, random_reversible, random_sparse

VERDICTS = []


def record(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})"
    VERDICTS.append(line)
    print(line)
    assert ok, line


# 1 -------------------------------------------------------------------------

def test_jordan_counterexample():
    start = time.perf_counter()
    m = jordan_model()
    lam = principal(m).lambda0
    iv = max(abs(rate_IV(m, [p, 1 - p], lam).value) for p in np.linspace(0, 1, 11))
    grid = np.round(np.linspace(0, 1, 101), 12)
    passing = [float(p) for p in grid
               if check_ground_measure(m, [p, 1 - p], lam, tol=1e-7).passed]
    growth_err = max(abs(normalized_kernel(m, lam, t).sum(axis=1).max() - (1 + t))
                     for t in (1.0, 10.0, 100.0))
    flagged = growth_constant(m, lam).unbounded
    try:
        construct_ground_measure(m, [0.5, 0.5], lam)
        refused = False
    except HypothesisViolated:
        refused = True
    elapsed = time.perf_counter() - start
    ok = (abs(lam) <= 1e-12 and iv <= 1e-6 and passing == [1.0] and growth_err <= 1e-8
          and flagged and refused and elapsed < 1.0)
    record(1, "Jordan-block counterexample", ok,
           f"lambda0={lam:.3g}, max|I^V|={iv:.2e}, ground measures {passing} as weight on "
           f"state 0, growth err {growth_err:.1e}, unbounded={flagged}, refused={refused}, "
           f"{elapsed:.2f} s")


# 2 -------------------------------------------------------------------------

def test_variational_spectral_duality():
    start = time.perf_counter()
    rng = np.random.default_rng(2002)
    worst_gap, bracket_ok = 0.0, True
    for _ in range(50):
        m = random_irreducible(rng, n=int(rng.integers(2, 9)))
        lam = principal(m).lambda0
        worst_gap = max(worst_gap, abs(dv_supremum(m).lambda0 - lam))
        bracket_ok &= m.V.min() - 1e-10 <= lam <= m.V.max() + 1e-10
    elapsed = time.perf_counter() - start
    ok = worst_gap <= 1e-6 and bracket_ok and elapsed < 60
    record(2, "variational-spectral duality", ok,
           f"50 models, max |dv - spectral| = {worst_gap:.2e}, min V <= lambda0 <= max V: "
           f"{bracket_ok}, {elapsed:.1f} s")


# 3 -------------------------------------------------------------------------

def dirichlet_oracle(L, rho, mu):
    s = np.sqrt(mu / rho)
    return float(-(rho * s) @ (L @ s))


def test_reversible_rayleigh_ritz():
    rng = np.random.default_rng(3003)
    worst_rate, triples_ok = 0.0, True
    for _ in range(20):
        m, rho = random_reversible(rng)
        for k in range(5):
            mu = random_measure(rng, m.n)
            worst_rate = max(worst_rate, abs(rate_I(m, mu).value - dirichlet_oracle(m.L, rho, mu)))
        # symmetric eigenproblem in L^2(rho): D^{1/2} A D^{-1/2}
        d = np.sqrt(rho)
        S = d[:, None] * m.A / d[None, :]
        w, U = np.linalg.eigh((S + S.T) / 2)
        psi = np.abs(U[:, -1]) / d
        psi /= math.sqrt(rho @ psi ** 2)
        pi = psi * rho / (psi * rho).sum()
        mu = psi ** 2 * rho
        rep = verify_triple(m, pi, mu / mu.sum(), lambda0=w[-1], tol_predicate=1e-7)
        triples_ok &= rep.is_ground_measure and rep.is_ground_state and rep.is_equilibrium
    ok = worst_rate <= 1e-6 and triples_ok
    record(3, "reversible Rayleigh-Ritz", ok,
           f"20 chains x 5 measures, max |I - Dirichlet form| = {worst_rate:.2e}, "
           f"(psi rho, psi^2 rho) triples pass: {triples_ok}")


# 4 -------------------------------------------------------------------------

def test_triple_closure():
    rng = np.random.default_rng(4004)
    all_pass, exercised, total = True, 0, 0
    failures = {}
    for _ in range(100):
        m = random_irreducible(rng)
        sr = principal(m)
        pi = sr.phi.weights
        mu = eigen_equilibrium(m, sr).weights
        rep = verify_triple(m, pi, mu, lambda0=sr.lambda0, tol_predicate=1e-8)
        all_pass &= rep.is_ground_measure and rep.is_ground_state and rep.is_equilibrium
        for _ in range(30):
            target = rng.integers(2)
            x = rng.integers(m.n)
            size = 10.0 ** rng.uniform(-13, -2)
            p, q = pi.copy(), mu.copy()
            obj = p if target == 0 else q
            obj[x] *= 1 + size * rng.choice([-1, 1])
            obj /= obj.sum()
            r = verify_triple(m, p, q, lambda0=sr.lambda0, tol_predicate=1e-8,
                              tol_implication=1e-7)
            total += 1
            exercised += any(i.status != "unexercised" for i in r.implications)
            for imp in r.implications:
                if imp.status == "fail":
                    failures.setdefault(imp.conclusion, []).append(
                        (size, r.ground_state.score, r.equilibrium.score))
    violations = sum(len(v) for v in failures.values())
    ok = all_pass and violations == 0
    detail = (f"100 Perron triples pass at 1e-8: {all_pass}; {total} perturbations, "
              f"{exercised} with two predicates passing, {violations} implication failures")
    for conclusion, rows in sorted(failures.items()):
        size, gs, eq = np.log10(np.array(rows)).T
        detail += (f"; '=> {conclusion}' fails {len(rows)}x for perturbations "
                   f"{10 ** size.min():.0e}..{10 ** size.max():.0e}, log-log slope of "
                   f"ground-state residual {np.polyfit(size, gs, 1)[0]:.2f} vs "
                   f"I^V {np.polyfit(size, eq, 1)[0]:.2f}")
    record(4, "triple closure", ok, detail)


# 5 -------------------------------------------------------------------------

def test_construction_pipeline():
    start = time.perf_counter()
    rng = np.random.default_rng(5005)
    worst = dict(l1=0.0, ratio_lo=np.inf, ratio_hi=0.0, H=-np.inf, Z=True, flux=-np.inf)
    for _ in range(20):
        m = random_irreducible(rng)
        sr = principal(m)
        mu = eigen_equilibrium(m, sr).weights
        tr = construct_ground_measure(m, mu, sr.lambda0, T_max=50, limit=sr.phi.weights)
        worst["l1"] = max(worst["l1"], tr.tv_to_limit[-1])
        ratio = tr.invariance_residual[tr.at(25)] / tr.invariance_residual[tr.at(50)]
        worst["ratio_lo"] = min(worst["ratio_lo"], ratio)
        worst["ratio_hi"] = max(worst["ratio_hi"], ratio)
        worst["H"] = max(worst["H"], float(np.max(tr.H - tr.log_M)))
        # mu itself sums to 1 only up to rounding, hence Z_0 = 1 - O(1e-16)
        worst["Z"] &= bool(tr.Z.min() >= 1 - MEASURE_SUM_TOL and tr.Z.max() <= tr.M + 1e-9)
        for k in range(tr.at(1.0), tr.t_grid.size, 20):
            T = tr.t_grid[k]
            f = flux_balance_check(m, tr.pi_bar[k], sr.lambda0, T, tr.M)
            worst["flux"] = max(worst["flux"], f.residual - f.bound)
    elapsed = time.perf_counter() - start
    ok = (worst["l1"] <= 0.05 and 1.6 <= worst["ratio_lo"] and worst["ratio_hi"] <= 2.6
          and worst["H"] <= 1e-6 and worst["Z"] and worst["flux"] <= 1e-8 and elapsed < 120)
    record(5, "construction pipeline", ok,
           f"20 models, max l1 to Perron {worst['l1']:.2e}, residual ratio T=25/50 in "
           f"[{worst['ratio_lo']:.3f}, {worst['ratio_hi']:.3f}], max H - log M "
           f"{worst['H']:.2e}, 1 <= Z <= M: {worst['Z']}, max flux - 2M/T "
           f"{worst['flux']:.2e}, {elapsed:.1f} s")


# 6 -------------------------------------------------------------------------

def test_semigroup_numerics():
    rng = np.random.default_rng(6006)
    law = 0.0
    for _ in range(20):
        m = random_sparse(rng)
        s, t = rng.uniform(0, 4, size=2)
        P = kernel(m, s + t).entries
        law = max(law, float(np.max(np.abs(P - kernel(m, s).entries @ kernel(m, t).entries))
                             / np.max(np.abs(P))))
    orders = []
    for _ in range(3):
        m = random_irreducible(rng, n=int(rng.integers(2, 6)))
        f = rng.uniform(0, 2, size=m.n)
        ref = scipy.linalg.expm(m.A) @ f
        errs = [np.max(np.abs(duhamel_solve(m, 1.0, f, N) - ref)) for N in (64, 128, 256)]
        orders += list(np.log2(np.array(errs[:-1]) / np.array(errs[1:])))
    sandwich = 0
    for _ in range(100):
        m = random_sparse(rng)
        f = rng.uniform(0, 2, size=m.n) * (rng.random(m.n) < 0.8)
        sandwich += bool(sandwich_check(m, float(rng.uniform(0, 5)), f))
    ok = law <= 1e-9 and all(1.8 <= o <= 2.2 for o in orders) and sandwich == 100
    record(6, "semigroup numerics", ok,
           f"semigroup law residual {law:.1e}, Duhamel orders "
           f"[{min(orders):.3f}, {max(orders):.3f}], sandwich {sandwich}/100")


# 7 -------------------------------------------------------------------------

def test_entropy_duality():
    rng = np.random.default_rng(7007)
    worst, flags_ok = 0.0, True
    for _ in range(200):
        n = int(rng.integers(2, 8))
        mu = random_measure(rng, n, zeros=int(rng.integers(0, n)))
        pi = random_measure(rng, n, zeros=int(rng.integers(0, n)))
        d, e = entropy_dual(mu, pi), entropy_density(mu, pi)
        violated = bool(np.any((mu > 0) & (pi == 0)))
        flags_ok &= (not d.finite) == violated and (not e.finite) == violated
        if not violated:
            worst = max(worst, abs(d.value - e.value))
    h = entropy_dual([1.0, 0.0], [0.5, 0.5]).value
    ok = worst <= 1e-7 and flags_ok and abs(h - math.log(2)) <= 1e-9
    record(7, "entropy duality", ok,
           f"200 pairs, max |dual - density| = {worst:.1e}, infinity flag exact: {flags_ok}, "
           f"H(delta_0, uniform) - log 2 = {h - math.log(2):.1e}")


# 8 -------------------------------------------------------------------------

def test_log_inequalities():
    rng = np.random.default_rng(8008)
    log_worst, pm_worst, zero_worst = np.inf, np.inf, 0.0
    for _ in range(200):
        m = random_irreducible(rng)
        sr = principal(m)
        mu = random_measure(rng, m.n, zeros=int(rng.integers(0, 2)))
        u = np.exp(rng.normal(size=m.n))
        t = float(rng.uniform(0, 5))
        iv = rate_IV(m, mu, sr.lambda0).value
        log_worst = min(log_worst, log_inequality_check(m, mu, u, sr.lambda0, t, iv))
        r = logpm_inequality_check(m, mu, sr.psi, u, sr.lambda0, t, iv)
        pm_worst = min(pm_worst, r.lhs - r.rhs)
        zero_worst = max(zero_worst, abs(log_inequality_check(m, mu, u, sr.lambda0, 0.0, iv)))
        r0 = logpm_inequality_check(m, mu, sr.psi, u, sr.lambda0, 0.0, iv)
        zero_worst = max(zero_worst, abs(r0.lhs - r0.rhs))
    ok = log_worst >= -1e-8 and pm_worst >= -1e-8 and zero_worst <= 1e-12
    record(8, "log inequalities", ok,
           f"200 instances each, min log slack {log_worst:.2e}, min log+/log- slack "
           f"{pm_worst:.2e}, max |t=0 defect| {zero_worst:.1e}")


# 9 -------------------------------------------------------------------------

def test_gradient_oracle():
    rng = np.random.default_rng(9009)
    worst, eps = 0.0, 1e-5
    for _ in range(100):
        m = random_irreducible(rng)
        mu = random_measure(rng, m.n)
        g = rng.normal(size=m.n)
        _, grad = inner_objective(m, mu, g)
        fd = np.array([(inner_objective(m, mu, g + eps * e)[0]
                        - inner_objective(m, mu, g - eps * e)[0]) / (2 * eps)
                       for e in np.eye(m.n)])
        worst = max(worst, float(np.max(np.abs(grad - fd)) / np.max(np.abs(grad))))
    record(9, "gradient oracle", worst <= 1e-6,
           f"100 points, max relative |grad - central difference| = {worst:.1e}")


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_"):
            try:
                fn()
            except AssertionError:
                pass
