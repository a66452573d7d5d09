"""Ground states, ground measures and equilibrium measures, and the
ground-state transform ``P^{V,psi}_t u = e^{-lambda0 t} P_t^V(psi u) / psi``.

Every "almost surely mu" statement is read as "at every state charged by mu".
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .entropy import entropy_density
from .model import Density, MarkovModel, ProbMeasure
from .semigroup import Kernel, normalized_kernel
from .variational import rate_IV

__all__ = [
    "DEFAULT_TIMES",
    "ZeroDensityOnSupport",
    "PredicateResult",
    "Implication",
    "TripleReport",
    "h_kernel",
    "check_ground_state",
    "check_ground_measure",
    "check_equilibrium",
    "contraction_check",
    "verify_triple",
]

DEFAULT_TIMES = (0.25, 1.0, 3.0)
TOL_PREDICATE = 1e-7
TOL_IMPLICATION = 1e-6


class ZeroDensityOnSupport(ValueError):
    """``psi`` vanishes at a state charged by the measure."""


@dataclass
class PredicateResult:
    """Outcome of one defining predicate.

    ``residual`` is the raw defect; the pass decision compares
    ``residual / scale`` against ``tol``.
    """

    passed: bool
    residual: float
    tol: float
    scale: float = 1.0

    @property
    def score(self) -> float:
        return self.residual / self.scale

    def __bool__(self):
        return self.passed


def _lambda0(model, lambda0):
    if lambda0 is None:
        from .spectral import principal
        return principal(model).lambda0
    return float(lambda0)


def h_kernel(model: MarkovModel, psi, lambda0: float | None, t: float, mu=None) -> Kernel:
    """Kernel of the ground-state transform at time ``t``.

    ``K[x, y] = e^{-lambda0 t} P_t^V[x, y] psi[y] / psi[x]``.  Rows off the
    support of ``mu`` divide by 1 instead of ``psi[x]``; only rows on the
    support carry meaning.  Without ``mu`` every state counts as charged.

    Raises
    ------
    ZeroDensityOnSupport
        If ``psi[x] <= 0`` at a charged state ``x``.
    """
    psi = np.asarray(psi, dtype=float)
    lambda0 = _lambda0(model, lambda0)
    supp = np.ones(model.n, bool) if mu is None else np.asarray(mu, dtype=float) > 0
    bad = np.flatnonzero(supp & ~(psi > 0))
    if bad.size:
        raise ZeroDensityOnSupport(f"psi <= 0 at charged states {bad.tolist()}")
    denom = np.where(supp, psi, 1.0)
    K = normalized_kernel(model, lambda0, t) * psi[None, :] / denom[:, None]
    return Kernel(t, K, "htransform")


def check_ground_state(model: MarkovModel, psi, mu, lambda0: float | None = None,
                       t_set=DEFAULT_TIMES, tol: float = TOL_PREDICATE) -> PredicateResult:
    """Is ``psi > 0`` with ``e^{-lambda0 t} P_t^V psi = psi`` on the support of ``mu``?

    Residual is the largest defect over ``t_set`` and charged states; it
    passes when at most ``tol * max|psi|`` (max over charged states).
    """
    psi = np.asarray(psi, dtype=float)
    supp = np.asarray(mu, dtype=float) > 0
    lambda0 = _lambda0(model, lambda0)
    scale = float(np.max(np.abs(psi[supp]), initial=0.0)) or 1.0
    if not np.all(psi[supp] > 0):
        return PredicateResult(False, float("inf"), tol, scale)
    residual = 0.0
    for t in t_set:
        Kpsi = normalized_kernel(model, lambda0, t) @ psi
        residual = max(residual, float(np.max(np.abs(Kpsi - psi)[supp])))
    return PredicateResult(residual <= tol * scale, residual, tol, scale)


def check_ground_measure(model: MarkovModel, pi, lambda0: float | None = None,
                         t_set=DEFAULT_TIMES, tol: float = TOL_PREDICATE) -> PredicateResult:
    """Is ``pi^T e^{-lambda0 t} P_t^V = pi^T`` for every ``t`` in ``t_set``?

    The residual is the largest l1 defect.  Testing the row-vector identity
    covers all test functions at once.
    """
    pi = np.asarray(pi, dtype=float)
    lambda0 = _lambda0(model, lambda0)
    residual = 0.0
    for t in t_set:
        residual = max(residual,
                       float(np.abs(pi @ normalized_kernel(model, lambda0, t) - pi).sum()))
    return PredicateResult(residual <= tol, residual, tol)


def check_equilibrium(model: MarkovModel, mu, lambda0: float | None = None,
                      tol: float = TOL_PREDICATE) -> PredicateResult:
    """Does ``mu`` attain the Donsker-Varadhan supremum, i.e. ``I^V(mu) = 0``?"""
    value = rate_IV(model, mu, _lambda0(model, lambda0)).value
    return PredicateResult(abs(value) <= tol, abs(value), tol)


@dataclass
class ContractionResult:
    holds: bool
    lhs: float
    rhs: float

    def __bool__(self):
        return self.holds


def contraction_check(model: MarkovModel, pi, lambda0: float | None, t: float, f,
                      atol: float = 1e-9) -> ContractionResult:
    """``||e^{-lambda0 t} P_t^V f||_{L1(pi)} <= ||f||_{L1(pi)}`` for signed ``f``."""
    pi = np.asarray(pi, dtype=float)
    f = np.asarray(f, dtype=float)
    Pf = normalized_kernel(model, _lambda0(model, lambda0), t) @ f
    lhs = float(pi @ np.abs(Pf))
    rhs = float(pi @ np.abs(f))
    return ContractionResult(lhs <= rhs + atol, lhs, rhs)


@dataclass
class Implication:
    premises: tuple
    conclusion: str
    status: str  # "pass", "fail" or "unexercised"

    def __str__(self):
        return f"{' & '.join(self.premises)} => {self.conclusion}: {self.status}"


@dataclass
class TripleReport:
    """The three defining predicates for ``(pi, mu, psi = dmu/dpi)`` and the
    implications between them."""

    psi: Density
    ground_measure: PredicateResult
    ground_state: PredicateResult
    equilibrium: PredicateResult
    entropy_finite: bool
    q_invariance_residual: float
    markov_defect: float
    implications: list = field(default_factory=list)

    @property
    def is_ground_measure(self) -> bool:
        return self.ground_measure.passed

    @property
    def is_ground_state(self) -> bool:
        return self.ground_state.passed

    @property
    def is_equilibrium(self) -> bool:
        return self.equilibrium.passed

    @property
    def implications_verified(self) -> bool:
        return all(imp.status != "fail" for imp in self.implications)


def verify_triple(model: MarkovModel, pi, mu, t_set=DEFAULT_TIMES,
                  lambda0: float | None = None, tol_predicate: float = TOL_PREDICATE,
                  tol_implication: float = TOL_IMPLICATION) -> TripleReport:
    """Evaluate ground measure / ground state / equilibrium for ``pi``, ``mu``
    and ``psi = dmu/dpi``, then test each implication "two of these hold, so
    the third does" at the looser ``tol_implication``.

    Raises
    ------
    AbsoluteContinuityViolation
        If ``mu`` charges a state where ``pi`` vanishes.
    """
    lambda0 = _lambda0(model, lambda0)
    pi = pi if isinstance(pi, ProbMeasure) else ProbMeasure(pi)
    mu_w = np.asarray(mu, dtype=float)
    psi = Density.from_measures(mu_w, pi)

    gm = check_ground_measure(model, pi, lambda0, t_set, tol_predicate)
    gs = check_ground_state(model, psi, mu_w, lambda0, t_set, tol_predicate)
    eq = check_equilibrium(model, mu_w, lambda0, tol_predicate)
    finite = entropy_density(mu_w, pi).finite

    q_res = 0.0
    defect = 0.0
    supp = mu_w > 0
    for t in t_set:
        K = h_kernel(model, psi, lambda0, t, mu=mu_w).entries
        q_res = max(q_res, float(np.abs(mu_w @ K - mu_w).sum()))
        defect = max(defect, float(np.max(np.abs(K.sum(axis=1) - 1.0)[supp])))

    preds = {"ground measure": gm, "ground state": gs, "equilibrium": eq}
    implications = []
    for conclusion in ("equilibrium", "ground state", "ground measure"):
        premises = tuple(k for k in preds if k != conclusion)
        if all(preds[k].passed for k in premises):
            status = "pass" if preds[conclusion].score <= tol_implication else "fail"
        else:
            status = "unexercised"
        implications.append(Implication(premises, conclusion, status))
    return TripleReport(psi, gm, gs, eq, finite, q_res, defect, implications)
