"""Ground measures built from an equilibrium measure by time averaging.

For an equilibrium measure ``mu`` set

    Z_t    = e^{-lambda0 t} mu(P_t^V 1),
    pi_t   = e^{-lambda0 t} mu P_t^V / Z_t,
    pibar_T = int_0^T Z_t pi_t dt / int_0^T Z_t dt.

When ``e^{-lambda0 t} ||P_t^V||`` stays bounded by ``M``, ``H(mu, pibar_T) <=
log M`` for every ``T`` and ``pibar_T`` becomes invariant at rate ``1/T``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .entropy import entropy_density
from .htransform import DEFAULT_TIMES, PredicateResult, check_ground_measure
from .model import MarkovModel
from .semigroup import GrowthResult, growth_constant, normalized_kernel
from .variational import rate_IV

__all__ = [
    "HypothesisViolated",
    "NotEquilibrium",
    "ConstructionTrace",
    "construct_ground_measure",
    "FluxResult",
    "flux_balance_check",
    "LedgerRow",
    "entropy_ledger",
]

# shortest window for the growth gate; short windows cannot tell slow
# relaxation from polynomial growth
MIN_GROWTH_WINDOW = 100.0


class HypothesisViolated(RuntimeError):
    """``e^{-lambda0 t} ||P_t^V||`` appears to grow without bound."""

    def __init__(self, message, growth: GrowthResult | None = None):
        super().__init__(message)
        self.growth = growth


class NotEquilibrium(ValueError):
    """The starting measure does not attain the variational supremum."""


@dataclass
class ConstructionTrace:
    """Sampled quantities of the construction on a uniform grid.

    Row ``k`` of ``pi_t`` and ``pi_bar`` belongs to time ``t_grid[k]``;
    ``pi_bar[0]`` is ``mu``, the ``T -> 0`` limit of the average.
    """

    t_grid: np.ndarray
    Z: np.ndarray
    pi_t: np.ndarray
    pi_bar: np.ndarray
    H: np.ndarray
    M: float
    invariance_residual: np.ndarray
    tv_to_limit: np.ndarray | None
    final_check: PredicateResult
    lambda0: float
    growth: GrowthResult

    @property
    def log_M(self) -> float:
        return math.log(self.M)

    @property
    def H_bound(self) -> list:
        return [(float(h), self.log_M) for h in self.H]

    @property
    def limit(self) -> np.ndarray:
        return self.pi_bar[-1]

    def at(self, T: float) -> int:
        """Grid index of horizon ``T``."""
        return int(np.argmin(np.abs(self.t_grid - T)))

    def to_csv(self, path) -> None:
        n = self.pi_t.shape[1]
        header = (["t", "Z_t"] + [f"pi_t[{i}]" for i in range(n)] + ["T"]
                  + [f"pi_bar[{i}]" for i in range(n)] + ["H", "logM", "residual"])
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for k, t in enumerate(self.t_grid):
                row = [t, self.Z[k], *self.pi_t[k], t, *self.pi_bar[k],
                       self.H[k], self.log_M, self.invariance_residual[k]]
                w.writerow([repr(float(x)) for x in row])


def construct_ground_measure(model: MarkovModel, mu, lambda0: float | None = None,
                             T_max: float = 50.0, grid_steps: int = 20,
                             t_set=DEFAULT_TIMES, equilibrium_tol: float = 1e-6,
                             limit=None) -> ConstructionTrace:
    """Run the time-averaging construction up to horizon ``T_max``.

    Parameters
    ----------
    mu : array_like
        An equilibrium measure (``I^V(mu) <= equilibrium_tol``).
    grid_steps : int
        Grid points per unit time; both integrals use the trapezoid rule on
        the same grid, so every ``pi_bar`` is exactly normalized.
    limit : array_like, optional
        Reference ground measure for ``tv_to_limit``; defaults to the left
        Perron vector when the spectrum is nondegenerate.

    Raises
    ------
    HypothesisViolated
        When :func:`growth_constant` flags unbounded growth.
    NotEquilibrium
        When ``I^V(mu)`` exceeds ``equilibrium_tol``.
    """
    from .spectral import principal

    sr = None
    if lambda0 is None or limit is None:
        sr = principal(model)
        lambda0 = sr.lambda0 if lambda0 is None else lambda0
    growth = growth_constant(model, lambda0, t_max=max(2 * T_max, MIN_GROWTH_WINDOW),
                             samples=201)
    if growth.unbounded:
        raise HypothesisViolated(
            "exp(-lambda0 t) ||P_t^V|| keeps growing (last sample "
            f"{growth.values[-1]:.6g} at t = {growth.times[-1]:g}); the boundedness "
            "hypothesis fails, so no ground measure is constructed", growth)
    mu = np.asarray(mu, dtype=float)
    iv = rate_IV(model, mu, lambda0).value
    if iv > equilibrium_tol:
        raise NotEquilibrium(f"I^V(mu) = {iv:.3g} exceeds {equilibrium_tol:g}")

    N = int(round(T_max * grid_steps))
    h = T_max / N
    t_grid = np.linspace(0.0, T_max, N + 1)
    Kh = normalized_kernel(model, lambda0, h)
    P = np.eye(model.n)
    nu = np.empty((N + 1, model.n))
    norms = np.empty(N + 1)
    for k in range(N + 1):
        if k:
            P = P @ Kh
        nu[k] = mu @ P
        norms[k] = P.sum(axis=1).max()
    Z = nu.sum(axis=1)
    pi_t = nu / Z[:, None]

    # cumulative trapezoid, accumulated in index order
    num = np.zeros_like(nu)
    num[1:] = np.cumsum(0.5 * h * (nu[1:] + nu[:-1]), axis=0)
    pi_bar = np.empty_like(nu)
    pi_bar[0] = mu
    pi_bar[1:] = num[1:] / num[1:].sum(axis=1, keepdims=True)

    M = max(growth.M, float(norms.max()))
    H = np.array([entropy_density(mu, pb).value for pb in pi_bar])

    residual = np.zeros(N + 1)
    for t in t_set:
        Kt = normalized_kernel(model, lambda0, t)
        residual = np.maximum(residual, np.abs(pi_bar @ Kt - pi_bar).sum(axis=1))

    if limit is None and sr is not None and not sr.degenerate:
        limit = sr.phi.weights
    tv = None if limit is None else np.abs(pi_bar - np.asarray(limit)).sum(axis=1)

    final = check_ground_measure(model, pi_bar[-1], lambda0, t_set,
                                 tol=max(1e-6, 10 * M / T_max))
    return ConstructionTrace(t_grid, Z, pi_t, pi_bar, H, M, residual, tv, final,
                             float(lambda0), growth)


@dataclass
class FluxResult:
    residual: float
    bound: float
    holds: bool

    def __bool__(self):
        return self.holds


def flux_balance_check(model: MarkovModel, pi_bar, lambda0: float, T: float, M: float,
                       f_basis=None, atol: float = 1e-8) -> FluxResult:
    """``|pibar_T((L + V - lambda0) f)| <= 2 M ||f|| / T`` over a set of test functions.

    ``f_basis`` defaults to the coordinate vectors, which span all functions.
    The reported residual is the largest ``|pibar_T((L+V-lambda0) f)| / ||f||``.
    """
    pi_bar = np.asarray(pi_bar, dtype=float)
    basis = np.eye(model.n) if f_basis is None else np.atleast_2d(np.asarray(f_basis, float))
    flux = pi_bar @ (model.A - lambda0 * np.eye(model.n))
    sup = np.abs(basis).max(axis=1)
    sup[sup == 0] = 1.0
    residual = float(np.max(np.abs(basis @ flux) / sup))
    bound = 2 * M / T
    return FluxResult(residual, bound, residual <= bound + atol)


@dataclass
class LedgerRow:
    t: float
    H: float
    bound: float

    @property
    def holds(self) -> bool:
        return self.H <= self.bound + 1e-6


def entropy_ledger(model: MarkovModel, mu, trace: ConstructionTrace,
                   rate_iv: float | None = None) -> list:
    """``H(mu, pi_t) <= t I^V(mu) + log Z_t`` at every grid time of ``trace``."""
    mu = np.asarray(mu, dtype=float)
    if rate_iv is None:
        rate_iv = rate_IV(model, mu, trace.lambda0).value
    rows = []
    for t, z, p in zip(trace.t_grid, trace.Z, trace.pi_t):
        rows.append(LedgerRow(float(t), float(entropy_density(mu, p).value),
                              float(t * rate_iv + math.log(z))))
    return rows
