"""Transition kernels of the Markov and Schrodinger semigroups.

Kernels are computed by uniformization: a Metzler matrix ``M`` with
nonpositive diagonal is written as ``q (Pi - I)`` with ``Pi >= 0`` entrywise,
and ``exp(tM)`` is the Poisson mixture ``sum_k Poisson(k; qt) Pi^k``.  For
``qt > 1`` the series is summed at ``t / 2^s`` and squared ``s`` times.  All
intermediate matrices are entrywise nonnegative, so the kernels are exactly
positivity preserving.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import MarkovModel

__all__ = [
    "Kernel",
    "KernelOverflowError",
    "PicardDivergence",
    "kernel",
    "normalized_kernel",
    "log_norm",
    "duhamel_solve",
    "SandwichResult",
    "sandwich_check",
    "GrowthResult",
    "growth_constant",
]

EXP_LIMIT = 700.0
_SERIES_TOL = 1e-18


class KernelOverflowError(OverflowError):
    pass


class PicardDivergence(RuntimeError):
    """Picard iteration did not settle within its iteration cap."""


@dataclass(frozen=True, eq=False)
class Kernel:
    """Matrix ``entries[x, y] = p_t(x, {y})`` of a positive semigroup at time ``t``.

    ``kind`` is ``"plain"`` (Markov, V ignored), ``"schrodinger"`` or
    ``"htransform"``.
    """

    t: float
    entries: np.ndarray
    kind: str

    def __post_init__(self):
        e = np.array(self.entries, dtype=float)
        e.flags.writeable = False
        object.__setattr__(self, "entries", e)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    def __matmul__(self, other):
        return self.entries @ np.asarray(other)

    def __rmatmul__(self, other):
        return np.asarray(other) @ self.entries

    @property
    def row_sums(self) -> np.ndarray:
        return self.entries.sum(axis=1)


def _expm_metzler(M: np.ndarray, t: float) -> np.ndarray:
    """``exp(tM)`` for ``M`` with nonnegative off-diagonal and nonpositive diagonal."""
    n = M.shape[0]
    q = float(np.max(-np.diag(M))) if n else 0.0
    if t == 0.0 or q == 0.0:
        # q == 0 forces M == 0 for the matrices built in this module
        return np.eye(n)
    qt = q * t
    s = max(0, math.ceil(math.log2(qt))) if qt > 1.0 else 0
    tau_q = qt / 2.0 ** s
    Pi = np.eye(n) + M / q
    np.maximum(Pi, 0.0, out=Pi)  # clears -0.0 style roundoff on the diagonal
    weight = math.exp(-tau_q)
    term = np.eye(n)
    out = weight * term
    k = 0
    while True:
        k += 1
        weight *= tau_q / k
        if weight < _SERIES_TOL and k > tau_q:
            break
        term = term @ Pi
        out += weight * term
    for _ in range(s):
        out = out @ out
    return out


def _check_time(t: float) -> float:
    t = float(t)
    if not t >= 0.0:
        raise ValueError(f"time must be >= 0, got {t}")
    return t


def _plain(model: MarkovModel, t: float) -> np.ndarray:
    return _expm_metzler(np.asarray(model.L, dtype=float), t)


def _shifted(model: MarkovModel, t: float) -> tuple[np.ndarray, float]:
    vmax = float(model.V.max())
    return _expm_metzler(model.L + np.diag(model.V - vmax), t), vmax


def kernel(model: MarkovModel, t: float, kind: str = "schrodinger") -> Kernel:
    """Kernel of ``P_t`` (``kind="plain"``) or of ``P_t^V`` at time ``t``.

    Examples
    --------
    >>> from groundstate.model import jordan_model
    >>> kernel(jordan_model(), 2.0).entries
    array([[1., 0.],
           [2., 1.]])
    """
    t = _check_time(t)
    if kind == "plain":
        return Kernel(t, _plain(model, t), "plain")
    if kind != "schrodinger":
        raise ValueError(f"unknown kernel kind {kind!r}")
    E, vmax = _shifted(model, t)
    if t * vmax > EXP_LIMIT:
        raise KernelOverflowError(
            f"t * max V = {t * vmax:.4g} exceeds {EXP_LIMIT}; use normalized_kernel")
    return Kernel(t, E * math.exp(t * vmax), "schrodinger")


def normalized_kernel(model: MarkovModel, lambda0: float, t: float) -> np.ndarray:
    """``exp(-lambda0 t) P_t^V`` computed without forming ``P_t^V`` itself."""
    t = _check_time(t)
    E, vmax = _shifted(model, t)
    expo = t * (vmax - lambda0)
    if expo > EXP_LIMIT:
        raise KernelOverflowError(f"t * (max V - lambda0) = {expo:.4g} exceeds {EXP_LIMIT}")
    return E * math.exp(expo)


def log_norm(model: MarkovModel, t: float) -> float:
    """``log ||P_t^V||`` where the sup norm is the largest row sum."""
    E, vmax = _shifted(model, _check_time(t))
    return t * vmax + math.log(E.sum(axis=1).max())


def duhamel_solve(model: MarkovModel, t: float, f, steps: int,
                  max_iter: int = 200, tol: float = 1e-12) -> np.ndarray:
    """Approximate ``P_t^V f`` from the Volterra equation
    ``w(t) = P_t f + int_0^t P_{t-s} V w(s) ds``.

    The integral is discretized with the composite trapezoid rule on a
    uniform grid of ``steps`` intervals, and the discrete equation is solved
    by Picard iteration starting from ``w = P_. f``.  Only the plain Markov
    kernel enters, so the result is independent of the Schrodinger kernel.

    Raises
    ------
    PicardDivergence
        If successive iterates do not agree to ``tol * (1 + |f|_inf)`` after
        ``max_iter`` sweeps; refine the grid or shorten ``t``.
    """
    t = _check_time(t)
    if steps < 1:
        raise ValueError("steps must be >= 1")
    f = np.asarray(f, dtype=float)
    V = np.asarray(model.V)
    N = int(steps)
    h = t / N
    Ph = _plain(model, h)
    # powers[m] = P_{m h}
    powers = np.empty((N + 1, model.n, model.n))
    powers[0] = np.eye(model.n)
    for m in range(1, N + 1):
        powers[m] = powers[m - 1] @ Ph
    free = powers @ f  # free[j] = P_{t_j} f
    weights = np.full(N + 1, h)
    w = free.copy()
    scale = tol * (1.0 + np.max(np.abs(f), initial=0.0))
    for _ in range(max_iter):
        G = V * w
        new = free.copy()
        for j in range(1, N + 1):
            c = weights[: j + 1].copy()
            c[0] = c[j] = h / 2
            # sum_k c_k P_{(j-k)h} G_k
            new[j] += np.einsum("k,kab,kb->a", c, powers[j::-1], G[: j + 1])
        gap = np.max(np.abs(new - w))
        w = new
        if gap <= scale:
            return w[N]
    raise PicardDivergence(
        f"Picard iteration gap still {gap:.3g} after {max_iter} sweeps (t={t}, steps={N})")


@dataclass
class SandwichResult:
    holds: bool
    lower_slack: float
    upper_slack: float

    @property
    def worst_slack(self) -> float:
        return min(self.lower_slack, self.upper_slack)

    def __bool__(self):
        return self.holds


def sandwich_check(model: MarkovModel, t: float, f, rtol: float = 1e-9) -> SandwichResult:
    """Check ``e^{t min V} P_t f <= P_t^V f <= e^{t max V} P_t f`` for ``f >= 0``.

    Slacks are relative to the magnitude of the bound at each state; a
    negative slack beyond ``-rtol`` is a violation.
    """
    f = np.asarray(f, dtype=float)
    if np.any(f < 0):
        raise ValueError("sandwich bounds need f >= 0")
    plain = kernel(model, t, "plain").entries @ f
    schro = kernel(model, t).entries @ f
    lo = math.exp(t * model.V.min()) * plain
    hi = math.exp(t * model.V.max()) * plain
    denom = np.maximum(np.maximum(hi, np.abs(schro)), np.finfo(float).tiny)
    lower = float(np.min((schro - lo) / denom))
    upper = float(np.min((hi - schro) / denom))
    return SandwichResult(lower >= -rtol and upper >= -rtol, lower, upper)


@dataclass
class GrowthResult:
    """Sampled ``exp(-lambda0 t) ||P_t^V||`` and its supremum."""

    M: float
    unbounded: bool
    times: np.ndarray
    values: np.ndarray


def growth_constant(model: MarkovModel, lambda0: float, t_max: float = 100.0,
                    samples: int = 201, min_rel_growth: float = 1e-3) -> GrowthResult:
    """Estimate ``M = sup_t exp(-lambda0 t) ||P_t^V||`` on a uniform grid.

    ``unbounded`` is a heuristic: it is set when the sampled values are
    strictly increasing over the second half of the window and their
    least-squares slope raises the level by at least ``min_rel_growth``
    (relative) across that half.  Polynomial growth from a Jordan block
    triggers it; exponential convergence to a plateau does not.
    """
    if not t_max > 0:
        raise ValueError("t_max must be positive")
    times = np.linspace(0.0, t_max, int(samples))
    values = np.array([normalized_kernel(model, lambda0, t).sum(axis=1).max()
                       for t in times])
    tail = slice(len(times) // 2, None)
    tt, vv = times[tail], values[tail]
    unbounded = False
    if len(tt) >= 3 and np.all(np.diff(vv) > 0):
        slope = np.polyfit(tt, vv, 1)[0]
        unbounded = slope * (tt[-1] - tt[0]) > min_rel_growth * np.mean(vv)
    return GrowthResult(float(values.max()), bool(unbounded), times, values)
