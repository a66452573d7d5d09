"""Donsker-Varadhan rate functions and the variational principal eigenvalue.

On ``n`` states the rate function is

    I(mu) = -inf_g  sum_x mu[x] sum_y L[x, y] exp(g[y] - g[x]),

a finite-dimensional convex problem in ``g = log u`` (gauge ``g[0] = 0``).
``lambda0 = sup_mu (mu(V) - I(mu))`` is then a concave maximization over the
simplex, solved here by entropic mirror ascent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _newton
from .model import MarkovModel, ProbMeasure
from .semigroup import normalized_kernel

__all__ = [
    "RateResult",
    "DVResult",
    "inner_objective",
    "rate_I",
    "rate_IV",
    "dv_supremum",
    "log_inequality_check",
    "LogPMResult",
    "logpm_inequality_check",
]


@dataclass
class RateResult:
    """Value of a rate function with the log-minimizer ``g`` of its inner problem.

    ``converged`` is False when the infimum is only approached as entries of
    ``g`` diverge; ``value`` is then the capped approximation.
    """

    value: float
    minimizer_g: np.ndarray
    converged: bool
    iterations: int
    grad_norm: float = 0.0


@dataclass
class DVResult:
    lambda0: float
    maximizer_mu: ProbMeasure
    gap_to_spectral: float = float("nan")
    duality_gap: float = float("nan")
    iterations: int = 0


def _split(L):
    L = np.asarray(L, dtype=float)
    diag = np.diag(L).copy()
    off = L - np.diag(diag)
    return off, diag


def inner_objective(model: MarkovModel, mu, g):
    """``sum_x mu[x] (L e^g)[x] / e^g[x]`` and its gradient in ``g``."""
    off, diag = _split(model.L)
    mu = np.asarray(mu, dtype=float)
    g = np.asarray(g, dtype=float)
    W = mu[:, None] * off * np.exp(g[None, :] - g[:, None])
    return float(mu @ diag + W.sum()), W.sum(axis=0) - W.sum(axis=1)


def _make_objective(off, diag, mu):
    base = float(mu @ diag)
    mu_col = mu[:, None] * off

    def fun(z):
        g = np.concatenate(([0.0], z))
        W = mu_col * np.exp(g[None, :] - g[:, None])
        cs = W.sum(axis=0)
        rs = W.sum(axis=1)
        H = np.diag(cs + rs) - W - W.T
        return base + float(W.sum()), (cs - rs)[1:], H[1:, 1:]

    return fun


def _solve_inner(off, diag, mu, g0=None, gtol=1e-10):
    n = mu.size
    z0 = np.zeros(n - 1) if g0 is None else np.asarray(g0, dtype=float)[1:] - g0[0]
    if n == 1:
        return _newton.NewtonResult(np.zeros(0), float(mu @ diag), 0.0, True, 0,
                                    np.zeros(0, dtype=bool))
    return _newton.minimize(_make_objective(off, diag, mu), z0, gtol=gtol)


def rate_I(model: MarkovModel, mu, g0=None) -> RateResult:
    """Donsker-Varadhan rate function ``I(mu)`` of the Markov generator.

    Examples
    --------
    >>> from groundstate.model import two_state_model
    >>> round(rate_I(two_state_model(), [0.2, 0.8]).value, 12)
    0.2
    """
    mu = np.asarray(mu, dtype=float)
    off, diag = _split(model.L)
    res = _solve_inner(off, diag, mu, g0)
    g = np.concatenate(([0.0], res.x))
    return RateResult(-res.value, g, res.converged, res.iterations, res.grad_norm)


def rate_IV(model: MarkovModel, mu, lambda0: float | None = None, g0=None) -> RateResult:
    """``I^V(mu) = I(mu) - mu(V) + lambda0``; zero exactly at equilibrium measures.

    ``lambda0`` defaults to the spectral principal eigenvalue.
    """
    if lambda0 is None:
        from .spectral import principal
        lambda0 = principal(model).lambda0
    mu = np.asarray(mu, dtype=float)
    r = rate_I(model, mu, g0)
    r.value = r.value - float(mu @ model.V) + lambda0
    return r


def _starts(n: int, count: int = 8):
    yield np.full(n, 1.0 / n)
    for k in range(count - 1):
        w = np.full(n, 0.1 / n)
        w[k % n] += 0.9
        yield w


def _ascend(off, diag, V, L, mu, max_iter, step0, gap_tol):
    def evaluate(mu, g):
        res = _solve_inner(off, diag, mu, g)
        g = np.concatenate(([0.0], res.x))
        # gradient of mu -> mu(V) - I(mu): V + (L u)/u at the inner minimizer
        G = V + (L @ np.exp(g)) * np.exp(-g)
        return float(mu @ G), G, g

    value, G, g = evaluate(mu, np.zeros(mu.size))
    boost = 0
    k = 0
    for k in range(1, max_iter + 1):
        gap = float(G.max() - value)
        if gap <= gap_tol:
            break
        base = step0 / np.sqrt(k)
        while True:
            logw = np.log(mu) + base * 2.0 ** boost * (G - G.max())
            w = np.exp(logw - logw.max())
            # keep strictly inside the simplex so the inner problem stays finite
            trial = np.maximum(w / w.sum(), 1e-300)
            trial /= trial.sum()
            t_value, t_G, t_g = evaluate(trial, g)
            if t_value >= value or boost == 0:
                break
            boost -= 1
        if t_value >= value:
            boost = min(boost + 1, 40)
        mu, value, G, g = trial, t_value, t_G, t_g
    return value, mu, float(G.max() - value), k


def dv_supremum(model: MarkovModel, max_iter: int = 5000, step0: float = 0.1,
                starts: int = 8, gap_tol: float = 1e-10) -> DVResult:
    """Maximize ``mu(V) - I(mu)`` over the simplex.

    Entropic mirror ascent from ``starts`` deterministic initial points
    (uniform, then vertex-biased).  The step is ``step0 / sqrt(k)`` times
    ``2^j``, where ``j`` grows by one after every step that increases the
    objective and shrinks when a step would decrease it; ``j = 0`` steps are
    always taken.  A run stops early once ``max_x G[x] - mu(G) <= gap_tol``,
    where ``G`` is the gradient of the objective; this quantity bounds the
    distance of the current value to the supremum.  The best value wins; near ties (1e-9) go to the
    lexicographically smallest measure.
    """
    off, diag = _split(model.L)
    V = np.asarray(model.V, dtype=float)
    L = np.asarray(model.L, dtype=float)
    runs = [_ascend(off, diag, V, L, mu0, max_iter, step0, gap_tol)
            for mu0 in _starts(model.n, starts)]
    top = max(r[0] for r in runs)
    tied = [r for r in runs if r[0] >= top - 1e-9]
    value, mu, gap, iters = min(tied, key=lambda r: tuple(r[1]))
    return DVResult(value, ProbMeasure.normalized_from(mu), duality_gap=gap,
                    iterations=sum(r[3] for r in runs))


def log_inequality_check(model: MarkovModel, mu, u, lambda0: float, t: float,
                         rate_iv: float | None = None) -> float:
    """Slack of ``int log(e^{-lambda0 t} P_t^V u / u) dmu >= -t I^V(mu)``.

    Returns ``LHS + t I^V(mu)``, which must be nonnegative.
    """
    mu = np.asarray(mu, dtype=float)
    u = np.asarray(u, dtype=float)
    if rate_iv is None:
        rate_iv = rate_IV(model, mu, lambda0).value if t > 0 else 0.0
    ratio = normalized_kernel(model, lambda0, t) @ u / u
    supp = mu > 0
    lhs = float(mu[supp] @ np.log(ratio[supp]))
    return lhs + t * rate_iv


@dataclass
class LogPMResult:
    """Both sides of ``t I^V + int log+(r) dmu >= int log-(r) dmu`` for the
    ratio ``r = P^{V,psi}_t u / u``."""

    lhs: float
    rhs: float
    log_plus: float
    log_minus: float
    t_rate: float

    @property
    def holds(self) -> bool:
        return self.lhs >= self.rhs - 1e-8

    def __iter__(self):
        return iter((self.lhs, self.rhs))


def logpm_inequality_check(model: MarkovModel, mu, psi, u, lambda0: float, t: float,
                           rate_iv: float | None = None) -> LogPMResult:
    """Positive/negative-part form of the log inequality for the ``psi``-transform."""
    from .htransform import h_kernel

    mu = np.asarray(mu, dtype=float)
    u = np.asarray(u, dtype=float)
    if rate_iv is None:
        rate_iv = rate_IV(model, mu, lambda0).value
    K = h_kernel(model, psi, lambda0, t, mu=mu).entries
    supp = mu > 0
    logr = np.log((K @ u)[supp] / u[supp])
    plus = float(mu[supp] @ np.maximum(logr, 0.0))
    minus = float(mu[supp] @ np.maximum(-logr, 0.0))
    return LogPMResult(t * rate_iv + plus, minus, plus, minus, t * rate_iv)
