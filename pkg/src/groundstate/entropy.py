"""Relative entropy ``H(mu, pi)`` by its dual supremum and by the density formula."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _newton

__all__ = ["EntropyResult", "entropy_dual", "entropy_density"]


@dataclass
class EntropyResult:
    """Relative entropy in nats.

    ``value`` is None when ``mu`` charges a state where ``pi`` vanishes; in
    that case ``finite`` is False.  ``maximizer_f`` is the dual optimizer
    (gauge-fixed to 0 at the first state charged by ``mu``) for the dual
    method, and ``log(dmu/dpi)`` on the support of ``mu`` for the density
    method.
    """

    value: float | None
    finite: bool
    maximizer_f: np.ndarray
    method: str
    converged: bool = True

    def __float__(self):
        if not self.finite:
            raise ValueError("relative entropy is infinite")
        return float(self.value)


def _offending(mu, pi):
    return np.flatnonzero((mu > 0) & (pi <= 0))


def entropy_dual(mu, pi, gtol: float = 1e-12) -> EntropyResult:
    """``sup_f (mu(f) - log pi(e^f))`` maximized over ``f`` by Newton's method.

    If ``mu`` charges a ``pi``-null state ``x``, the objective grows without
    bound along ``f = r 1_x`` and the result is flagged infinite.  At states
    with ``mu = 0 < pi`` the supremum is approached as ``f -> -inf``; those
    coordinates are eliminated exactly (``maximizer_f`` holds ``-inf`` there)
    and Newton runs on the remaining ones.
    """
    mu = np.asarray(mu, dtype=float)
    pi = np.asarray(pi, dtype=float)
    n = mu.size
    bad = _offending(mu, pi)
    if bad.size:
        f = np.zeros(n)
        f[bad] = _newton.CAP
        return EntropyResult(None, False, f, "dual")
    live = np.flatnonzero(mu > 0)
    ref = int(live[0])
    free = live[live != ref]
    m, p = mu[free], pi[free]
    p_ref = pi[ref]

    def fun(z):
        # negated dual objective; f[ref] = 0
        shift = max(0.0, float(z.max(initial=0.0)))
        e = p * np.exp(z - shift)
        Z = p_ref * np.exp(-shift) + e.sum()
        q = e / Z
        val = np.log(Z) + shift - m @ z
        H = np.diag(q) - np.outer(q, q)
        return float(val), q - m, H

    res = _newton.minimize(fun, np.zeros(free.size), gtol=gtol)
    f = np.full(n, -np.inf)
    f[ref] = 0.0
    f[free] = res.x
    return EntropyResult(float(-res.value), True, f, "dual", res.converged)


def entropy_density(mu, pi) -> EntropyResult:
    """``sum_x pi[x] psi[x] log psi[x]`` with ``psi = mu / pi`` and ``0 log 0 = 0``."""
    mu = np.asarray(mu, dtype=float)
    pi = np.asarray(pi, dtype=float)
    if _offending(mu, pi).size:
        return EntropyResult(None, False, np.zeros(mu.size), "density")
    charged = mu > 0
    log_psi = np.zeros(mu.size)
    log_psi[charged] = np.log(mu[charged] / pi[charged])
    # pi psi log psi = mu log psi
    value = float(mu[charged] @ log_psi[charged])
    return EntropyResult(value, True, log_psi, "density")
