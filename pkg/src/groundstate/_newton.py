"""Damped Newton minimization for the smooth convex objectives used in the
rate-function and entropy duals.

Coordinates that run past ``cap`` in absolute value are frozen there: the
objectives here approach their infimum only as some coordinates diverge, and
the capped value is then within ``exp(-cap)``-scale of the infimum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

CAP = 40.0


@dataclass
class NewtonResult:
    x: np.ndarray
    value: float
    grad_norm: float
    converged: bool
    iterations: int
    frozen: np.ndarray


def minimize(fun, x0, gtol: float = 1e-10, max_iter: int = 500, cap: float = CAP,
             armijo: float = 1e-4, max_step: float = 4.0) -> NewtonResult:
    """Minimize ``fun(x) -> (value, grad, hess)``.

    Newton steps with backtracking line search; falls back to steepest
    descent when the Newton direction is not a descent direction.  Steps are
    shortened to at most ``max_step`` per coordinate, so a coordinate only
    reaches the cap by sustained descent, never by one overshooting step.
    """
    x = np.array(x0, dtype=float)
    frozen = np.abs(x) >= cap
    x = np.clip(x, -cap, cap)
    val, g, H = fun(x)
    it = 0
    for it in range(1, max_iter + 1):
        free = ~frozen
        gf = g[free]
        gnorm = float(np.max(np.abs(gf), initial=0.0))
        if gnorm <= gtol:
            it -= 1
            break
        d = np.zeros_like(x)
        try:
            d[free] = -np.linalg.lstsq(H[np.ix_(free, free)], gf, rcond=1e-14)[0]
        except np.linalg.LinAlgError:
            d[free] = -gf
        if not float(g @ d) < 0:
            d = np.zeros_like(x)
            d[free] = -gf
        longest = np.max(np.abs(d))
        if longest > max_step:
            d *= max_step / longest
        slope = float(g @ d)
        step = 1.0
        accepted = False
        for _ in range(60):
            trial = x + step * d
            trial_val, trial_g, trial_H = fun(np.clip(trial, -cap, cap))
            if trial_val <= val + armijo * step * slope:
                accepted = True
                break
            # near the optimum the decrease drowns in roundoff; a full step that
            # shrinks the gradient is still progress
            if step == 1.0 and np.max(np.abs(trial_g[free])) < 0.5 * gnorm:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        newly = np.abs(trial) > cap
        x = np.clip(trial, -cap, cap)
        frozen |= newly
        val, g, H = trial_val, trial_g, trial_H
    gnorm = float(np.max(np.abs(g[~frozen]), initial=0.0))
    converged = gnorm <= gtol and not frozen.any()
    return NewtonResult(x, float(val), gnorm, bool(converged), it, frozen)
