"""Principal eigenvalue and Perron vectors of ``L + diag(V)``.

``L + diag(V)`` is a Metzler matrix, so its eigenvalue of largest real part
is real and carries nonnegative left and right eigenvectors.  The dense
spectrum is used throughout; it is robust on reducible and defective inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.optimize import linprog

from .model import MarkovModel, ProbMeasure
from .semigroup import log_norm

__all__ = [
    "SpectralResult",
    "EigensolverError",
    "DegenerateSpectrum",
    "principal",
    "lambda0_growth",
    "eigen_equilibrium",
]

TIE_TOL = 1e-10
SIGN_TOL = 1e-8
MULTIPLICITY_RTOL = 1e-7
NULLSPACE_RTOL = 1e-9


class EigensolverError(RuntimeError):
    pass


class DegenerateSpectrum(ValueError):
    """Perron data do not determine an equilibrium measure."""


@dataclass(frozen=True, eq=False)
class SpectralResult:
    """Principal eigenvalue with right vector ``psi`` (max entry 1) and left
    vector ``phi`` (a probability measure).

    ``degenerate`` is set when the principal eigenvalue is defective or its
    eigenspace holds no nonnegative vector.  ``residuals`` holds the sup-norm
    residuals of the right and left eigen equations.
    """

    lambda0: float
    psi: np.ndarray
    phi: ProbMeasure
    degenerate: bool
    residuals: tuple
    algebraic_multiplicity: int = 1
    geometric_multiplicity: int = 1


def _sign_fix(v: np.ndarray):
    v = np.real(v)
    if -v.min() > v.max():
        v = -v
    scale = np.abs(v).max()
    if scale == 0 or v.min() < -SIGN_TOL * scale:
        return None
    return np.maximum(v, 0.0) / scale


def _nonneg_in_span(basis: np.ndarray):
    """Some nonnegative nonzero vector in the column span of ``basis``."""
    if basis.shape[1] == 1:
        return _sign_fix(basis[:, 0])
    n, k = basis.shape
    # N c >= 0, 1^T N c = 1
    res = linprog(np.zeros(k), A_ub=-basis, b_ub=np.zeros(n),
                  A_eq=basis.sum(axis=0, keepdims=True), b_eq=[1.0],
                  bounds=[(None, None)] * k, method="highs")
    if res.status != 0:
        return None
    return _sign_fix(basis @ res.x)


def _null_space(B: np.ndarray, scale: float) -> np.ndarray:
    _, s, vh = scipy.linalg.svd(B)
    rank = int(np.sum(s > NULLSPACE_RTOL * scale))
    return vh[rank:].conj().T


def principal(model: MarkovModel) -> SpectralResult:
    """Spectral abscissa of ``L + diag(V)`` with its Perron vectors.

    Examples
    --------
    >>> from groundstate.model import two_state_model
    >>> round(principal(two_state_model()).lambda0, 10)
    0.6180339887
    """
    A = model.A
    n = model.n
    scale = max(1.0, float(np.abs(A).sum(axis=1).max()))
    try:
        eigvals = scipy.linalg.eigvals(A)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigensolverError(str(exc)) from exc
    if not np.all(np.isfinite(eigvals)):
        raise EigensolverError("eigensolver returned non-finite eigenvalues")
    lambda0 = float(np.max(eigvals.real))
    alg = int(np.sum(np.abs(eigvals - lambda0) <= MULTIPLICITY_RTOL * scale))

    B = A - lambda0 * np.eye(n)
    right_basis = _null_space(B, scale)
    left_basis = _null_space(B.T, scale)
    if right_basis.shape[1] == 0 or left_basis.shape[1] == 0:
        raise EigensolverError("no eigenvector found for the principal eigenvalue")
    geo = int(min(right_basis.shape[1], left_basis.shape[1]))

    psi = _nonneg_in_span(right_basis)
    phi = _nonneg_in_span(left_basis)
    degenerate = psi is None or phi is None or alg > geo
    if psi is None:
        psi = np.abs(np.real(right_basis[:, 0]))
        psi /= psi.max()
    if phi is None:
        phi = np.abs(np.real(left_basis[:, 0]))
    phi = ProbMeasure.normalized_from(phi)
    res_right = float(np.abs(A @ psi - lambda0 * psi).max())
    res_left = float(np.abs(phi.weights @ A - lambda0 * phi.weights).max())
    psi.flags.writeable = False
    return SpectralResult(lambda0, psi, phi, bool(degenerate), (res_right, res_left), alg, geo)


def lambda0_growth(model: MarkovModel, t_max: float = 50.0, samples: int = 101) -> float:
    """Slope of ``log ||P_t^V||`` against ``t`` over the second half of ``[0, t_max]``."""
    times = np.linspace(0.0, t_max, int(samples))
    tail = times[len(times) // 2:]
    logs = np.array([log_norm(model, t) for t in tail])
    return float(np.polyfit(tail, logs, 1)[0])


def eigen_equilibrium(model: MarkovModel, spectral: SpectralResult | None = None) -> ProbMeasure:
    """Normalized product ``phi * psi`` of the left and right Perron vectors.

    Raises
    ------
    DegenerateSpectrum
        When the principal eigenvalue is degenerate or ``phi * psi`` vanishes.
    """
    sr = principal(model) if spectral is None else spectral
    if sr.degenerate:
        raise DegenerateSpectrum(
            f"principal eigenvalue {sr.lambda0:g} is degenerate "
            f"(algebraic {sr.algebraic_multiplicity}, geometric {sr.geometric_multiplicity})")
    prod = sr.phi.weights * sr.psi
    if not prod.sum() > 0:
        raise DegenerateSpectrum("left and right Perron vectors have disjoint supports")
    return ProbMeasure.normalized_from(prod)
