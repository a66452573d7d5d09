"""Domain types for finite-state Schrodinger semigroups and the model file format.

A model is a generator matrix ``L`` of a continuous-time Markov chain on the
states ``0..n-1`` together with a potential vector ``V``.  Functions on the
state space are plain length-``n`` vectors; measures are points of the simplex.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.sparse.csgraph import connected_components

__all__ = [
    "ROW_SUM_TOL",
    "MarkovModel",
    "ProbMeasure",
    "PositiveFunction",
    "Density",
    "ValidationReport",
    "ModelFormatError",
    "DimensionMismatchError",
    "AbsoluteContinuityViolation",
    "validate",
    "is_irreducible",
    "load_model",
    "save_model",
    "jordan_model",
    "two_state_model",
]

ROW_SUM_TOL = 1e-12
MEASURE_SUM_TOL = 1e-12
DENSITY_MASS_TOL = 1e-10


class ModelFormatError(ValueError):
    """Model file could not be parsed."""


class DimensionMismatchError(ModelFormatError):
    """``n``, ``L`` and ``V`` disagree on the number of states."""


class AbsoluteContinuityViolation(ValueError):
    """A measure charges a state that the reference measure does not."""


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class MarkovModel:
    """Generator ``L`` and potential ``V`` on ``n`` states.

    Shapes are checked on construction.  The generator invariants (nonnegative
    off-diagonal rates, zero row sums) are *not* enforced here; use
    :func:`validate` to get a full report.

    Parameters
    ----------
    n : int
        Number of states.
    L : (n, n) array_like
        Transition rate matrix.
    V : (n,) array_like
        Potential.
    measures : dict, optional
        Named measures carried along with the model file.
    """

    n: int
    L: np.ndarray
    V: np.ndarray
    measures: dict = field(default_factory=dict)

    def __post_init__(self):
        n = self.n
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
            raise DimensionMismatchError(f"n must be an integer >= 1, got {n!r}")
        L = _frozen(self.L)
        V = _frozen(self.V)
        if L.shape != (n, n):
            raise DimensionMismatchError(f"L has shape {L.shape}, expected ({n}, {n})")
        if V.shape != (n,):
            raise DimensionMismatchError(f"V has shape {V.shape}, expected ({n},)")
        measures = {}
        for name, w in dict(self.measures).items():
            w = _frozen(w)
            if w.shape != (n,):
                raise DimensionMismatchError(
                    f"measure {name!r} has length {w.shape}, expected ({n},)")
            measures[str(name)] = w
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "measures", measures)

    @property
    def A(self) -> np.ndarray:
        """The matrix ``L + diag(V)`` generating the Schrodinger semigroup."""
        return self.L + np.diag(self.V)

    def measure(self, name: str) -> "ProbMeasure":
        return ProbMeasure(self.measures[name])

    def __eq__(self, other):
        if not isinstance(other, MarkovModel):
            return NotImplemented
        return (self.n == other.n
                and np.array_equal(self.L, other.L)
                and np.array_equal(self.V, other.V)
                and self.measures.keys() == other.measures.keys()
                and all(np.array_equal(w, other.measures[k])
                        for k, w in self.measures.items()))

    __hash__ = None


@dataclass(frozen=True, eq=False)
class ProbMeasure:
    """Probability vector on the state space.

    Unnormalized input is rejected; use :meth:`normalized_from` to divide by
    the total mass explicitly.
    """

    weights: np.ndarray

    def __post_init__(self):
        w = _frozen(self.weights)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("measure weights must be a non-empty 1-d vector")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError("measure weights must be finite and nonnegative")
        total = w.sum()
        if abs(total - 1.0) > MEASURE_SUM_TOL:
            raise ValueError(f"measure weights sum to {total!r}, not 1")
        object.__setattr__(self, "weights", w)

    @classmethod
    def normalized_from(cls, weights) -> "ProbMeasure":
        w = np.asarray(weights, dtype=float)
        total = w.sum()
        if not total > 0:
            raise ValueError("cannot normalize a vector with nonpositive mass")
        return cls(w / total)

    @classmethod
    def point_mass(cls, n: int, x: int) -> "ProbMeasure":
        w = np.zeros(n)
        w[x] = 1.0
        return cls(w)

    @classmethod
    def uniform(cls, n: int) -> "ProbMeasure":
        return cls(np.full(n, 1.0 / n))

    @property
    def n(self) -> int:
        return self.weights.size

    @property
    def support(self) -> np.ndarray:
        return self.weights > 0

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.weights, dtype=dtype)

    def __len__(self):
        return self.weights.size

    def __repr__(self):
        return f"ProbMeasure({np.array2string(self.weights, precision=6)})"


@dataclass(frozen=True, eq=False)
class PositiveFunction:
    """Strictly positive function on the state space."""

    values: np.ndarray

    def __post_init__(self):
        v = _frozen(self.values)
        if v.ndim != 1 or not np.all(np.isfinite(v)) or not np.all(v > 0):
            raise ValueError("a positive function needs finite entries > 0")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_log(cls, g) -> "PositiveFunction":
        return cls(np.exp(np.asarray(g, dtype=float)))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


@dataclass(frozen=True, eq=False)
class Density:
    """Density ``dmu/dpi`` stored together with its base measure ``pi``.

    Values off the support of ``base`` are arbitrary and are kept as given.
    """

    values: np.ndarray
    base: ProbMeasure

    def __post_init__(self):
        v = _frozen(self.values)
        if v.shape != self.base.weights.shape:
            raise DimensionMismatchError("density and base measure differ in length")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise ValueError("density values must be finite and nonnegative")
        mass = float(v @ self.base.weights)
        if abs(mass - 1.0) > DENSITY_MASS_TOL:
            raise ValueError(f"density integrates to {mass!r} against its base, not 1")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_measures(cls, mu, pi: ProbMeasure) -> "Density":
        """Radon-Nikodym derivative of ``mu`` with respect to ``pi``."""
        mu = np.asarray(mu, dtype=float)
        pi = pi if isinstance(pi, ProbMeasure) else ProbMeasure(pi)
        w = pi.weights
        bad = np.flatnonzero((mu > 0) & (w <= 0))
        if bad.size:
            raise AbsoluteContinuityViolation(
                f"mu charges states {bad.tolist()} where pi vanishes")
        values = np.zeros_like(mu)
        np.divide(mu, w, out=values, where=w > 0)
        return cls(values, pi)

    def measure(self) -> ProbMeasure:
        """The measure ``psi * base``."""
        return ProbMeasure.normalized_from(self.values * self.base.weights)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


@dataclass
class ValidationReport:
    passed: bool
    violations: list

    def __bool__(self):
        return self.passed

    def __str__(self):
        if self.passed:
            return "model valid"
        return "model invalid:\n" + "\n".join(f"  - {v}" for v in self.violations)


def validate(model: MarkovModel, tol: float = ROW_SUM_TOL) -> ValidationReport:
    """Check the generator invariants of ``model`` and list every violation."""
    violations = []
    L, V = model.L, model.V
    for i, j in zip(*np.nonzero(~np.isfinite(L))):
        violations.append(f"L[{i}][{j}] is not finite")
    for i in np.flatnonzero(~np.isfinite(V)):
        violations.append(f"V[{i}] is not finite")
    off = ~np.eye(model.n, dtype=bool)
    for i, j in zip(*np.nonzero(off & (L < 0))):
        violations.append(f"L[{i}][{j}] = {float(L[i, j])!r} is a negative off-diagonal rate")
    with np.errstate(invalid="ignore"):
        sums = L.sum(axis=1)
    for i in range(model.n):
        if np.isfinite(sums[i]) and abs(sums[i]) > tol:
            violations.append(f"row {i} sums to {float(sums[i])!r}, not 0")
    return ValidationReport(passed=not violations, violations=violations)


def is_irreducible(model: MarkovModel) -> bool:
    """Strong connectivity of the graph of positive off-diagonal rates."""
    adj = (model.L > 0) & ~np.eye(model.n, dtype=bool)
    ncomp, _ = connected_components(adj.astype(float), directed=True, connection="strong")
    return ncomp == 1


def jordan_model() -> MarkovModel:
    """Two states, state 0 absorbing, state 1 escapes at rate 1; ``V = (0, 1)``.

    ``L + diag(V)`` is the nilpotent Jordan block ``[[0, 0], [1, 0]]``.
    """
    return MarkovModel(2, [[0.0, 0.0], [1.0, -1.0]], [0.0, 1.0])


def two_state_model(a: float = 1.0, b: float = 1.0, V=(0.0, 1.0)) -> MarkovModel:
    """Two-state chain jumping 0->1 at rate ``a`` and 1->0 at rate ``b``."""
    return MarkovModel(2, [[-a, a], [b, -b]], list(V))


# -- file format --------------------------------------------------------------

def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ModelFormatError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _vector(value, where: str) -> list:
    if not isinstance(value, list):
        raise ModelFormatError(f"{where}: expected a list of numbers")
    return [_number(v, f"{where}[{i}]") for i, v in enumerate(value)]


def model_from_dict(data) -> MarkovModel:
    if not isinstance(data, dict):
        raise ModelFormatError("top level: expected a JSON object")
    for key in ("n", "L", "V"):
        if key not in data:
            raise ModelFormatError(f"missing field {key!r}")
    n = data["n"]
    if isinstance(n, bool) or not isinstance(n, int):
        raise ModelFormatError(f"field 'n': expected an integer, got {n!r}")
    if not isinstance(data["L"], list):
        raise ModelFormatError("field 'L': expected a list of rows")
    L = [_vector(row, f"L[{i}]") for i, row in enumerate(data["L"])]
    V = _vector(data["V"], "V")
    if len(L) != n or any(len(row) != n for row in L):
        shape = (len(L), ) + ((len(L[0]),) if L else ())
        raise DimensionMismatchError(f"n = {n} but L has shape {shape}")
    if len(V) != n:
        raise DimensionMismatchError(f"n = {n} but V has length {len(V)}")
    raw = data.get("measures", {})
    if not isinstance(raw, dict):
        raise ModelFormatError("field 'measures': expected an object")
    measures = {k: _vector(v, f"measures.{k}") for k, v in raw.items()}
    return MarkovModel(n, L, V, measures)


def model_to_dict(model: MarkovModel) -> dict:
    out = {"n": model.n, "L": model.L.tolist(), "V": model.V.tolist()}
    if model.measures:
        out["measures"] = {k: w.tolist() for k, w in model.measures.items()}
    return out


def load_model(path) -> MarkovModel:
    """Read a model from the JSON file format.

    Raises
    ------
    ModelFormatError
        On malformed JSON (with line/column) or on a bad field.
    DimensionMismatchError
        When ``n``, ``L`` and ``V`` disagree.
    """
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(
            f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return model_from_dict(data)


def _fmt(x: float) -> str:
    # repr is the shortest string that round-trips, at most 17 significant digits
    if not math.isfinite(x):
        raise ValueError("cannot serialize non-finite value")
    return repr(float(x))


def _fmt_vec(v) -> str:
    return "[" + ", ".join(_fmt(x) for x in v) + "]"


def save_model(model: MarkovModel, path) -> None:
    rows = ",\n    ".join(_fmt_vec(r) for r in model.L)
    parts = [f'  "n": {model.n}', f'  "L": [\n    {rows}\n  ]', f'  "V": {_fmt_vec(model.V)}']
    if model.measures:
        ms = ",\n    ".join(f"{json.dumps(k)}: {_fmt_vec(w)}" for k, w in model.measures.items())
        parts.append(f'  "measures": {{\n    {ms}\n  }}')
    Path(path).write_text("{\n" + ",\n".join(parts) + "\n}\n")
