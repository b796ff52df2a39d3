"""Sets of linear functions of the local phases and their geometry.

A function set is a coefficient matrix ``V`` (one column per function), an
offset vector, and a normalized weight vector.  The two scalars that control
the asymptotic uncertainty are the normalization term (weighted sum of squared
column norms) and the geometry parameter, which measures how the columns
cluster around the all-ones direction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import NumericalError, ValidationError

WEIGHT_SUM_TOL = 1e-12
_GEOMETRY_SLACK = 1e-12


@dataclass(frozen=True)
class LinearFunctionSet:
    """Linear functions f_j(theta) = V[:, j] . theta + a[j] with weights w[j]."""

    V: np.ndarray
    a: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        V = np.atleast_2d(np.asarray(self.V, dtype=float))
        if V.ndim != 2 or V.size == 0:
            raise ValidationError(f"V must be a d x l matrix, got shape {V.shape}")
        d, l = V.shape
        a = np.asarray(self.a, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if a.shape != (l,):
            raise ValidationError(f"offsets must have length {l}, got shape {a.shape}")
        if w.shape != (l,):
            raise ValidationError(f"weights must have length {l}, got shape {w.shape}")
        if np.any(w < 0):
            raise ValidationError("weights must be non-negative")
        if abs(float(w.sum()) - 1.0) > WEIGHT_SUM_TOL:
            raise ValidationError(
                f"weights must sum to 1 (no silent renormalization), got {float(w.sum())!r}"
            )
        if not np.any(np.linalg.norm(V, axis=0) > 0):
            raise ValidationError("V must have at least one nonzero column")
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "weights", w)

    @property
    def num_params(self) -> int:
        return self.V.shape[0]

    @property
    def num_functions(self) -> int:
        return self.V.shape[1]

    def evaluate(self, theta: np.ndarray) -> np.ndarray:
        """f(theta) = V^T theta + a."""
        theta = np.asarray(theta, dtype=float)
        return self.V.T @ theta + self.a

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready dict with V stored row-major."""
        return {
            "V": self.V.tolist(),
            "a": self.a.tolist(),
            "weights": self.weights.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "LinearFunctionSet":
        try:
            V = np.asarray(data["V"], dtype=float)
        except KeyError as exc:
            raise ValidationError("function-set JSON must define 'V'") from exc
        V = np.atleast_2d(V)
        l = V.shape[1]
        a = np.asarray(data.get("a", np.zeros(l)), dtype=float)
        weights = np.asarray(data.get("weights", np.full(l, 1.0 / l)), dtype=float)
        return cls(V=V, a=a, weights=weights)


@dataclass(frozen=True)
class GeometryReport:
    """Normalization term, geometry parameter, and per-function angles to the ones vector."""

    normalization: float
    geometry: float
    per_function_angles: tuple[float | None, ...]


def ones_minus_identity(d: int) -> np.ndarray:
    """The d x d matrix of ones minus the identity."""
    return np.ones((d, d)) - np.eye(d)


def normalization_term(funcs: LinearFunctionSet) -> float:
    """Weighted sum of squared column norms; strictly positive."""
    norms_sq = np.sum(funcs.V**2, axis=0)
    value = float(funcs.weights @ norms_sq)
    if value <= 0.0:
        raise ValidationError("normalization term vanishes: all weighted functions are zero")
    return value


def geometry_parameter(funcs: LinearFunctionSet) -> GeometryReport:
    """Geometry parameter of the function set, bounded by [-1, d-1].

    Computed from the matrix form Tr(W V^T (ones - I) V) divided by the
    normalization term.  Angles between each column and the ones vector are
    reported as well; zero columns get None.
    """
    norm = normalization_term(funcs)
    d = funcs.num_params
    X = ones_minus_identity(d)
    W = np.diag(funcs.weights)
    geometry = float(np.trace(W @ funcs.V.T @ X @ funcs.V)) / norm
    if not -1.0 - _GEOMETRY_SLACK <= geometry <= (d - 1.0) + _GEOMETRY_SLACK:
        raise NumericalError(
            f"geometry parameter {geometry!r} fell outside [-1, {d - 1}]"
        )

    ones = np.ones(d)
    angles: list[float | None] = []
    for j in range(funcs.num_functions):
        col = funcs.V[:, j]
        norm_col = float(np.linalg.norm(col))
        if norm_col == 0.0:
            angles.append(None)
        else:
            cos_phi = float(col @ ones) / (norm_col * np.sqrt(d))
            angles.append(float(np.arccos(np.clip(cos_phi, -1.0, 1.0))))
    return GeometryReport(
        normalization=norm, geometry=geometry, per_function_angles=tuple(angles)
    )


# Fixed eigenbases for the two smallest networks; larger ones are completed by
# deterministic orthonormalization, which is unique only up to rotations in
# the degenerate eigenspace.
_U_X_2 = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
_U_X_3 = np.array(
    [
        [np.sqrt(2.0), np.sqrt(3.0), 1.0],
        [np.sqrt(2.0), -np.sqrt(3.0), 1.0],
        [np.sqrt(2.0), 0.0, -2.0],
    ]
) / np.sqrt(6.0)


def x_matrix_eigendecomposition(d: int) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (d-1, -1, ..., -1) and an orthogonal eigenbasis of ones - I.

    The first column is always the normalized ones vector; the remaining
    columns are a reproducible orthonormal basis of its complement.
    """
    if d < 2:
        raise ValidationError(f"eigendecomposition needs d >= 2, got {d}")
    eigenvalues = np.full(d, -1.0)
    eigenvalues[0] = d - 1.0
    if d == 2:
        return eigenvalues, _U_X_2.copy()
    if d == 3:
        return eigenvalues, _U_X_3.copy()

    cols = [np.ones(d) / np.sqrt(d)]
    for k in range(d):
        if len(cols) == d:
            break
        v = np.zeros(d)
        v[k] = 1.0
        for c in cols:
            v -= (c @ v) * c
        norm = np.linalg.norm(v)
        if norm > 1e-10:
            cols.append(v / norm)
    U = np.column_stack(cols)
    return eigenvalues, U


def clustered_zero_geometry_function(d: int) -> LinearFunctionSet:
    """Single function whose coefficients give a vanishing geometry parameter.

    The coefficient vector is the eigenbasis of ones - I applied to the ones
    vector, which spreads equal weight over the aligned and orthogonal
    eigenspaces so their contributions cancel.
    """
    _, U = x_matrix_eigendecomposition(d)
    f = U @ np.ones(d)
    return LinearFunctionSet(V=f[:, None], a=np.zeros(1), weights=np.ones(1))
