"""Quantum and classical Fisher information matrices for the qubit network.

The quantum matrix of a pure probe is four times the covariance matrix of the
half-Pauli-z generators.  For sensor-symmetric probes it has the closed form
4v[(1-J) I + J ones] with a two-point spectrum, and its inverse is available
analytically on the invertible correlation range.  The classical matrix is
computed for the separable four-outcome measurement in the +-x bases of both
qubits of a two-sensor network.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ValidationError
from .qubit_network import PureState, _sigma_z_moments, make_gamma_state_2

SYMMETRY_TOL = 1e-10
PSD_TOL = 1e-10
INVERTIBILITY_RTOL = 1e-10


@dataclass(frozen=True)
class InfoMatrix:
    """Real symmetric positive semi-definite information matrix."""

    matrix: np.ndarray
    kind: str
    invertible: bool
    eigenvalues: np.ndarray

    def __post_init__(self) -> None:
        mat = np.asarray(self.matrix, dtype=float)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValidationError(f"information matrix must be square, got {mat.shape}")
        asym = float(np.max(np.abs(mat - mat.T))) if mat.size else 0.0
        if asym > SYMMETRY_TOL:
            raise NumericalError(f"information matrix asymmetric by {asym!r}")
        eig = np.asarray(self.eigenvalues, dtype=float)
        if float(eig.min()) < -PSD_TOL:
            raise NumericalError(
                f"information matrix is not positive semi-definite: min eigenvalue {eig.min()!r}"
            )
        if self.kind not in ("quantum", "classical"):
            raise ValidationError(f"kind must be 'quantum' or 'classical', got {self.kind!r}")
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "eigenvalues", eig)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues.min())


def _relative_invertibility(eigenvalues: np.ndarray) -> bool:
    # scale-free rule: smallest eigenvalue must clear a relative floor
    max_eig = float(eigenvalues.max())
    return max_eig > 0.0 and float(eigenvalues.min()) > INVERTIBILITY_RTOL * max_eig


def qfi_pure(state: PureState) -> InfoMatrix:
    """Quantum Fisher information matrix of a pure probe under local z rotations."""
    first, second = _sigma_z_moments(state)
    mat = second - np.outer(first, first)
    mat = 0.5 * (mat + mat.T)
    eig = np.linalg.eigvalsh(mat)
    return InfoMatrix(
        matrix=mat,
        kind="quantum",
        invertible=_relative_invertibility(eig),
        eigenvalues=eig,
    )


def qfi_sensor_symmetric(v: float, J: float, d: int) -> InfoMatrix:
    """Closed-form matrix 4v[(1-J) I + J ones] with its analytic spectrum.

    Eigenvalues are 4v[1+(d-1)J] once and 4v(1-J) with multiplicity d-1;
    the matrix is invertible exactly when 1/(1-d) < J < 1 and v > 0.
    """
    if d < 1:
        raise ValidationError(f"d must be a positive integer, got {d}")
    if not 0.0 <= 4.0 * v <= 1.0 + 1e-12:
        raise ValidationError(f"variance must satisfy 0 <= 4v <= 1, got v={v!r}")
    if not -1.0 <= J <= 1.0:
        raise ValidationError(f"correlation strength must lie in [-1, 1], got {J!r}")
    mat = 4.0 * v * ((1.0 - J) * np.eye(d) + J * np.ones((d, d)))
    eig = np.full(d, 4.0 * v * (1.0 - J))
    eig[0] = 4.0 * v * (1.0 + (d - 1) * J)
    invertible = v > 0.0 and 1.0 / (1.0 - d) < J < 1.0 if d > 1 else v > 0.0
    return InfoMatrix(matrix=mat, kind="quantum", invertible=invertible, eigenvalues=eig)


def qfi_inverse_closed_form(v: float, J: float, d: int) -> np.ndarray:
    """Analytic inverse {[1+(d-1)J] I - J ones} / {4v(1-J)[1+(d-1)J]}."""
    if d < 2:
        raise ValidationError(f"the closed-form inverse needs d >= 2, got {d}")
    if v <= 0.0:
        raise ValidationError(f"variance must be positive, got {v!r}")
    if not 1.0 / (1.0 - d) < J < 1.0:
        raise ValidationError(
            f"matrix is singular outside 1/(1-d) < J < 1; got J={J!r} for d={d}"
        )
    numer = (1.0 + (d - 1) * J) * np.eye(d) - J * np.ones((d, d))
    denom = 4.0 * v * (1.0 - J) * (1.0 + (d - 1) * J)
    return numer / denom


def classical_fim_povm2(gamma: float, theta: tuple[float, float]) -> InfoMatrix:
    """Classical Fisher information of the four-outcome local +-x measurement.

    The likelihood for outcome (n, k) is [cos(x+) + g cos(x-)]^2 / [2(1+g^2)]
    with x+- = [t1 +- t2 +- pi(k +- n)]/2.  Each Fisher summand
    (dp)(dp)/p is evaluated in its cancelled product-rule form, which stays
    finite at outcomes of vanishing probability, so the result equals the
    constant matrix [[1, J], [J, 1]] for every phase pair.
    """
    if gamma == 0.0 or not np.isfinite(gamma):
        raise ValidationError(
            f"the measurement statistics degenerate unless 0 < |gamma| < inf, got {gamma!r}"
        )
    t1, t2 = float(theta[0]), float(theta[1])
    norm = 2.0 * (1.0 + gamma**2)
    f11 = f22 = f12 = 0.0
    for n in (0, 1):
        for k in (0, 1):
            x_plus = 0.5 * (t1 + t2 + np.pi * (k + n))
            x_minus = 0.5 * (t1 - t2 - np.pi * (k - n))
            s1 = np.sin(x_plus) + gamma * np.sin(x_minus)
            s2 = np.sin(x_plus) - gamma * np.sin(x_minus)
            f11 += s1 * s1
            f22 += s2 * s2
            f12 += s1 * s2
    mat = np.array([[f11, f12], [f12, f22]]) / norm
    mat = 0.5 * (mat + mat.T)
    eig = np.linalg.eigvalsh(mat)
    return InfoMatrix(
        matrix=mat,
        kind="classical",
        invertible=_relative_invertibility(eig),
        eigenvalues=eig,
    )


def verify_povm_optimality(
    gamma: float, theta_grid: list[tuple[float, float]], tol: float
) -> bool:
    """True iff the classical matrix matches the quantum one on every grid point."""
    return povm_max_deviation(gamma, theta_grid) <= tol


def povm_max_deviation(gamma: float, theta_grid: list[tuple[float, float]]) -> float:
    """Largest entry-wise gap between classical and quantum matrices on the grid."""
    fq = qfi_pure(make_gamma_state_2(gamma)).matrix
    worst = 0.0
    for theta in theta_grid:
        fc = classical_fim_povm2(gamma, theta).matrix
        worst = max(worst, float(np.max(np.abs(fc - fq))))
    return worst
