"""Qubit network probe states, phase encoding, and generator statistics.

States are dense complex amplitude vectors over ``d`` qubits, one qubit per
sensor, indexed in binary with sensor 1 as the most significant bit.  The
per-sensor generator is half the Pauli-z operator, so all generator moments
reduce to signed sums over basis probabilities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

MAX_QUBITS = 20
NORM_TOL = 1e-12
SYMMETRY_TOL = 1e-10
_ZERO_VARIANCE_TOL = 1e-14


@dataclass(frozen=True)
class PureState:
    """Normalized pure state of a ``num_qubits``-sensor network."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        d = self.num_qubits
        if not isinstance(d, (int, np.integer)) or d < 1:
            raise ValidationError(f"num_qubits must be a positive integer, got {d!r}")
        if d > MAX_QUBITS:
            raise ValidationError(f"num_qubits={d} exceeds the dense-vector cap of {MAX_QUBITS}")
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (2**d,):
            raise ValidationError(
                f"amplitudes must have length 2**{d}={2**d}, got shape {amps.shape}"
            )
        norm_sq = float(np.sum(np.abs(amps) ** 2))
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise ValidationError(f"state is not normalized: sum |a|^2 = {norm_sq!r}")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def probabilities(self) -> np.ndarray:
        """Computational-basis probabilities |a_b|^2."""
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class CorrelationProfile:
    """Generator variances, covariances, and pairwise correlation strengths.

    Entries of ``strengths`` are meaningful only where ``strengths_defined``
    is True; a pair is undefined whenever either sensor has zero variance.
    """

    variances: np.ndarray
    covariances: np.ndarray
    strengths: np.ndarray
    strengths_defined: np.ndarray
    sensor_symmetric: bool
    common_v: float | None
    common_J: float | None

    def strength(self, i: int, j: int) -> float | None:
        """Correlation strength for sensors ``i`` and ``j`` (0-based), or None."""
        if not self.strengths_defined[i, j]:
            return None
        return float(self.strengths[i, j])


def sigma_z_signs(d: int) -> np.ndarray:
    """(d, 2^d) matrix of Pauli-z eigenvalues per sensor and basis state."""
    idx = np.arange(2**d)
    bits = (idx[None, :] >> (d - 1 - np.arange(d)[:, None])) & 1
    return 1.0 - 2.0 * bits


def make_gamma_state_2(gamma: float) -> PureState:
    """Two-sensor probe with amplitudes (1, g, g, 1) up to normalization."""
    if not np.isfinite(gamma):
        raise ValidationError(f"gamma must be finite, got {gamma!r}")
    amps = np.array([1.0, gamma, gamma, 1.0], dtype=np.complex128)
    amps /= np.sqrt(2.0 * (1.0 + gamma**2))
    return PureState(2, amps)


def make_gamma_state_d(gamma: float, d: int) -> PureState:
    """Probe with unit amplitude on |0...0> and |1...1> and ``gamma`` elsewhere."""
    if d < 2:
        raise ValidationError(f"gamma-family states need at least 2 sensors, got d={d}")
    if not np.isfinite(gamma):
        raise ValidationError(f"gamma must be finite, got {gamma!r}")
    amps = np.full(2**d, gamma, dtype=np.complex128)
    amps[0] = 1.0
    amps[-1] = 1.0
    amps /= np.sqrt(2.0 * (1.0 + (2 ** (d - 1) - 1) * gamma**2))
    return PureState(d, amps)


def make_product_state(a: float, d: int) -> PureState:
    """Tensor power of the single-qubit state sqrt(a)|0> + sqrt(1-a)|1>."""
    if not 0.0 <= a <= 1.0:
        raise ValidationError(f"population a must lie in [0, 1], got {a!r}")
    if d < 1:
        raise ValidationError(f"d must be a positive integer, got {d}")
    single = np.array([np.sqrt(a), np.sqrt(1.0 - a)], dtype=np.complex128)
    amps = single
    for _ in range(d - 1):
        amps = np.kron(amps, single)
    return PureState(d, amps)


def apply_encoding(state: PureState, theta: np.ndarray) -> PureState:
    """Imprint local phases: each amplitude picks up exp(-i/2 sum_k (+-1) theta_k).

    The sign for sensor k is +1 on bit 0 and -1 on bit 1, matching the
    diagonal action of exp(-i sigma_z theta_k / 2) on each qubit.
    """
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (state.num_qubits,):
        raise ValidationError(
            f"theta must have length {state.num_qubits}, got shape {theta.shape}"
        )
    signs = sigma_z_signs(state.num_qubits)
    phases = np.exp(-0.5j * (signs.T @ theta))
    return PureState(state.num_qubits, state.amplitudes * phases)


def _sigma_z_moments(state: PureState) -> tuple[np.ndarray, np.ndarray]:
    """First and second Pauli-z moments (<s_i>, <s_i s_j>) from basis probabilities."""
    probs = state.probabilities
    signs = sigma_z_signs(state.num_qubits)
    first = signs @ probs
    second = (signs * probs) @ signs.T
    return first, second


def correlation_profile(state: PureState) -> CorrelationProfile:
    """Variances v_i, covariances c_ij, and strengths J_ij of the generators."""
    d = state.num_qubits
    first, second = _sigma_z_moments(state)
    variances = (1.0 - first**2) / 4.0
    covariances = (second - np.outer(first, first)) / 4.0

    defined = np.ones((d, d), dtype=bool)
    zero_v = variances <= _ZERO_VARIANCE_TOL
    defined[zero_v, :] = False
    defined[:, zero_v] = False
    strengths = np.zeros((d, d))
    if defined.any():
        scale = np.sqrt(np.outer(np.where(zero_v, 1.0, variances),
                                 np.where(zero_v, 1.0, variances)))
        strengths = np.where(defined, covariances / scale, 0.0)

    off_diag = ~np.eye(d, dtype=bool)
    v_spread = float(np.max(np.abs(variances - variances.mean()))) if d > 0 else 0.0
    if d > 1:
        c_off = covariances[off_diag]
        c_spread = float(np.max(np.abs(c_off - c_off.mean())))
    else:
        c_off = np.array([])
        c_spread = 0.0
    symmetric = v_spread <= SYMMETRY_TOL and c_spread <= SYMMETRY_TOL
    if zero_v.any() and not zero_v.all():
        symmetric = False

    common_v = float(variances.mean()) if symmetric else None
    common_J = None
    if symmetric and not zero_v.any() and d > 1:
        common_J = float(strengths[off_diag].mean())
    return CorrelationProfile(
        variances=variances,
        covariances=covariances,
        strengths=strengths,
        strengths_defined=defined,
        sensor_symmetric=symmetric,
        common_v=common_v,
        common_J=common_J,
    )


def reduced_qubit_purity(state: PureState, k: int) -> float:
    """Purity of the reduced state of qubit ``k`` (0-based)."""
    d = state.num_qubits
    tensor = state.amplitudes.reshape((2,) * d)
    mat = np.moveaxis(tensor, k, 0).reshape(2, -1)
    rho = mat @ mat.conj().T
    return float(np.real(np.trace(rho @ rho)))


def is_product_state(state: PureState, tol: float = 1e-9) -> bool:
    """True iff every single-qubit reduced state is pure to within ``tol``."""
    return all(
        reduced_qubit_purity(state, k) >= 1.0 - tol for k in range(state.num_qubits)
    )
