"""Asymptotic uncertainty bounds and the optimal correlation strength.

For sensor-symmetric probes the asymptotic bound factorizes into N h(J, G, d)
/ (4 mu v), where h couples the correlation strength J to the geometry
parameter G of the target functions.  Minimizing h over J yields a closed-form
optimum, and for two-sensor networks the bound can be written directly in
terms of the probe parameter gamma.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ValidationError
from .fisher_info import InfoMatrix
from .linear_functions import LinearFunctionSet

_DEGENERATE_G_TOL = 1e-9
_ROOT_SCAN_POINTS = 10_000
_ROOT_SCAN_UPPER = 10.0
_BISECT_TOL = 1e-12


@dataclass(frozen=True)
class AsymptoticBound:
    """Asymptotic uncertainty for a mu-trial experiment plus its ingredients."""

    value: float
    mu: int
    components: dict

    def __post_init__(self) -> None:
        if self.value <= 0.0:
            raise NumericalError(f"asymptotic bound must be positive, got {self.value!r}")


def _validate_joint_domain(J: float, G: float, d: int) -> None:
    if d < 2:
        raise ValidationError(f"need at least two sensors, got d={d}")
    j_lo = 1.0 / (1.0 - d)
    if not j_lo < J < 1.0:
        raise ValidationError(
            f"correlation strength must satisfy {j_lo} < J < 1 for d={d}, got {J!r}"
        )
    if not -1.0 <= G <= d - 1.0:
        raise ValidationError(f"geometry must lie in [-1, {d - 1}], got {G!r}")


def h_factor(J: float, G: float, d: int) -> float:
    """Correlation-geometry factor [1 + (d-2-G)J] / {(1-J)[1+(d-1)J]}."""
    _validate_joint_domain(J, G, d)
    return (1.0 + (d - 2.0 - G) * J) / ((1.0 - J) * (1.0 + (d - 1.0) * J))


def h_factor_slope(J: float, G: float, d: int) -> float:
    """Partial derivative of the factor with respect to J."""
    _validate_joint_domain(J, G, d)
    numer = (d - 1.0) * (d - 2.0 - G) * J**2 + 2.0 * (d - 1.0) * J - G
    denom = (1.0 - J) ** 2 * (1.0 + (d - 1.0) * J) ** 2
    return numer / denom


def crb_general(funcs: LinearFunctionSet, Fq: InfoMatrix, mu: int) -> float:
    """Asymptotic bound Tr(W V^T Fq^{-1} V) / mu via a linear solve."""
    if mu < 1:
        raise ValidationError(f"trial count must be >= 1, got {mu}")
    if Fq.dim != funcs.num_params:
        raise ValidationError(
            f"dimension mismatch: functions over {funcs.num_params} parameters, "
            f"information matrix is {Fq.dim} x {Fq.dim}"
        )
    if not Fq.invertible:
        raise NumericalError(
            f"information matrix is singular (min eigenvalue {Fq.min_eigenvalue!r})"
        )
    solved = np.linalg.solve(Fq.matrix, funcs.V)
    value = float(funcs.weights @ np.sum(funcs.V * solved, axis=0)) / mu
    return value


def crb_sensor_symmetric(
    N: float, v: float, J: float, G: float, d: int, mu: int
) -> AsymptoticBound:
    """Closed-form bound N h(J, G, d) / (4 mu v) for sensor-symmetric probes."""
    if N <= 0.0:
        raise ValidationError(f"normalization term must be positive, got {N!r}")
    if v <= 0.0:
        raise ValidationError(f"variance must be positive, got {v!r}")
    if mu < 1:
        raise ValidationError(f"trial count must be >= 1, got {mu}")
    h = h_factor(J, G, d)
    return AsymptoticBound(
        value=N * h / (4.0 * mu * v),
        mu=mu,
        components={"N": N, "v": v, "J": J, "G": G, "d": d},
    )


def j_opt(G: float, d: int) -> float:
    """Correlation strength minimizing the asymptotic bound at fixed geometry.

    Closed form [1 - sqrt((G+1)(d-1-G)/(d-1))] / (G+2-d); the removable
    0/0 point at G = d-2 is replaced by its limit (d-2)/[2(d-1)].
    """
    if d < 2:
        raise ValidationError(f"need at least two sensors, got d={d}")
    if not -1.0 < G < d - 1.0:
        raise ValidationError(
            f"optimal strength exists only for -1 < G < {d - 1}, got {G!r}"
        )
    if abs(G - (d - 2.0)) < _DEGENERATE_G_TOL:
        return (d - 2.0) / (2.0 * (d - 1.0))
    root = np.sqrt((G + 1.0) * (d - 1.0 - G) / (d - 1.0))
    return float((1.0 - root) / (G + 2.0 - d))


def gamma_opt(G: float) -> float:
    """Non-negative probe parameter realizing the optimal two-sensor strength."""
    if not -1.0 < G < 1.0:
        raise ValidationError(f"two-sensor geometry must lie in (-1, 1), got {G!r}")
    J = j_opt(G, 2)
    return float(np.sqrt((1.0 - J) / (1.0 + J)))


def eps_qbit(gamma: float, G: float, mu: int) -> float:
    """Two-sensor asymptotic bound (1+g^2)[(1-G)+(1+G)g^2] / (4 mu g^2).

    Assumes normalized functions, unit generator variance (4v = 1), and the
    two-sensor probe family, whose correlation strength is (1-g^2)/(1+g^2).
    """
    if gamma == 0.0:
        raise ValidationError("bound diverges at gamma = 0 (singular information matrix)")
    if not np.isfinite(gamma):
        raise ValidationError(f"gamma must be finite, got {gamma!r}")
    if mu < 1:
        raise ValidationError(f"trial count must be >= 1, got {mu}")
    g_sq = gamma**2
    return float((1.0 + g_sq) * ((1.0 - G) + (1.0 + G) * g_sq) / (4.0 * mu * g_sq))


def balanced_gamma(gamma_loc: float, gamma_ent: float, G: float) -> np.ndarray:
    """Positive probe parameters whose bound is the midpoint of two references.

    Scans (0, 10] for sign changes of the midpoint residual and bisects each
    bracket; the bound diverges at both 0+ and infinity, so the roots around
    the minimum come in brackets found by the scan.
    """
    target = 0.5 * (eps_qbit(gamma_loc, G, 1) + eps_qbit(gamma_ent, G, 1))

    def residual(g: float) -> float:
        return eps_qbit(g, G, 1) - target

    grid = np.linspace(0.0, _ROOT_SCAN_UPPER, _ROOT_SCAN_POINTS + 1)[1:]
    vals = np.array([residual(g) for g in grid])
    roots: list[float] = []
    for i in range(len(grid) - 1):
        lo, hi = grid[i], grid[i + 1]
        f_lo, f_hi = vals[i], vals[i + 1]
        if f_lo == 0.0:
            roots.append(float(lo))
            continue
        if f_lo * f_hi < 0.0:
            while hi - lo > _BISECT_TOL:
                mid = 0.5 * (lo + hi)
                f_mid = residual(mid)
                if f_mid == 0.0:
                    lo = hi = mid
                    break
                if f_lo * f_mid < 0.0:
                    hi = mid
                else:
                    lo, f_lo = mid, f_mid
            roots.append(0.5 * (lo + hi))
    if vals[-1] == 0.0:
        roots.append(float(grid[-1]))
    return np.array(sorted(roots))


def verify_jopt_is_minimum(G: float, d: int) -> bool:
    """Check the optimum by slope signs near both ends of the valid J interval."""
    if not -1.0 < G < d - 1.0:
        raise ValidationError(
            f"minimum verification needs -1 < G < {d - 1}, got {G!r}"
        )
    j_lo = 1.0 / (1.0 - d)
    eps = 1e-4 * (1.0 - j_lo)
    probe_lo = j_lo + eps
    probe_hi = 1.0 - eps
    j_star = j_opt(G, d)
    h_star = h_factor(j_star, G, d)
    return (
        h_factor_slope(probe_lo, G, d) < 0.0
        and h_factor_slope(probe_hi, G, d) > 0.0
        and h_star <= h_factor(probe_lo, G, d)
        and h_star <= h_factor(probe_hi, G, d)
    )
