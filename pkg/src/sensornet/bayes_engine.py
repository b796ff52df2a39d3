"""Bayesian estimation of linear functions on a two-sensor qubit network.

Measurement records come from the separable four-outcome +-x measurement on
both qubits of the two-sensor probe family.  Posteriors are evaluated on a
uniform grid over the prior box (midpoint rule); the mu-trial mean square
error marginalizes over true phases and records by Monte Carlo with one
counter-based random stream per sample, so results do not depend on batch
size or worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .crb_optimizer import crb_general
from .errors import NumericalError, ValidationError
from .fisher_info import qfi_pure
from .linear_functions import LinearFunctionSet
from .qubit_network import make_gamma_state_2
from .rng import philox_stream

DEFAULT_RESOLUTION = 200
DEFAULT_MC_SAMPLES = 2000
DEFAULT_MU_TAU_THRESHOLD = 0.05

_OUTCOMES = np.array([[0, 0], [0, 1], [1, 0], [1, 1]], dtype=np.uint8)
_PROB_FLOOR = 1e-300
_BATCH = 256


@dataclass(frozen=True)
class PriorBox:
    """Hyper-rectangular support of the flat prior."""

    center: np.ndarray
    widths: np.ndarray

    def __post_init__(self) -> None:
        center = np.atleast_1d(np.asarray(self.center, dtype=float))
        widths = np.atleast_1d(np.asarray(self.widths, dtype=float))
        if center.ndim != 1 or center.shape != widths.shape:
            raise ValidationError(
                f"center and widths must be 1-D vectors of equal length, "
                f"got {center.shape} and {widths.shape}"
            )
        if np.any(widths <= 0.0):
            raise ValidationError("all prior widths must be positive")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "widths", widths)

    @property
    def num_params(self) -> int:
        return self.center.size

    @property
    def lower(self) -> np.ndarray:
        return self.center - self.widths / 2.0

    @property
    def upper(self) -> np.ndarray:
        return self.center + self.widths / 2.0

    @property
    def volume(self) -> float:
        return float(np.prod(self.widths))

    @property
    def density(self) -> float:
        return 1.0 / self.volume

    def to_dict(self) -> dict:
        return {"center": self.center.tolist(), "widths": self.widths.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "PriorBox":
        try:
            return cls(center=np.asarray(data["center"], dtype=float),
                       widths=np.asarray(data["widths"], dtype=float))
        except KeyError as exc:
            raise ValidationError("prior JSON must define 'center' and 'widths'") from exc


@dataclass(frozen=True)
class MeasurementRecord:
    """Sequence of (n, k) outcomes from repeated trials on one probe setting."""

    outcomes: np.ndarray
    gamma: float
    true_theta: tuple[float, float]

    def __post_init__(self) -> None:
        outcomes = np.asarray(self.outcomes, dtype=np.uint8).reshape(-1, 2)
        if outcomes.size and outcomes.max() > 1:
            raise ValidationError("outcomes must be bit pairs")
        object.__setattr__(self, "outcomes", outcomes)

    @property
    def mu(self) -> int:
        return self.outcomes.shape[0]

    def counts(self) -> np.ndarray:
        """Occurrences of the four outcomes in the fixed order (00, 01, 10, 11)."""
        idx = self.outcomes[:, 0].astype(int) * 2 + self.outcomes[:, 1].astype(int)
        return np.bincount(idx, minlength=4)


@dataclass(frozen=True)
class PosteriorGrid:
    """Posterior density on a uniform grid over a rectangular box.

    ``values[i, j]`` is the density at (axes[0][i], axes[1][j]); the values
    times the cell area sum to one.
    """

    box: PriorBox
    resolution: int
    axes: tuple[np.ndarray, np.ndarray]
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if np.any(values < 0.0):
            raise NumericalError("posterior density has negative entries")
        total = float(values.sum() * self.cell_area)
        if abs(total - 1.0) > 1e-8:
            raise NumericalError(f"posterior normalization off by {total - 1.0!r}")
        object.__setattr__(self, "values", values)

    @property
    def cell_area(self) -> float:
        return self.box.volume / self.values.size

    def mean(self) -> np.ndarray:
        """Posterior mean of the phases by midpoint quadrature."""
        w = self.values * self.cell_area
        return np.array(
            [float(np.sum(w * self.axes[0][:, None])),
             float(np.sum(w * self.axes[1][None, :]))]
        )


@dataclass(frozen=True)
class CurvePoint:
    mu: int
    mse: float
    mc_stderr: float
    crb: float | None

    @property
    def ratio(self) -> float | None:
        return None if self.crb is None else self.mse / self.crb


@dataclass(frozen=True)
class UncertaintyCurve:
    """Monte Carlo mean square error versus trial count, with asymptotic bounds."""

    entries: tuple[CurvePoint, ...]
    mc_samples: int
    seed: int
    mu_tau: int | None
    threshold: float = DEFAULT_MU_TAU_THRESHOLD

    @property
    def mu_values(self) -> np.ndarray:
        return np.array([p.mu for p in self.entries])


@dataclass(frozen=True)
class BayesMseResult:
    """Monte Carlo estimate of the Bayesian mean square error and its noise."""

    value: float
    mc_stderr: float
    mu: int
    mc_samples: int
    resolution: int
    seed: int


@dataclass(frozen=True)
class Peak:
    i: int
    j: int
    theta1: float
    theta2: float
    value: float


def likelihood_single(n: int, k: int, theta: tuple[float, float], gamma: float) -> float:
    """Single-trial outcome probability [cos(x+) + g cos(x-)]^2 / [2(1+g^2)]."""
    t1, t2 = float(theta[0]), float(theta[1])
    x_plus = 0.5 * (t1 + t2 + np.pi * (k + n))
    x_minus = 0.5 * (t1 - t2 - np.pi * (k - n))
    amp = np.cos(x_plus) + gamma * np.cos(x_minus)
    return float(amp * amp / (2.0 * (1.0 + gamma**2)))


def outcome_probabilities(theta: tuple[float, float], gamma: float) -> np.ndarray:
    """Probabilities of the four outcomes in the fixed order (00, 01, 10, 11)."""
    t1, t2 = float(theta[0]), float(theta[1])
    n = _OUTCOMES[:, 0].astype(float)
    k = _OUTCOMES[:, 1].astype(float)
    x_plus = 0.5 * (t1 + t2 + np.pi * (k + n))
    x_minus = 0.5 * (t1 - t2 - np.pi * (k - n))
    amp = np.cos(x_plus) + gamma * np.cos(x_minus)
    return amp**2 / (2.0 * (1.0 + gamma**2))


def simulate_record(
    gamma: float, true_theta: tuple[float, float], mu: int, seed: int
) -> MeasurementRecord:
    """Draw mu independent outcomes from the single-trial distribution."""
    if mu < 0:
        raise ValidationError(f"trial count must be non-negative, got {mu}")
    probs = outcome_probabilities(true_theta, gamma)
    probs = probs / probs.sum()
    rng = philox_stream(seed, 0)
    draws = rng.choice(4, size=int(mu), p=probs)
    return MeasurementRecord(
        outcomes=_OUTCOMES[draws],
        gamma=float(gamma),
        true_theta=(float(true_theta[0]), float(true_theta[1])),
    )


def _axis_centers(lower: float, width: float, resolution: int) -> np.ndarray:
    return lower + (np.arange(resolution) + 0.5) * (width / resolution)


def _grid_axes(box: PriorBox, resolution: int) -> tuple[np.ndarray, np.ndarray]:
    if resolution < 2:
        raise ValidationError(f"grid resolution must be >= 2, got {resolution}")
    lower = box.lower
    return (
        _axis_centers(lower[0], box.widths[0], resolution),
        _axis_centers(lower[1], box.widths[1], resolution),
    )


def _log_likelihood_grids(
    gamma: float, t1: np.ndarray, t2: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Clipped per-outcome log likelihoods (4, g1*g2) plus a zero-probability mask."""
    T1, T2 = np.meshgrid(t1, t2, indexing="ij")
    norm = 2.0 * (1.0 + gamma**2)
    logs = np.empty((4, T1.size))
    zero = np.empty((4, T1.size), dtype=bool)
    for m, (n, k) in enumerate(_OUTCOMES):
        x_plus = 0.5 * (T1 + T2 + np.pi * (int(k) + int(n)))
        x_minus = 0.5 * (T1 - T2 - np.pi * (int(k) - int(n)))
        amp = np.cos(x_plus) + gamma * np.cos(x_minus)
        p = (amp**2 / norm).ravel()
        zero[m] = p < _PROB_FLOOR
        logs[m] = np.log(np.maximum(p, _PROB_FLOOR))
    return logs, zero


def _validate_two_param(funcs_or_box, what: str) -> None:
    if funcs_or_box.num_params != 2:
        raise ValidationError(
            f"{what} must involve exactly 2 parameters for this measurement model, "
            f"got {funcs_or_box.num_params}"
        )


def posterior(record: MeasurementRecord, prior: PriorBox, resolution: int) -> PosteriorGrid:
    """Posterior density over the prior box given a measurement record.

    Single-trial log likelihoods are accumulated through the outcome counts
    (a sufficient statistic for the product likelihood), shifted by the
    maximum, exponentiated, and normalized on the grid.
    """
    _validate_two_param(prior, "prior box")
    if np.any(prior.widths > 2.0 * np.pi + 1e-12):
        raise ValidationError("prior box must fit within one 2*pi period per axis")
    if not np.isfinite(record.gamma):
        raise ValidationError(f"gamma must be finite, got {record.gamma!r}")
    t1, t2 = _grid_axes(prior, resolution)
    logs, zero = _log_likelihood_grids(record.gamma, t1, t2)
    counts = record.counts().astype(float)
    loglik = counts @ logs
    if zero.any():
        impossible = (counts > 0) @ zero.astype(float) > 0.0
        if impossible.all():
            raise NumericalError(
                "record has vanishing likelihood everywhere on the prior support"
            )
    loglik -= loglik.max()
    weights = np.exp(loglik)
    total = weights.sum()
    if total <= 0.0:
        raise NumericalError("posterior vanished on the entire grid")
    cell_area = prior.volume / weights.size
    values = (weights / (total * cell_area)).reshape(resolution, resolution)
    return PosteriorGrid(box=prior, resolution=resolution, axes=(t1, t2), values=values)


def optimal_estimates(post: PosteriorGrid, funcs: LinearFunctionSet) -> np.ndarray:
    """Function estimates from the posterior mean of the phases."""
    _validate_two_param(funcs, "function set")
    return funcs.evaluate(post.mean())


def _draw_samples(
    gamma: float,
    prior: PriorBox,
    mu_arr: np.ndarray,
    mc_samples: int,
    seed: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-sample true phases and cumulative outcome counts at each checkpoint."""
    deltas = np.diff(np.concatenate(([0], mu_arr)))
    thetas = np.empty((mc_samples, 2))
    counts = np.zeros((mc_samples, mu_arr.size, 4), dtype=np.int64)
    lower, widths = prior.lower, prior.widths
    for s in range(mc_samples):
        rng = philox_stream(seed, s)
        thetas[s] = lower + rng.random(2) * widths
        probs = outcome_probabilities(thetas[s], gamma)
        probs = probs / probs.sum()
        running = np.zeros(4, dtype=np.int64)
        for m, dm in enumerate(deltas):
            if dm > 0:
                running = running + rng.multinomial(int(dm), probs)
            counts[s, m] = running
    return thetas, counts


def sweep_sample_errors(
    gamma: float,
    funcs: LinearFunctionSet,
    prior: PriorBox,
    mu_list: list[int],
    mc_samples: int,
    resolution: int = DEFAULT_RESOLUTION,
    seed: int = 0,
    workers: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-sample error statistics of the optimal estimator, two estimators at once.

    Returns ``(squared, posterior_var)``, both of shape
    (mc_samples, len(mu_list)).  ``squared`` holds the weighted squared error
    of the posterior-mean estimate against the sampled true phases;
    ``posterior_var`` holds the weighted posterior variance of the functions,
    whose mean over records equals the same Bayesian risk exactly but with
    far less Monte Carlo noise (the true-phase residual is integrated out
    analytically).  Sample s of every column extends one simulated experiment
    (record prefixes), so columns are smooth in mu and strategies sharing a
    seed can be compared pairwise.
    """
    _validate_two_param(funcs, "function set")
    _validate_two_param(prior, "prior box")
    if np.any(prior.widths > 2.0 * np.pi + 1e-12):
        raise ValidationError("prior box must fit within one 2*pi period per axis")
    if not np.isfinite(gamma):
        raise ValidationError(f"gamma must be finite, got {gamma!r}")
    mu_arr = np.asarray(mu_list, dtype=np.int64)
    if mu_arr.ndim != 1 or mu_arr.size == 0:
        raise ValidationError("mu_list must be a non-empty sequence")
    if np.any(mu_arr < 0):
        raise ValidationError("trial counts must be non-negative")
    if np.any(np.diff(mu_arr) <= 0):
        raise ValidationError("mu_list must be strictly ascending")
    if mc_samples < 1:
        raise ValidationError(f"mc_samples must be >= 1, got {mc_samples}")
    if workers < 1:
        raise ValidationError(f"workers must be >= 1, got {workers}")

    thetas, counts = _draw_samples(gamma, prior, mu_arr, mc_samples, seed)
    t1, t2 = _grid_axes(prior, resolution)
    logs, zero = _log_likelihood_grids(gamma, t1, t2)
    zero_any = bool(zero.any())
    zero_f = zero.astype(float)
    T1, T2 = np.meshgrid(t1, t2, indexing="ij")
    # center the quadrature nodes to avoid cancellation in second moments
    c1, c2 = prior.center
    t1_flat, t2_flat = (T1 - c1).ravel(), (T2 - c2).ravel()
    t1_sq, t2_sq, t12 = t1_flat**2, t2_flat**2, t1_flat * t2_flat
    quad = funcs.V @ np.diag(funcs.weights) @ funcs.V.T

    squared = np.empty((mc_samples, mu_arr.size))
    posterior_var = np.empty((mc_samples, mu_arr.size))

    def run_batch(lo: int, hi: int) -> None:
        centered_truth = thetas[lo:hi] - prior.center
        for m in range(mu_arr.size):
            c = counts[lo:hi, m, :].astype(float)
            loglik = c @ logs
            if zero_any:
                impossible = (c > 0) @ zero_f > 0.0
                if impossible.all(axis=1).any():
                    raise NumericalError(
                        "a simulated record has vanishing likelihood on the prior support"
                    )
            loglik -= loglik.max(axis=1, keepdims=True)
            w = np.exp(loglik)
            total = w.sum(axis=1)
            mean1 = (w @ t1_flat) / total
            mean2 = (w @ t2_flat) / total
            var1 = (w @ t1_sq) / total - mean1**2
            var2 = (w @ t2_sq) / total - mean2**2
            cov = (w @ t12) / total - mean1 * mean2
            delta = np.stack((mean1, mean2), axis=1) - centered_truth
            squared[lo:hi, m] = np.einsum("bi,ij,bj->b", delta, quad, delta)
            posterior_var[lo:hi, m] = (
                quad[0, 0] * var1 + 2.0 * quad[0, 1] * cov + quad[1, 1] * var2
            )

    bounds = [(lo, min(lo + _BATCH, mc_samples)) for lo in range(0, mc_samples, _BATCH)]
    if workers == 1:
        for lo, hi in bounds:
            run_batch(lo, hi)
    else:
        # deterministic: batches are fixed slices and write disjoint rows
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(run_batch, lo, hi) for lo, hi in bounds]
            for fut in futures:
                fut.result()
    return squared, posterior_var


def mse_sweep(
    gamma: float,
    funcs: LinearFunctionSet,
    prior: PriorBox,
    mu_list: list[int],
    mc_samples: int,
    resolution: int = DEFAULT_RESOLUTION,
    seed: int = 0,
    workers: int = 1,
    method: str = "posterior-variance",
) -> np.ndarray:
    """Per-sample Bayesian-risk contributions, shape (mc_samples, len(mu_list)).

    ``method`` selects the estimator: "squared-error" averages the weighted
    squared error of the posterior mean against the sampled true phases;
    "posterior-variance" averages the weighted posterior variance of the
    functions.  Both are unbiased for the same risk; the latter carries much
    less Monte Carlo noise and is the default.
    """
    squared, posterior_var = sweep_sample_errors(
        gamma, funcs, prior, mu_list, mc_samples,
        resolution=resolution, seed=seed, workers=workers,
    )
    if method == "squared-error":
        return squared
    if method == "posterior-variance":
        return posterior_var
    raise ValidationError(
        f"method must be 'squared-error' or 'posterior-variance', got {method!r}"
    )


def bayes_mse(
    gamma: float,
    funcs: LinearFunctionSet,
    prior: PriorBox,
    mu: int,
    mc_samples: int,
    resolution: int = DEFAULT_RESOLUTION,
    seed: int = 0,
    workers: int = 1,
    method: str = "posterior-variance",
) -> BayesMseResult:
    """Monte Carlo estimate of the mu-trial Bayesian mean square error."""
    errors = mse_sweep(
        gamma, funcs, prior, [int(mu)], mc_samples,
        resolution=resolution, seed=seed, workers=workers, method=method,
    )
    col = errors[:, 0]
    stderr = float(col.std(ddof=1) / np.sqrt(col.size)) if col.size > 1 else float("nan")
    return BayesMseResult(
        value=float(col.mean()),
        mc_stderr=stderr,
        mu=int(mu),
        mc_samples=int(mc_samples),
        resolution=int(resolution),
        seed=int(seed),
    )


def asymptotic_bound_base(gamma: float, funcs: LinearFunctionSet) -> float | None:
    """Single-trial asymptotic bound for the two-sensor probe, or None if singular."""
    fq = qfi_pure(make_gamma_state_2(gamma))
    if not fq.invertible:
        return None
    return crb_general(funcs, fq, 1)


def uncertainty_curve(
    gamma: float,
    funcs: LinearFunctionSet,
    prior: PriorBox,
    mu_list: list[int],
    mc_samples: int = DEFAULT_MC_SAMPLES,
    resolution: int = DEFAULT_RESOLUTION,
    seed: int = 0,
    workers: int = 1,
    threshold: float = DEFAULT_MU_TAU_THRESHOLD,
    method: str = "posterior-variance",
) -> UncertaintyCurve:
    """Mean square error per trial count alongside the asymptotic bound.

    The bound entries are absent when the information matrix of the probe is
    singular (maximally correlated probes); the curve itself is still
    computed, and the convergence threshold is evaluated when possible.
    """
    mu_arr = np.asarray(mu_list, dtype=np.int64)
    if mu_arr.size and mu_arr.min() < 1:
        raise ValidationError("curve trial counts must be >= 1")
    errors = mse_sweep(
        gamma, funcs, prior, mu_list, mc_samples,
        resolution=resolution, seed=seed, workers=workers, method=method,
    )
    mse = errors.mean(axis=0)
    stderr = errors.std(axis=0, ddof=1) / np.sqrt(errors.shape[0])
    base = asymptotic_bound_base(gamma, funcs)
    entries = tuple(
        CurvePoint(
            mu=int(mu_arr[m]),
            mse=float(mse[m]),
            mc_stderr=float(stderr[m]),
            crb=None if base is None else base / float(mu_arr[m]),
        )
        for m in range(mu_arr.size)
    )
    curve = UncertaintyCurve(
        entries=entries, mc_samples=int(mc_samples), seed=int(seed),
        mu_tau=None, threshold=float(threshold),
    )
    if base is not None:
        tau = mu_tau(curve, threshold)
        curve = UncertaintyCurve(
            entries=entries, mc_samples=int(mc_samples), seed=int(seed),
            mu_tau=tau, threshold=float(threshold),
        )
    return curve


def isotonic_increasing(y: np.ndarray) -> np.ndarray:
    """Pool-adjacent-violators fit of a non-decreasing sequence (unit weights)."""
    vals: list[float] = []
    sizes: list[int] = []
    for v in np.asarray(y, dtype=float):
        vals.append(float(v))
        sizes.append(1)
        while len(vals) > 1 and vals[-2] > vals[-1]:
            merged = (vals[-1] * sizes[-1] + vals[-2] * sizes[-2]) / (sizes[-1] + sizes[-2])
            size = sizes[-1] + sizes[-2]
            vals = vals[:-2] + [merged]
            sizes = sizes[:-2] + [size]
    return np.concatenate([np.full(c, v) for v, c in zip(vals, sizes)])


def isotonic_decreasing(y: np.ndarray) -> np.ndarray:
    """Pool-adjacent-violators fit of a non-increasing sequence (unit weights)."""
    return -isotonic_increasing(-np.asarray(y, dtype=float))


def smoothed_ratio(ratios: np.ndarray) -> np.ndarray:
    """Monotone regularization of a noisy error-to-bound ratio sequence.

    The ratio converges to one from one side; the fit direction (rising or
    falling) is chosen by residual, so prior-dominated curves that climb
    toward the bound and excess curves that decay onto it both smooth
    correctly.
    """
    ratios = np.asarray(ratios, dtype=float)
    up = isotonic_increasing(ratios)
    down = isotonic_decreasing(ratios)
    if np.sum((ratios - up) ** 2) <= np.sum((ratios - down) ** 2):
        return up
    return down


def mu_tau(curve: UncertaintyCurve, threshold: float = DEFAULT_MU_TAU_THRESHOLD) -> int | None:
    """Smallest listed trial count with sustained convergence onto the bound.

    Convergence means the smoothed error-to-bound ratio stays within
    ``threshold`` of one for this and every larger listed trial count; None
    when that never happens within the curve.
    """
    if any(p.crb is None for p in curve.entries):
        raise ValidationError("curve has entries without a finite asymptotic bound")
    ratios = np.array([p.mse / p.crb for p in curve.entries])
    ok = np.abs(smoothed_ratio(ratios) - 1.0) <= threshold
    sustained_from = None
    for i in range(ok.size - 1, -1, -1):
        if not ok[i]:
            break
        sustained_from = i
    if sustained_from is None:
        return None
    return int(curve.entries[sustained_from].mu)


def posterior_landscape(
    gamma: float,
    true_theta: tuple[float, float],
    mu: int,
    resolution: int,
    seed: int,
) -> PosteriorGrid:
    """Posterior over one full 2*pi period per axis, for ambiguity inspection."""
    record = simulate_record(gamma, true_theta, mu, seed)
    box = PriorBox(center=np.array([np.pi, np.pi]), widths=np.array([2.0 * np.pi] * 2))
    return posterior(record, box, resolution)


def find_peaks(grid: PosteriorGrid, rel_height: float = 0.5, wrap: bool = False) -> list[Peak]:
    """Local maxima at or above ``rel_height`` times the global maximum.

    A cell is a peak when no 8-neighbor exceeds it; with ``wrap`` the grid is
    treated as periodic, which matches the full-period landscape.
    """
    v = grid.values
    if wrap:
        is_peak = np.ones(v.shape, dtype=bool)
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                if di == 0 and dj == 0:
                    continue
                is_peak &= v >= np.roll(np.roll(v, di, axis=0), dj, axis=1)
    else:
        padded = np.pad(v, 1, constant_values=-np.inf)
        is_peak = np.ones(v.shape, dtype=bool)
        g0, g1 = v.shape
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                if di == 0 and dj == 0:
                    continue
                is_peak &= v >= padded[1 + di : 1 + di + g0, 1 + dj : 1 + dj + g1]
    is_peak &= v >= rel_height * v.max()
    return [
        Peak(
            i=int(i), j=int(j),
            theta1=float(grid.axes[0][i]), theta2=float(grid.axes[1][j]),
            value=float(v[i, j]),
        )
        for i, j in np.argwhere(is_peak)
    ]
