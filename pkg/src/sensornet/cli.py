"""Command-line front-end emitting CSV/JSON data for network sensing studies.

Every output embeds the fully resolved configuration (including the seed), so
re-running the embedded configuration reproduces the file byte for byte.
Exit codes: 0 success, 2 validation error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .bayes_engine import (
    PriorBox,
    find_peaks,
    posterior,
    posterior_landscape,
    simulate_record,
    uncertainty_curve,
)
from .crb_optimizer import crb_general, h_factor, j_opt
from .errors import NumericalError, ValidationError
from .fisher_info import povm_max_deviation, qfi_pure, qfi_sensor_symmetric
from .linear_functions import LinearFunctionSet, geometry_parameter
from .qubit_network import make_gamma_state_d

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

SEED_ENV_VAR = "SENSORNET_SEED"
_DEFAULT_MU_POINTS = 60
_DEFAULT_MU_MAX = 2000


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def _csv_text(config: dict, header: list[str], rows: list[list]) -> str:
    lines = ["# config: " + json.dumps(config, sort_keys=True)]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(cell) for cell in row))
    return "\n".join(lines) + "\n"


def _json_text(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _load_json_value(value, what: str) -> dict:
    """Accept an inline JSON object, a path to a JSON file, or a parsed dict."""
    if isinstance(value, dict):
        return value
    text = str(value).strip()
    if text.startswith("{"):
        return json.loads(text)
    with open(text, encoding="utf-8") as fh:
        return json.load(fh)


def _as_int_list(value) -> list[int]:
    if isinstance(value, (list, tuple)):
        return [int(v) for v in value]
    return [int(part) for part in str(value).split(",") if part.strip()]


def _as_float_pair(value) -> tuple[float, float]:
    if isinstance(value, (list, tuple)):
        parts = [float(v) for v in value]
    else:
        parts = [float(p) for p in str(value).split(",") if p.strip()]
    if len(parts) != 2:
        raise ValidationError(f"expected two comma-separated values, got {value!r}")
    return parts[0], parts[1]


def default_mu_grid(
    points: int = _DEFAULT_MU_POINTS, mu_max: int = _DEFAULT_MU_MAX
) -> list[int]:
    """Unique integer trial counts, logarithmically spaced from 1."""
    grid = np.unique(np.round(np.logspace(0.0, np.log10(mu_max), points)).astype(int))
    return [int(m) for m in grid if m >= 1]


def _resolve_seed(cfg: dict) -> int:
    if cfg.get("seed") is not None:
        return int(cfg["seed"])
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ValidationError(f"{SEED_ENV_VAR} must be an integer, got {env!r}") from exc
    return 0


def _need(cfg: dict, key: str):
    value = cfg.get(key)
    if value is None:
        raise ValidationError(f"missing required parameter '{key}'")
    return value


def _format_of(cfg: dict, default: str, allowed: tuple[str, ...]) -> str:
    fmt = cfg.get("format") or default
    if fmt not in allowed:
        raise ValidationError(
            f"format '{fmt}' is not supported for '{cfg['command']}' "
            f"(allowed: {', '.join(allowed)})"
        )
    return fmt


def _functions_of(cfg: dict) -> tuple[LinearFunctionSet, dict]:
    data = _load_json_value(_need(cfg, "functions"), "functions")
    funcs = LinearFunctionSet.from_dict(data)
    return funcs, funcs.to_dict()


def _prior_of(cfg: dict) -> tuple[PriorBox, dict]:
    data = _load_json_value(_need(cfg, "prior"), "prior")
    prior = PriorBox.from_dict(data)
    return prior, prior.to_dict()


def _info_matrix_of(cfg: dict, d_hint: int | None = None):
    """Information matrix from either a probe gamma or closed-form (v, J)."""
    gamma = cfg.get("gamma")
    v = cfg.get("v")
    J = cfg.get("J")
    if gamma is not None:
        d = int(cfg["d"]) if cfg.get("d") is not None else (d_hint or 2)
        info = qfi_pure(make_gamma_state_d(float(gamma), d))
        return info, {"gamma": float(gamma), "d": d}
    if v is not None and J is not None:
        d = int(cfg["d"]) if cfg.get("d") is not None else d_hint
        if d is None:
            raise ValidationError("closed-form information matrix needs --d")
        info = qfi_sensor_symmetric(float(v), float(J), d)
        return info, {"v": float(v), "J": float(J), "d": d}
    raise ValidationError("provide either --gamma or both --v and --J")


def cmd_qfi(cfg: dict) -> tuple[str, int]:
    info, source = _info_matrix_of(cfg)
    _format_of(cfg, "json", ("json",))
    resolved = {"command": "qfi", **source}
    payload = {
        "config": resolved,
        "kind": info.kind,
        "matrix": info.matrix.tolist(),
        "eigenvalues": info.eigenvalues.tolist(),
        "invertible": bool(info.invertible),
    }
    status = EXIT_OK
    if not info.invertible:
        print(
            f"non-invertible: min eigenvalue {info.min_eigenvalue:.17g}",
            file=sys.stderr,
        )
        status = EXIT_NUMERICAL
    return _json_text(payload), status


def cmd_geometry(cfg: dict) -> tuple[str, int]:
    funcs, funcs_dict = _functions_of(cfg)
    _format_of(cfg, "json", ("json",))
    report = geometry_parameter(funcs)
    payload = {
        "config": {"command": "geometry", "functions": funcs_dict},
        "normalization": report.normalization,
        "geometry": report.geometry,
        "per_function_angles": list(report.per_function_angles),
    }
    return _json_text(payload), EXIT_OK


def cmd_crb(cfg: dict) -> tuple[str, int]:
    funcs, funcs_dict = _functions_of(cfg)
    _format_of(cfg, "json", ("json",))
    mu = int(cfg.get("mu") or 1)
    info, source = _info_matrix_of(cfg, d_hint=funcs.num_params)
    value = crb_general(funcs, info, mu)
    payload = {
        "config": {"command": "crb", "functions": funcs_dict, "mu": mu, **source},
        "crb": value,
        "mu": mu,
    }
    return _json_text(payload), EXIT_OK


def cmd_jopt_sweep(cfg: dict) -> tuple[str, int]:
    d_list = _as_int_list(cfg.get("d") or "2,3,5,10")
    g_min = float(cfg.get("g_min") if cfg.get("g_min") is not None else -0.99)
    g_max = float(cfg.get("g_max") if cfg.get("g_max") is not None else 0.99)
    steps = int(cfg.get("steps") or 100)
    if steps < 2:
        raise ValidationError(f"steps must be >= 2, got {steps}")
    if not g_min < g_max:
        raise ValidationError(f"need g_min < g_max, got {g_min} >= {g_max}")
    for d in d_list:
        if g_min <= -1.0 or g_max >= d - 1.0:
            raise ValidationError(
                f"geometry range must stay inside (-1, {d - 1}) for d={d}"
            )
    resolved = {
        "command": "jopt-sweep", "d": d_list,
        "g_min": g_min, "g_max": g_max, "steps": steps,
    }
    grid = np.linspace(g_min, g_max, steps)
    rows = [[d, float(G), j_opt(float(G), d)] for d in d_list for G in grid]
    fmt = _format_of(cfg, "csv", ("csv", "json"))
    if fmt == "csv":
        return _csv_text(resolved, ["d", "G", "j_opt"], rows), EXIT_OK
    payload = {
        "config": resolved,
        "entries": [{"d": r[0], "G": r[1], "j_opt": r[2]} for r in rows],
    }
    return _json_text(payload), EXIT_OK


def cmd_hmap(cfg: dict) -> tuple[str, int]:
    d = int(cfg.get("d") or 2)
    j_floor = 1.0 / (1.0 - d)
    g_min = float(cfg.get("g_min") if cfg.get("g_min") is not None else -0.99)
    g_max = float(cfg.get("g_max") if cfg.get("g_max") is not None else min(0.99, d - 1.01))
    j_min = float(cfg.get("j_min") if cfg.get("j_min") is not None else j_floor + 0.01)
    j_max = float(cfg.get("j_max") if cfg.get("j_max") is not None else 0.99)
    steps = int(cfg.get("steps") or 50)
    if steps < 2:
        raise ValidationError(f"steps must be >= 2, got {steps}")
    if not (-1.0 <= g_min < g_max <= d - 1.0):
        raise ValidationError(f"geometry range must stay inside [-1, {d - 1}]")
    if not (j_floor < j_min < j_max < 1.0):
        raise ValidationError(f"correlation range must stay inside ({j_floor}, 1)")
    resolved = {
        "command": "hmap", "d": d, "g_min": g_min, "g_max": g_max,
        "j_min": j_min, "j_max": j_max, "steps": steps,
    }
    g_grid = np.linspace(g_min, g_max, steps)
    j_grid = np.linspace(j_min, j_max, steps)
    rows = [
        [float(G), float(J), h_factor(float(J), float(G), d)]
        for G in g_grid
        for J in j_grid
    ]
    fmt = _format_of(cfg, "csv", ("csv", "json"))
    if fmt == "csv":
        return _csv_text(resolved, ["G", "J", "h"], rows), EXIT_OK
    payload = {
        "config": resolved,
        "entries": [{"G": r[0], "J": r[1], "h": r[2]} for r in rows],
    }
    return _json_text(payload), EXIT_OK


def _curve_of(cfg: dict) -> tuple:
    gamma = float(_need(cfg, "gamma"))
    funcs, funcs_dict = _functions_of(cfg)
    prior, prior_dict = _prior_of(cfg)
    mu_list = _as_int_list(cfg["mu_list"]) if cfg.get("mu_list") is not None else default_mu_grid()
    mc_samples = int(cfg.get("mc_samples") or 2000)
    resolution = int(cfg.get("resolution") or 200)
    seed = _resolve_seed(cfg)
    workers = int(cfg.get("workers") or 1)
    threshold = float(cfg.get("threshold") if cfg.get("threshold") is not None else 0.05)
    curve = uncertainty_curve(
        gamma, funcs, prior, mu_list,
        mc_samples=mc_samples, resolution=resolution, seed=seed,
        workers=workers, threshold=threshold,
    )
    resolved = {
        "gamma": gamma, "functions": funcs_dict, "prior": prior_dict,
        "mu_list": mu_list, "mc_samples": mc_samples, "resolution": resolution,
        "seed": seed, "workers": workers, "threshold": threshold,
    }
    return curve, resolved


def cmd_mse_curve(cfg: dict) -> tuple[str, int]:
    curve, resolved = _curve_of(cfg)
    resolved = {"command": "mse-curve", **resolved}
    fmt = _format_of(cfg, "csv", ("csv", "json"))
    if fmt == "csv":
        rows = [[p.mu, p.mse, p.mc_stderr, p.crb, p.ratio] for p in curve.entries]
        return _csv_text(resolved, ["mu", "mse", "mc_stderr", "crb", "ratio"], rows), EXIT_OK
    payload = {
        "config": resolved,
        "entries": [
            {"mu": p.mu, "mse": p.mse, "mc_stderr": p.mc_stderr,
             "crb": p.crb, "ratio": p.ratio}
            for p in curve.entries
        ],
        "mu_tau": curve.mu_tau,
        "seed": curve.seed,
    }
    return _json_text(payload), EXIT_OK


def cmd_mu_tau(cfg: dict) -> tuple[str, int]:
    curve, resolved = _curve_of(cfg)
    resolved = {"command": "mu-tau", **resolved}
    _format_of(cfg, "json", ("json",))
    payload = {
        "config": resolved,
        "mu_tau": curve.mu_tau,
        "threshold": curve.threshold,
        "seed": curve.seed,
    }
    if any(p.crb is None for p in curve.entries):
        payload["note"] = "no asymptotic limit: the probe information matrix is singular"
    elif curve.mu_tau is None:
        payload["note"] = "threshold not attained within the listed trial counts"
    return _json_text(payload), EXIT_OK


def cmd_posterior_map(cfg: dict) -> tuple[str, int]:
    gamma = float(_need(cfg, "gamma"))
    true_theta = _as_float_pair(_need(cfg, "true_theta"))
    mu = int(cfg.get("mu") if cfg.get("mu") is not None else 100)
    resolution = int(cfg.get("resolution") or 200)
    seed = _resolve_seed(cfg)
    resolved = {
        "command": "posterior-map", "gamma": gamma,
        "true_theta": list(true_theta), "mu": mu,
        "resolution": resolution, "seed": seed,
    }
    if cfg.get("prior") is not None:
        prior, prior_dict = _prior_of(cfg)
        record = simulate_record(gamma, true_theta, mu, seed)
        grid = posterior(record, prior, resolution)
        resolved["prior"] = prior_dict
        wrap = False
    else:
        grid = posterior_landscape(gamma, true_theta, mu, resolution, seed)
        wrap = True
    peaks = find_peaks(grid, rel_height=0.5, wrap=wrap)
    fmt = _format_of(cfg, "csv", ("csv", "json"))
    if fmt == "csv":
        lines = ["# config: " + json.dumps(resolved, sort_keys=True)]
        lines.append(f"# peak_count: {len(peaks)}")
        header = ["theta1\\theta2"] + [_fmt(t) for t in grid.axes[1]]
        lines.append(",".join(header))
        for i, t1 in enumerate(grid.axes[0]):
            lines.append(",".join([_fmt(t1)] + [_fmt(v) for v in grid.values[i]]))
        return "\n".join(lines) + "\n", EXIT_OK
    payload = {
        "config": resolved,
        "axes": {"theta1": grid.axes[0].tolist(), "theta2": grid.axes[1].tolist()},
        "values": grid.values.tolist(),
        "peak_count": len(peaks),
        "peaks": [
            {"theta1": p.theta1, "theta2": p.theta2, "value": p.value} for p in peaks
        ],
    }
    return _json_text(payload), EXIT_OK


def cmd_verify_povm(cfg: dict) -> tuple[str, int]:
    gamma = float(_need(cfg, "gamma"))
    grid_n = int(cfg.get("grid_n") or 10)
    theta_min = float(cfg.get("theta_min") if cfg.get("theta_min") is not None else 0.0)
    theta_max = float(cfg.get("theta_max") if cfg.get("theta_max") is not None else np.pi / 2)
    tol = float(cfg.get("tol") if cfg.get("tol") is not None else 1e-9)
    _format_of(cfg, "json", ("json",))
    axis = np.linspace(theta_min, theta_max, grid_n)
    grid = [(float(a), float(b)) for a in axis for b in axis]
    deviation = povm_max_deviation(gamma, grid)
    optimal = deviation <= tol
    payload = {
        "config": {
            "command": "verify-povm", "gamma": gamma, "grid_n": grid_n,
            "theta_min": theta_min, "theta_max": theta_max, "tol": tol,
        },
        "optimal": bool(optimal),
        "max_deviation": deviation,
    }
    if not optimal:
        print(
            f"measurement is not asymptotically optimal: deviation {deviation:.3e} > {tol:.3e}",
            file=sys.stderr,
        )
    return _json_text(payload), EXIT_OK if optimal else EXIT_NUMERICAL


_HANDLERS = {
    "qfi": cmd_qfi,
    "crb": cmd_crb,
    "geometry": cmd_geometry,
    "jopt-sweep": cmd_jopt_sweep,
    "hmap": cmd_hmap,
    "mse-curve": cmd_mse_curve,
    "mu-tau": cmd_mu_tau,
    "posterior-map": cmd_posterior_map,
    "verify-povm": cmd_verify_povm,
}


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON file with defaults; CLI flags override")
    sub.add_argument("--out", help="output path (default: stdout)")
    sub.add_argument("--format", choices=("csv", "json"), help="output format")
    sub.add_argument("--seed", type=int, help=f"RNG seed (fallback: ${SEED_ENV_VAR}, then 0)")
    sub.add_argument("--workers", type=int, help="cap on parallel tasks (results unchanged)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sensornet",
        description="Asymptotic bounds and Bayesian errors for qubit sensing networks.",
    )
    subs = parser.add_subparsers(dest="command")

    p = subs.add_parser("qfi", help="quantum Fisher information matrix")
    p.add_argument("--gamma", type=float)
    p.add_argument("--d", type=int)
    p.add_argument("--v", type=float)
    p.add_argument("--J", type=float)
    _add_common(p)

    p = subs.add_parser("crb", help="asymptotic bound for a function set")
    p.add_argument("--functions")
    p.add_argument("--gamma", type=float)
    p.add_argument("--d", type=int)
    p.add_argument("--v", type=float)
    p.add_argument("--J", type=float)
    p.add_argument("--mu", type=int)
    _add_common(p)

    p = subs.add_parser("geometry", help="normalization and geometry of a function set")
    p.add_argument("--functions")
    _add_common(p)

    p = subs.add_parser("jopt-sweep", help="optimal correlation strength versus geometry")
    p.add_argument("--d", help="comma-separated sensor counts (default 2,3,5,10)")
    p.add_argument("--g-min", type=float, dest="g_min")
    p.add_argument("--g-max", type=float, dest="g_max")
    p.add_argument("--steps", type=int)
    _add_common(p)

    p = subs.add_parser("hmap", help="correlation-geometry factor on a grid")
    p.add_argument("--d", type=int)
    p.add_argument("--g-min", type=float, dest="g_min")
    p.add_argument("--g-max", type=float, dest="g_max")
    p.add_argument("--j-min", type=float, dest="j_min")
    p.add_argument("--j-max", type=float, dest="j_max")
    p.add_argument("--steps", type=int)
    _add_common(p)

    p = subs.add_parser("mse-curve", help="Bayesian mean square error versus trials")
    p.add_argument("--gamma", type=float)
    p.add_argument("--functions")
    p.add_argument("--prior")
    p.add_argument("--mu-list", dest="mu_list")
    p.add_argument("--mc-samples", type=int, dest="mc_samples")
    p.add_argument("--resolution", type=int)
    p.add_argument("--threshold", type=float)
    _add_common(p)

    p = subs.add_parser("mu-tau", help="trials needed to approach the asymptotic bound")
    p.add_argument("--gamma", type=float)
    p.add_argument("--functions")
    p.add_argument("--prior")
    p.add_argument("--mu-list", dest="mu_list")
    p.add_argument("--mc-samples", type=int, dest="mc_samples")
    p.add_argument("--resolution", type=int)
    p.add_argument("--threshold", type=float)
    _add_common(p)

    p = subs.add_parser("posterior-map", help="posterior density over phases")
    p.add_argument("--gamma", type=float)
    p.add_argument("--true-theta", dest="true_theta", help="simulated values, e.g. '1,2'")
    p.add_argument("--mu", type=int)
    p.add_argument("--resolution", type=int)
    p.add_argument("--prior", help="restrict to a prior box instead of the full period")
    _add_common(p)

    p = subs.add_parser("verify-povm", help="check the measurement saturates the bound")
    p.add_argument("--gamma", type=float)
    p.add_argument("--grid-n", type=int, dest="grid_n")
    p.add_argument("--theta-min", type=float, dest="theta_min")
    p.add_argument("--theta-max", type=float, dest="theta_max")
    p.add_argument("--tol", type=float)
    _add_common(p)

    return parser


def _merge_config(args: argparse.Namespace) -> dict:
    """Config-file values fill in flags the user did not pass."""
    merged = {k: v for k, v in vars(args).items() if v is not None}
    config_path = merged.pop("config", None)
    if config_path is not None:
        with open(config_path, encoding="utf-8") as fh:
            file_cfg = json.load(fh)
        if not isinstance(file_cfg, dict):
            raise ValidationError("config file must contain a JSON object")
        for key, value in file_cfg.items():
            merged.setdefault(key, value)
    return merged


def _write(out_path: str | None, text: str) -> None:
    if out_path is None or out_path == "-":
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_VALIDATION
    try:
        cfg = _merge_config(args)
        text, status = _HANDLERS[args.command](cfg)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON ({exc})", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    _write(cfg.get("out"), text)
    return status


if __name__ == "__main__":
    sys.exit(main())
