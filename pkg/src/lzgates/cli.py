"""Command-line front end.

Each subcommand reads one JSON config (file path or ``-`` for standard
input), runs the corresponding library routine, and writes a delimited
artifact with fixed 17-significant-digit float formatting so identical
configs produce byte-identical output.  ``--plot`` additionally renders a
PNG figure next to the output file.

Exit codes: 0 success, 1 failed verification check or non-converging
design, 2 config or validation error, 3 I/O error.
"""

import argparse
import json
import math
import os
import sys

import numpy as np

from .analytic import (
    LinearSweepPulse,
    rotation_angles,
    rotation_decomposition,
    scattering_matrix,
)
from .composite import compose, design_composite, quantize_working_pulse
from .core import log_gamma_imag, rx, rz, spectral_norm
from .error import (
    composite_error_analytic,
    error_sweep,
    gate_error,
    uncorrected_error_analytic,
)
from .propagator import ConvergenceError, DetuningProfile, crossing_trace, evolve, to_adiabatic

_UNITS_COMMENT = (
    "# units: working-pulse sweep rate = 1"
    " (frequencies in sqrt(rate), times in 1/sqrt(rate))"
)

_COLUMNS = {
    "crossing": ("g", "basis", "t_scaled", "occupation", "flag_near_crossing"),
    "angles": ("g", "alpha", "phi"),
    "sweep": ("g", "eps_over_gamma", "error_single", "error_composite", "mode"),
}

_VERIFY_THRESHOLDS = {
    "dual_construction": 1e-12,
    "analytic_vs_numeric": 1e-2,
    "metric_formula": 1e-10,
    "gamma_identity": 1e-10,
}

_GAMMA_CHECK_COUPLINGS = (0.3, 1.0, 3.0)


class ConfigError(ValueError):
    """Raised for malformed or physically invalid configuration."""


# ---------------------------------------------------------------- config

def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        if path == "-":
            document = json.load(sys.stdin)
        else:
            with open(path, encoding="utf-8") as handle:
                document = json.load(handle)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise ConfigError("config must be a JSON object")
    return document


def _as_float(value, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    result = float(value)
    if not math.isfinite(result):
        raise ConfigError(f"{key} must be finite, got {value!r}")
    return result


def _as_positive_float(value, key: str) -> float:
    result = _as_float(value, key)
    if result <= 0.0:
        raise ConfigError(f"{key} must be positive, got {value!r}")
    return result


def _as_int(value, key: str, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{key} must be an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(f"{key} must be at least {minimum}, got {value}")
    return value


def _as_float_list(value, key: str) -> list[float]:
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{key} must be a non-empty list of numbers")
    return [_as_float(item, key) for item in value]


def _as_choice(value, key: str, choices: tuple[str, ...]) -> str:
    if value not in choices:
        raise ConfigError(f"{key} must be one of {choices}, got {value!r}")
    return value


def _check_keys(config: dict, command: str, allowed: tuple[str, ...]) -> None:
    known = set(allowed) | {"command"}
    unknown = sorted(set(config) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    stated = config.get("command")
    if stated is not None and stated != command:
        raise ConfigError(f"config is for command {stated!r}, not {command!r}")


def _resolve_ratios(value) -> list[float]:
    if value is None:
        value = {"min": 1e-3, "max": 1.0, "points": 60}
    if isinstance(value, list):
        ratios = _as_float_list(value, "eps_ratios")
        if any(r <= 0.0 for r in ratios):
            raise ConfigError("eps_ratios must be positive")
        return ratios
    if isinstance(value, dict):
        unknown = sorted(set(value) - {"min", "max", "points"})
        if unknown:
            raise ConfigError(f"unknown eps_ratios keys: {', '.join(unknown)}")
        lo = _as_positive_float(value.get("min", 1e-3), "eps_ratios.min")
        hi = _as_positive_float(value.get("max", 1.0), "eps_ratios.max")
        points = _as_int(value.get("points", 60), "eps_ratios.points", 2)
        if lo >= hi:
            raise ConfigError("eps_ratios.min must be below eps_ratios.max")
        return [float(r) for r in np.logspace(math.log10(lo), math.log10(hi), points)]
    raise ConfigError("eps_ratios must be a list or a {min, max, points} object")


# ---------------------------------------------------------------- output

def _format_cell(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _render_csv(columns: tuple[str, ...], rows: list[dict]) -> str:
    lines = [_UNITS_COMMENT, ",".join(columns)]
    for row in rows:
        lines.append(",".join(_format_cell(row[c]) for c in columns))
    return "\n".join(lines) + "\n"


def _render_json(columns: tuple[str, ...], rows: list[dict]) -> str:
    document = {
        "units": _UNITS_COMMENT.lstrip("# "),
        "columns": list(columns),
        "rows": [[row[c] for c in columns] for row in rows],
    }
    return json.dumps(document, indent=2) + "\n"


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)


def _emit(args, command: str, rows: list[dict]) -> None:
    columns = _COLUMNS[command]
    text = _render_csv(columns, rows) if args.format == "csv" else _render_json(columns, rows)
    _write_text(args.out, text)
    if args.plot:
        from . import plotting

        figure_path = os.path.splitext(args.out)[0] + ".png"
        save = getattr(plotting, f"save_{command}_figure")
        save(rows, figure_path)


def _require_out_for_plot(args) -> None:
    if args.plot and args.out is None:
        raise ConfigError("--plot requires --out (the figure is saved next to it)")


# ------------------------------------------------------------- commands

def _cmd_crossing(args) -> int:
    config = _load_config(args.config)
    _check_keys(config, "crossing", ("g", "t_range", "samples", "tol"))
    couplings = _as_float_list(config.get("g", [1.0, 0.47, 0.33, 0.21]), "g")
    t_range = _as_float_list(config.get("t_range", [-10.0, 10.0]), "t_range")
    if len(t_range) != 2 or t_range[0] >= t_range[1]:
        raise ConfigError("t_range must be [start, end] with start < end")
    samples = _as_int(config.get("samples", 400), "samples", 2)
    tol = _as_positive_float(config.get("tol", 1e-8), "tol")
    _require_out_for_plot(args)

    rows = []
    for g in couplings:
        pulse = LinearSweepPulse(
            coupling=g,
            sweep_rate=1.0,
            detuning_start=-t_range[0],
            detuning_end=-t_range[1],
        )
        scale = math.sqrt(pulse.sweep_rate)
        for basis in ("adiabatic", "computational"):
            trace = crossing_trace(pulse, basis=basis, n_samples=samples, tol=tol)
            for t, occupation, near in zip(
                trace.times, trace.occupations, trace.near_crossing
            ):
                rows.append(
                    {
                        "g": g,
                        "basis": basis,
                        "t_scaled": float(t) * scale,
                        "occupation": float(occupation),
                        "flag_near_crossing": int(near),
                    }
                )
    _emit(args, "crossing", rows)
    return 0


def _cmd_angles(args) -> int:
    config = _load_config(args.config)
    _check_keys(config, "angles", ("g_min", "g_max", "samples"))
    g_min = _as_positive_float(config.get("g_min", 0.05), "g_min")
    g_max = _as_positive_float(config.get("g_max", 3.0), "g_max")
    if g_min >= g_max:
        raise ConfigError("g_min must be below g_max")
    samples = _as_int(config.get("samples", 120), "samples", 2)
    _require_out_for_plot(args)

    rows = []
    for g in np.linspace(g_min, g_max, samples):
        angle, azimuth = rotation_angles(float(g))
        rows.append({"g": float(g), "alpha": angle, "phi": azimuth})
    _emit(args, "angles", rows)
    return 0


def _design_record(g: float, seq) -> dict:
    working = seq.working
    trailing = seq.trailing
    return {
        "g": g,
        "delta_star": working.detuning_start,
        "rotation_angle": seq.rotation_angle,
        "pi_coupling": trailing.pulse.coupling,
        "pi_sweep_rate": trailing.pulse.sweep_rate,
        "pi_near": trailing.near_magnitude,
        "pi_far": trailing.far_magnitude,
        "first_order_residuals": list(seq.first_order_residuals),
        "second_order_residuals": list(seq.second_order_residuals),
        "quantization_residuals": list(seq.quantization_residuals),
    }


def _cmd_sweep(args) -> int:
    config = _load_config(args.config)
    _check_keys(
        config,
        "sweep",
        ("g", "g_pi", "delta_target", "eps_ratios", "mode", "compensation", "tol", "designs"),
    )
    couplings = _as_float_list(config.get("g", [2.0, 1.2, 1.0, 0.3]), "g")
    g_pi = _as_positive_float(config.get("g_pi", 3.0), "g_pi")
    delta_target = _as_positive_float(config.get("delta_target", 10.0), "delta_target")
    ratios = _resolve_ratios(config.get("eps_ratios"))
    mode = _as_choice(config.get("mode", "exact"), "mode", ("exact", "perturbative", "numeric"))
    compensation = _as_choice(
        config.get("compensation", "exact"), "compensation", ("exact", "simplified")
    )
    tol = _as_positive_float(config.get("tol", 1e-6), "tol")
    # the "designs" block of a previous run's sidecar is accepted and ignored
    # so the sidecar itself is a valid config.
    _require_out_for_plot(args)

    rows = []
    designs = []
    for g in couplings:
        working = quantize_working_pulse(g, delta_target)
        designs.append(
            _design_record(g, design_composite(working, g_pi, compensation=compensation))
        )
        for record in error_sweep(
            g,
            delta_target,
            g_pi,
            offset_ratios=tuple(ratios),
            mode=mode,
            compensation=compensation,
            tol=tol,
        ):
            rows.append(
                {
                    "g": g,
                    "eps_over_gamma": record.offset_ratio,
                    "error_single": record.error_single,
                    "error_composite": record.error_composite,
                    "mode": record.mode,
                }
            )
    _emit(args, "sweep", rows)
    if args.out is not None:
        sidecar = {
            "command": "sweep",
            "g": couplings,
            "g_pi": g_pi,
            "delta_target": delta_target,
            "eps_ratios": ratios,
            "mode": mode,
            "compensation": compensation,
            "tol": tol,
            "designs": designs,
        }
        sidecar_path = os.path.splitext(args.out)[0] + ".design.json"
        _write_text(sidecar_path, json.dumps(sidecar, indent=2) + "\n")
    return 0


def _random_pulse(rng: np.random.Generator) -> LinearSweepPulse:
    g = float(rng.uniform(0.05, 2.5))
    rate = float(np.exp(rng.uniform(math.log(0.25), math.log(4.0))))
    coupling = g * math.sqrt(rate)
    threshold = 5.0 * max(coupling, math.sqrt(rate))
    start = threshold * float(rng.uniform(1.0, 6.0))
    end = threshold * float(rng.uniform(1.0, 6.0))
    if rng.uniform() < 0.5:
        return LinearSweepPulse(coupling, rate, start, -end)
    return LinearSweepPulse(coupling, -rate, -start, end)


def _check_dual_construction(samples: int, rng: np.random.Generator) -> float:
    worst = 0.0
    for _ in range(samples):
        pulse = _random_pulse(rng)
        diff = scattering_matrix(pulse) - rotation_decomposition(pulse).matrix()
        worst = max(worst, float(np.max(np.abs(diff))))
    return worst


def _check_analytic_vs_numeric() -> float:
    pulse = LinearSweepPulse(
        coupling=1.0, sweep_rate=1.0, detuning_start=10.0, detuning_end=-10.0
    )
    u = evolve(DetuningProfile.from_pulse(pulse), tol=1e-8)
    numeric = to_adiabatic(u, pulse.detuning_start, pulse.detuning_end, pulse.coupling)
    return float(np.max(np.abs(numeric - scattering_matrix(pulse))))


def _check_metric_formula(rng: np.random.Generator) -> float:
    worst = 0.0
    for _ in range(30):
        shift_start, shift_end = rng.uniform(-2.0, 2.0, 2)
        angle = float(rng.uniform(0.1, math.pi))
        shifted = rz(2.0 * shift_end) @ rx(angle) @ rz(-2.0 * shift_start)
        worst = max(
            worst,
            abs(
                uncorrected_error_analytic(shift_start, shift_end, angle)
                - spectral_norm(shifted - rx(angle))
            ),
        )
    working = quantize_working_pulse(1.0, 10.0)
    seq = design_composite(working)
    for ratio in (1e-3, 1e-2, 1e-1, 1.0):
        offset = ratio * working.coupling
        matrix_level = gate_error(
            compose(seq, offset, "perturbative"), rx(seq.rotation_angle), negate=True
        )
        formula = composite_error_analytic(seq, offset, method="perturbative")
        worst = max(worst, abs(formula - matrix_level))
    return worst


def _gamma_identity_deviation(g: float) -> float:
    g2 = g * g
    measured = math.exp(2.0 * log_gamma_imag(g2).real)
    expected = math.pi / (g2 * math.sinh(math.pi * g2))
    return abs(measured - expected) / expected


def _cmd_verify(args) -> int:
    config = _load_config(args.config)
    _check_keys(config, "verify", ("samples", "seed", "tolerances"))
    samples = _as_int(config.get("samples", 200), "samples", 1)
    seed = _as_int(config.get("seed", 20260818), "seed", 0)
    thresholds = dict(_VERIFY_THRESHOLDS)
    overrides = config.get("tolerances", {})
    if not isinstance(overrides, dict):
        raise ConfigError("tolerances must be an object")
    unknown = sorted(set(overrides) - set(thresholds))
    if unknown:
        raise ConfigError(f"unknown tolerance keys: {', '.join(unknown)}")
    for key, value in overrides.items():
        thresholds[key] = _as_positive_float(value, f"tolerances.{key}")
    if args.format == "csv":
        raise ConfigError("verify reports are JSON only")
    if args.plot:
        raise ConfigError("verify produces no figures")

    rng = np.random.default_rng(seed)
    checks = [
        ("dual_construction", _check_dual_construction(samples, rng), "dual_construction"),
        ("analytic_vs_numeric", _check_analytic_vs_numeric(), "analytic_vs_numeric"),
        ("metric_formula", _check_metric_formula(rng), "metric_formula"),
    ]
    for g in _GAMMA_CHECK_COUPLINGS:
        checks.append(
            (f"gamma_identity[g={g:g}]", _gamma_identity_deviation(g), "gamma_identity")
        )

    report_checks = []
    for name, measured, threshold_key in checks:
        threshold = thresholds[threshold_key]
        report_checks.append(
            {
                "name": name,
                "measured": measured,
                "threshold": threshold,
                "passed": bool(measured <= threshold),
            }
        )
    passed = all(c["passed"] for c in report_checks)
    report = {
        "command": "verify",
        "seed": seed,
        "samples": samples,
        "passed": passed,
        "checks": report_checks,
    }
    _write_text(args.out, json.dumps(report, indent=2) + "\n")
    return 0 if passed else 1


# --------------------------------------------------------------- driver

_COMMANDS = {
    "crossing": _cmd_crossing,
    "angles": _cmd_angles,
    "sweep": _cmd_sweep,
    "verify": _cmd_verify,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lzgate",
        description="Design, simulate, and verify composite Landau-Zener gates.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    helps = {
        "crossing": "occupation traces through the avoided crossing",
        "angles": "rotation angle and axis azimuth versus coupling",
        "sweep": "single and composite gate errors over detuning offsets",
        "verify": "cross-pipeline consistency checks",
    }
    for name, text in helps.items():
        sub = subparsers.add_parser(name, help=text)
        sub.add_argument("--config", help="JSON config path, or - for stdin")
        sub.add_argument("--out", help="output path (default: stdout)")
        sub.add_argument(
            "--format",
            choices=("csv", "json"),
            default="json" if name == "verify" else "csv",
        )
        sub.add_argument(
            "--plot",
            action="store_true",
            help="also render a PNG figure next to --out",
        )
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"lzgate: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"lzgate: invalid parameters: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, RuntimeError) as exc:
        print(f"lzgate: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"lzgate: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
