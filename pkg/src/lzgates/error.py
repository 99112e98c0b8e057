"""Gate error metrics and detuning-offset sweeps.

Errors are measured as the spectral norm of the difference from the ideal
gate.  For a quantized sweep the only effect of a constant detuning offset
is a pair of endpoint phase shifts, so the metric also has a closed form in
those two shifts; both routes are provided and tested against each other.
"""

import math
from dataclasses import dataclass

import numpy as np

from .analytic import LinearSweepPulse, rx, scattering_matrix
from .composite import (
    CompositeSequence,
    _perturbed_matrix,
    compose,
    corrected_phase_error,
    design_composite,
    quantize_working_pulse,
)
from .core import check_unitary, spectral_norm
from .propagator import DetuningProfile, evolve, to_adiabatic

_GATE_UNITARITY_TOL = 1e-9
_SWEEP_MODES = ("exact", "perturbative", "numeric")

DEFAULT_OFFSET_RATIOS = tuple(np.logspace(-3.0, 0.0, 60))
DEFAULT_SLOPE_WINDOW = (1e-2, 1e-1)


def gate_error(matrix: np.ndarray, ideal: np.ndarray, negate: bool = False) -> float:
    """Spectral-norm distance from the ideal gate.

    Both matrices must be unitary to 1e-9; pass negate=True when the
    realized gate carries a known overall minus sign (as the composite
    sequence does relative to its working rotation).
    """
    check_unitary(matrix, tol=_GATE_UNITARITY_TOL)
    check_unitary(ideal, tol=_GATE_UNITARITY_TOL)
    realized = -matrix if negate else matrix
    return spectral_norm(realized - ideal)


def uncorrected_error_analytic(
    shift_start: float, shift_end: float, angle: float
) -> float:
    """Error of a quantized sweep whose endpoint phases moved by the given
    shifts, against the unshifted rotation by `angle`.

    Closed form: 2 sqrt(cos^2(angle/2) sin^2((shift_end - shift_start)/2)
    + sin^2(angle/2) sin^2((shift_end + shift_start)/2)), written this way
    to stay accurate when the shifts are tiny.  The same expression gives
    the composite-sequence error when fed the corrected phase errors.
    """
    half_diff = 0.5 * (shift_end - shift_start)
    half_sum = 0.5 * (shift_end + shift_start)
    half_angle = 0.5 * angle
    value = (math.cos(half_angle) * math.sin(half_diff)) ** 2 + (
        math.sin(half_angle) * math.sin(half_sum)
    ) ** 2
    return 2.0 * math.sqrt(max(value, 0.0))


def composite_error_analytic(
    seq: CompositeSequence, offset: float, method: str = "exact"
) -> float:
    """Composite-sequence error from the corrected endpoint phase errors,
    bypassing matrix arithmetic entirely.  Exact up to the bracketing
    pulses' leakage scale.  method selects how the phase errors are
    evaluated and must match the compose mode when cross-checking."""
    return uncorrected_error_analytic(
        corrected_phase_error(seq, "start", offset, method=method),
        corrected_phase_error(seq, "end", offset, method=method),
        seq.rotation_angle,
    )


def _single_pulse_matrix(
    pulse: LinearSweepPulse, offset: float, mode: str, tol: float
) -> np.ndarray:
    if mode == "exact":
        return scattering_matrix(pulse, offset)
    if mode == "perturbative":
        return _perturbed_matrix(pulse, offset)
    profile = DetuningProfile.from_pulse(pulse).shifted(offset)
    u = evolve(profile, tol=tol)
    return to_adiabatic(
        u,
        pulse.detuning_start + offset,
        pulse.detuning_end + offset,
        pulse.coupling,
    )


@dataclass(frozen=True)
class ErrorSweepRow:
    offset: float
    offset_ratio: float
    error_single: float
    error_composite: float
    mode: str


def error_sweep(
    adiabaticity: float,
    detuning_target: float,
    pi_adiabaticity: float = 3.0,
    offset_ratios: tuple[float, ...] | None = None,
    mode: str = "exact",
    compensation: str = "exact",
    sweep_rate: float = 1.0,
    tol: float = 1e-6,
) -> list[ErrorSweepRow]:
    """Single-pulse and composite errors over a grid of offsets.

    The working pulse is quantized near detuning_target, the composite is
    designed once, and both gates are evaluated per offset against the
    working rotation.  offset_ratios are offsets in units of the working
    coupling; the default grid is 60 points log-spaced over [1e-3, 1].
    """
    if mode not in _SWEEP_MODES:
        raise ValueError(f"mode must be one of {_SWEEP_MODES}, got {mode!r}")
    if offset_ratios is None:
        offset_ratios = DEFAULT_OFFSET_RATIOS
    working = quantize_working_pulse(
        adiabaticity, detuning_target, sweep_rate=sweep_rate
    )
    seq = design_composite(working, pi_adiabaticity, compensation=compensation)
    ideal = rx(seq.rotation_angle)
    rows = []
    for ratio in offset_ratios:
        offset = float(ratio) * working.coupling
        single = gate_error(_single_pulse_matrix(working, offset, mode, tol), ideal)
        composite = gate_error(compose(seq, offset, mode, tol), ideal, negate=True)
        rows.append(
            ErrorSweepRow(
                offset=offset,
                offset_ratio=float(ratio),
                error_single=single,
                error_composite=composite,
                mode=mode,
            )
        )
    return rows


def loglog_slope(
    x: np.ndarray,
    y: np.ndarray,
    window: tuple[float, float] = DEFAULT_SLOPE_WINDOW,
) -> float:
    """Least-squares power-law exponent of y(x) over a window of x.

    Window membership allows a 1e-12 relative slack so grid points that
    land on the window edges are kept.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    lo, hi = window
    keep = (x >= lo * (1.0 - 1e-12)) & (x <= hi * (1.0 + 1e-12)) & (y > 0.0)
    if int(np.count_nonzero(keep)) < 3:
        raise ValueError("need at least three grid points inside the window")
    slope, _ = np.polyfit(np.log(x[keep]), np.log(y[keep]), 1)
    return float(slope)
