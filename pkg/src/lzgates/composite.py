"""Fault-tolerant three-pulse sequences built from linear sweeps.

A constant, unknown offset in the detuning leaves the sweep's rotation angle
untouched but shifts the endpoint phases.  The sequence designed here brackets
a working pulse between two population-swap pulses whose endpoint detunings
and sweep rate are tuned so the offset-induced phase shifts cancel through
second order, while every accumulated phase is pinned to a multiple of 2 pi
so the offset-free composite is exactly minus the working rotation.

Geometry (all three sweeps run downward):

    detuning
      far  |\
           | \          |\
           |  \  |\     | \
           |   \ | \    |  \
      -----+----\|--\---+---\----  crossing
           |     |   \  |    \
           |          \ |     \
           |           \|      \ -far
           leading    working   trailing

The working pulse is symmetric; the bracketing pulses mirror each other, so
the trailing pulse starts at the near magnitude and the leading pulse ends
there.  Between pulses the detuning jumps instantaneously.
"""

import dataclasses
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, root

from .analytic import (
    LinearSweepPulse,
    _phase_integral,
    adiabatic_phase,
    phase_offset_perturbative,
    phase_shift_exact,
    rotation_angles,
    rotation_decomposition,
    scattering_matrix,
)
from .core import PAULI_X, rz
from .propagator import DetuningProfile, ProfileSegment, evolve, to_adiabatic

_COMPENSATION_MODES = ("simplified", "exact")
_COMPOSE_MODES = ("exact", "perturbative", "numeric")
_SIDES = ("leading", "trailing")
_ENDPOINTS = ("start", "end")
_PHASE_ERROR_METHODS = ("exact", "perturbative")

DEFAULT_LEAKAGE_BUDGET = 1e-5
_QUANTIZATION_CAP = 1e-10
_RESIDUAL_CAP = 1e-10
_MAX_WINDING_BUMPS = 12

TWO_PI = 2.0 * math.pi


def _wrap_phase(value: float) -> float:
    """Reduce a phase defect to (-pi, pi]."""
    return math.remainder(value, TWO_PI)


@dataclass(frozen=True)
class PiPulseSpec:
    """One bracketing population-swap pulse of a composite sequence.

    near_magnitude is |detuning| at the side facing the working pulse,
    far_magnitude at the outer side; the pulse is asymmetric with
    far > near, and far also exceeds twice the working endpoint.  The
    trailing pulse sweeps near -> -far, the leading pulse far -> -near.
    """

    pulse: LinearSweepPulse
    side: str
    near_magnitude: float
    far_magnitude: float

    def __post_init__(self):
        if self.side not in _SIDES:
            raise ValueError(f"side must be one of {_SIDES}, got {self.side!r}")
        if not 0.0 < self.near_magnitude < self.far_magnitude:
            raise ValueError("need 0 < near magnitude < far magnitude")
        first = self.far_magnitude if self.side == "leading" else self.near_magnitude
        last = self.near_magnitude if self.side == "leading" else self.far_magnitude
        if self.pulse.detuning_start != first or self.pulse.detuning_end != -last:
            raise ValueError("pulse endpoints do not match the stated geometry")

    @property
    def leakage(self) -> float:
        """Probability scale of the residual population transfer error."""
        g = self.pulse.adiabaticity
        return math.exp(-math.pi * g * g)


@dataclass(frozen=True)
class CompositeSequence:
    """Designed leading / working / trailing sweep triple.

    The residual tuples hold the per-side coefficients of the corrected
    endpoint phase error's expansion in the offset, ordered (start side,
    end side); both orders vanish for an exactly compensated design.
    quantization_residuals are the wrapped phase defects (working,
    leading, trailing).
    """

    leading: PiPulseSpec
    working: LinearSweepPulse
    trailing: PiPulseSpec
    compensation: str
    first_order_residuals: tuple[float, float]
    second_order_residuals: tuple[float, float]
    quantization_residuals: tuple[float, float, float]

    def __post_init__(self):
        if self.compensation not in _COMPENSATION_MODES:
            raise ValueError(f"unknown compensation mode {self.compensation!r}")
        if self.leading.side != "leading" or self.trailing.side != "trailing":
            raise ValueError("bracketing pulses are on the wrong sides")
        lead, trail = self.leading.pulse, self.trailing.pulse
        if lead.coupling != trail.coupling or lead.sweep_rate != trail.sweep_rate:
            raise ValueError("bracketing pulses must share coupling and rate")
        if (
            self.leading.near_magnitude != self.trailing.near_magnitude
            or self.leading.far_magnitude != self.trailing.far_magnitude
        ):
            raise ValueError("bracketing pulses must mirror each other")
        if any(abs(r) > _QUANTIZATION_CAP for r in self.quantization_residuals):
            raise ValueError("quantization residuals exceed the cap")

    @property
    def rotation_angle(self) -> float:
        return rotation_angles(self.working.adiabaticity)[0]

    @property
    def pulses(self) -> tuple[LinearSweepPulse, LinearSweepPulse, LinearSweepPulse]:
        return (self.leading.pulse, self.working, self.trailing.pulse)


def _require_downward_quantized(working: LinearSweepPulse) -> None:
    if working.sweep_rate <= 0.0:
        raise ValueError("composite design expects a downward working pulse")
    if working.detuning_start != -working.detuning_end:
        raise ValueError("composite design expects a symmetric working pulse")
    defect = working_quantization_defect(working)
    if abs(defect) > _QUANTIZATION_CAP:
        raise ValueError(
            f"working pulse is not quantized (phase defect {defect:.3e}); "
            "build it with quantize_working_pulse"
        )


def working_quantization_defect(working: LinearSweepPulse) -> float:
    """Wrapped defect of the pure-rotation condition at the endpoints."""
    _, axis = rotation_angles(working.adiabaticity)
    phase = adiabatic_phase(working, "start")
    return _wrap_phase(axis - 2.0 * phase)


def quantize_working_pulse(
    adiabaticity: float,
    detuning_target: float,
    sweep_rate: float = 1.0,
    adiabatic_factor: float = 5.0,
) -> LinearSweepPulse:
    """Symmetric downward sweep whose gate is a pure x rotation.

    The endpoint magnitude is moved from detuning_target to the nearest
    value at which the axis azimuth matches twice the endpoint phase modulo
    2 pi (stepping upward when the nearest solution would sit inside the
    adiabatic margin), which strips the gate of its endpoint z rotations.
    """
    if sweep_rate <= 0.0:
        raise ValueError("quantization is defined for downward sweeps")
    coupling = adiabaticity * math.sqrt(sweep_rate)
    threshold = adiabatic_factor * max(coupling, math.sqrt(sweep_rate))
    if detuning_target < threshold:
        raise ValueError(
            f"target detuning {detuning_target:.6g} is inside the adiabatic "
            f"threshold {threshold:.6g}"
        )
    _, axis = rotation_angles(adiabaticity)

    def defect(d: float) -> float:
        return axis - 2.0 * _phase_integral(d, coupling, sweep_rate)

    def solve(winding: int, lo: float, hi: float) -> float:
        return brentq(
            lambda d: defect(d) - TWO_PI * winding,
            lo,
            hi,
            xtol=1e-13,
            rtol=8.9e-16,
        )

    def period(d: float) -> float:
        energy = math.sqrt(0.25 * d * d + coupling * coupling)
        return math.pi * sweep_rate / energy

    # the defect decreases in the endpoint magnitude, one period per 2 pi
    winding = round(defect(detuning_target) / TWO_PI)
    span = 1.05 * period(detuning_target)
    if defect(detuning_target) >= TWO_PI * winding:
        magnitude = solve(winding, detuning_target, detuning_target + span)
    else:
        magnitude = solve(winding, detuning_target - span, detuning_target)
    while magnitude < threshold:
        winding -= 1
        magnitude = solve(winding, magnitude, magnitude + 1.05 * period(magnitude))
    return LinearSweepPulse(
        coupling=coupling,
        sweep_rate=sweep_rate,
        detuning_start=magnitude,
        detuning_end=-magnitude,
        adiabatic_factor=adiabatic_factor,
    )


def _pi_pulse_band(working: LinearSweepPulse, pi_adiabaticity: float) -> float:
    """Smallest admissible near-side magnitude: the bracketing pulse's
    adiabatic truncation error must not exceed the working pulse's."""
    ratio = pi_adiabaticity / working.adiabaticity
    return math.sqrt(2.0) * ratio ** (1.0 / 3.0) * abs(working.detuning_end)


def _check_leakage(pi_adiabaticity: float, leakage_budget: float) -> None:
    leakage = math.exp(-math.pi * pi_adiabaticity * pi_adiabaticity)
    if leakage > leakage_budget:
        raise ValueError(
            f"population swap leakage {leakage:.3e} exceeds the budget "
            f"{leakage_budget:.3e}; increase the bracketing-pulse coupling"
        )


def _build_pi_pulse(
    working: LinearSweepPulse,
    side: str,
    near: float,
    far: float,
    sweep_rate: float,
    coupling: float,
) -> PiPulseSpec:
    # the near endpoint is allowed to sit slightly inside the default
    # adiabatic margin; what must not grow is the truncation error relative
    # to the working pulse, which _pi_pulse_band already enforces
    scale = max(coupling, math.sqrt(sweep_rate))
    factor = min(working.adiabatic_factor, (1.0 - 1e-12) * min(near, far) / scale)
    if side == "leading":
        start, end = far, -near
    else:
        start, end = near, -far
    pulse = LinearSweepPulse(
        coupling=coupling,
        sweep_rate=sweep_rate,
        detuning_start=start,
        detuning_end=end,
        adiabatic_factor=factor,
    )
    return PiPulseSpec(pulse=pulse, side=side, near_magnitude=near, far_magnitude=far)


def _bracket_phase(
    near: float, far: float, coupling: float, sweep_rate: float, axis: float
) -> float:
    """Total accumulated phase of a bracketing pulse against its axis
    azimuth; a multiple of 2 pi makes the pulse a pure population swap."""
    return (
        2.0 * _phase_integral(near, coupling, sweep_rate)
        + 2.0 * _phase_integral(far, coupling, sweep_rate)
        - 2.0 * axis
    )


def _solve_simplified_near(
    working: LinearSweepPulse, pi_adiabaticity: float
) -> tuple[float, float, float, int]:
    """Near magnitude under the leading-order compensation rules: double
    the sweep rate, far slaved to 2|working end| + near, near quantized
    at the smallest admissible magnitude."""
    sweep_rate = 2.0 * working.sweep_rate
    coupling = pi_adiabaticity * math.sqrt(sweep_rate)
    _, axis = rotation_angles(pi_adiabaticity)
    d2 = abs(working.detuning_end)
    bound = _pi_pulse_band(working, pi_adiabaticity)

    def defect(near: float) -> float:
        return _bracket_phase(near, 2.0 * d2 + near, coupling, sweep_rate, axis)

    # defect increases in near; take the first winding whose solution
    # sits at or above the bound
    winding = math.ceil(defect(bound) / TWO_PI - 1e-12)
    e_near = math.sqrt(0.25 * bound * bound + coupling * coupling)
    e_far = math.sqrt(0.25 * (2.0 * d2 + bound) ** 2 + coupling * coupling)
    span = 1.05 * TWO_PI * sweep_rate / (2.0 * (e_near + e_far))
    near = brentq(
        lambda n: defect(n) - TWO_PI * winding,
        bound - 1e-9 * bound,
        bound + span,
        xtol=1e-13,
        rtol=8.9e-16,
    )
    return near, sweep_rate, 2.0 * d2 + near, winding


def design_pi_pulse(
    working: LinearSweepPulse,
    pi_adiabaticity: float = 3.0,
    side: str = "trailing",
    leakage_budget: float = DEFAULT_LEAKAGE_BUDGET,
) -> PiPulseSpec:
    """One bracketing pulse under the simplified compensation rules."""
    if side not in _SIDES:
        raise ValueError(f"side must be one of {_SIDES}, got {side!r}")
    _require_downward_quantized(working)
    _check_leakage(pi_adiabaticity, leakage_budget)
    near, sweep_rate, far, _ = _solve_simplified_near(working, pi_adiabaticity)
    coupling = pi_adiabaticity * math.sqrt(sweep_rate)
    return _build_pi_pulse(working, side, near, far, sweep_rate, coupling)


def _compensation_residuals(
    working: LinearSweepPulse,
    near: float,
    far: float,
    sweep_rate: float,
    coupling: float,
) -> tuple[float, float]:
    """Exact-energy coefficients (f1, f2) of the trailing side's corrected
    phase error: delta-phi-tilde = f1*eps + f2*eps^2 + O(eps^3)."""
    d2 = abs(working.detuning_end)
    e_w = math.sqrt(0.25 * d2 * d2 + working.coupling**2)
    e_near = math.sqrt(0.25 * near * near + coupling * coupling)
    e_far = math.sqrt(0.25 * far * far + coupling * coupling)
    f1 = (e_far - e_near) / sweep_rate - e_w / working.sweep_rate
    f2 = -(
        far / (8.0 * sweep_rate * e_far)
        + near / (8.0 * sweep_rate * e_near)
        - d2 / (8.0 * working.sweep_rate * e_w)
    )
    return f1, f2


def design_composite(
    working: LinearSweepPulse,
    pi_adiabaticity: float = 3.0,
    compensation: str = "exact",
    leakage_budget: float = DEFAULT_LEAKAGE_BUDGET,
) -> CompositeSequence:
    """Complete three-pulse design around a quantized working pulse.

    In "simplified" mode the bracketing pulses follow the leading-order
    rules (double rate, slaved far endpoint); the offset cancellation they
    achieve is then only approximate, and the reported residuals retain a
    first-order term of a few tenths.  In "exact" mode (the default) the
    near magnitude, sweep rate and far magnitude are solved jointly from
    the quantization condition and both exact-energy cancellation
    conditions, pushing the residuals to roundoff and the composite error
    to cubic order in the offset.
    """
    if compensation not in _COMPENSATION_MODES:
        raise ValueError(f"unknown compensation mode {compensation!r}")
    _require_downward_quantized(working)
    _check_leakage(pi_adiabaticity, leakage_budget)
    near, sweep_rate, far, winding = _solve_simplified_near(working, pi_adiabaticity)
    _, axis = rotation_angles(pi_adiabaticity)
    bound = _pi_pulse_band(working, pi_adiabaticity)

    if compensation == "exact":
        def residuals(x: np.ndarray, winding: int) -> list[float]:
            near, rate, far = x
            coupling = pi_adiabaticity * math.sqrt(rate)
            f1, f2 = _compensation_residuals(working, near, far, rate, coupling)
            bracket = _bracket_phase(near, far, coupling, rate, axis)
            return [bracket - TWO_PI * winding, f1, f2]

        for _ in range(_MAX_WINDING_BUMPS):
            solution = root(
                residuals,
                np.array([near, sweep_rate, far]),
                args=(winding,),
                method="hybr",
                tol=1e-13,
            )
            if not solution.success:
                raise RuntimeError(
                    f"compensation solve failed to converge: {solution.message}"
                )
            near, sweep_rate, far = (float(v) for v in solution.x)
            if near >= bound:
                break
            # solution slid inside the admissible band: demand one more
            # phase winding, which lengthens the pulse
            winding += 1
        else:
            raise RuntimeError("compensation solve kept violating the near bound")
    coupling = pi_adiabaticity * math.sqrt(sweep_rate)

    f1, f2 = _compensation_residuals(working, near, far, sweep_rate, coupling)
    if compensation == "exact" and max(abs(f1), abs(f2)) > _RESIDUAL_CAP:
        raise RuntimeError(
            f"cancellation residuals ({f1:.3e}, {f2:.3e}) exceed the cap"
        )
    bracket_defect = _wrap_phase(_bracket_phase(near, far, coupling, sweep_rate, axis))
    leading = _build_pi_pulse(working, "leading", near, far, sweep_rate, coupling)
    trailing = _build_pi_pulse(working, "trailing", near, far, sweep_rate, coupling)
    return CompositeSequence(
        leading=leading,
        working=working,
        trailing=trailing,
        compensation=compensation,
        first_order_residuals=(-f1, f1),
        second_order_residuals=(f2, f2),
        quantization_residuals=(
            working_quantization_defect(working),
            bracket_defect,
            bracket_defect,
        ),
    )


def composite_profile(seq: CompositeSequence, offset: float = 0.0) -> DetuningProfile:
    """Sawtooth control history of the sequence, with instantaneous jumps
    between pulses and the constant offset applied throughout."""
    segments = []
    t = 0.0
    for pulse in seq.pulses:
        segments.append(
            ProfileSegment(
                time_start=t,
                time_end=t + pulse.duration,
                detuning_start=pulse.detuning_start,
                detuning_end=pulse.detuning_end,
                coupling=pulse.coupling,
            )
        )
        t += pulse.duration
    return DetuningProfile(tuple(segments)).shifted(offset)


def _perturbed_matrix(pulse: LinearSweepPulse, offset: float) -> np.ndarray:
    decomposition = rotation_decomposition(pulse, 0.0)
    return dataclasses.replace(
        decomposition,
        phase_start=decomposition.phase_start
        + phase_offset_perturbative(pulse, "start", offset),
        phase_end=decomposition.phase_end
        + phase_offset_perturbative(pulse, "end", offset),
    ).matrix()


def compose(
    seq: CompositeSequence,
    offset: float = 0.0,
    mode: str = "exact",
    tol: float = 1e-6,
) -> np.ndarray:
    """Frame-basis gate of the whole sequence at a given detuning offset.

    "exact" multiplies the three closed-form gates with phases recomputed
    at the shifted detunings; "perturbative" shifts the phases by their
    second-order expansions instead; "numeric" integrates the sawtooth
    profile and converts to the frames at the outer endpoints.
    """
    if mode not in _COMPOSE_MODES:
        raise ValueError(f"mode must be one of {_COMPOSE_MODES}, got {mode!r}")
    if mode == "numeric":
        profile = composite_profile(seq, offset)
        u = evolve(profile, tol=tol)
        return to_adiabatic(
            u,
            seq.leading.pulse.detuning_start + offset,
            seq.trailing.pulse.detuning_end + offset,
            seq.leading.pulse.coupling,
        )
    build = scattering_matrix if mode == "exact" else _perturbed_matrix
    matrices = [build(pulse, offset) for pulse in seq.pulses]
    return matrices[2] @ matrices[1] @ matrices[0]


def corrected_phase_error(
    seq: CompositeSequence,
    endpoint: str,
    offset: float,
    method: str = "exact",
) -> float:
    """Residual phase error at one working-pulse endpoint after the
    adjacent bracketing pulse's compensation is subtracted.

    The shift of the working endpoint phase minus the shifts of both
    endpoint phases of the neighbouring pulse; for an exactly compensated
    design this is cubic in the offset.  Method "exact" uses the
    cancellation-free closed-form differences (stable down to offsets many
    orders below the coupling); "perturbative" combines the second-order
    expansions, which by construction vanish identically for an exact
    design.
    """
    if endpoint not in _ENDPOINTS:
        raise ValueError(f"endpoint must be one of {_ENDPOINTS}, got {endpoint!r}")
    if method not in _PHASE_ERROR_METHODS:
        raise ValueError(f"unknown method {method!r}")
    shift = phase_shift_exact if method == "exact" else phase_offset_perturbative
    if endpoint == "start":
        neighbour = seq.leading.pulse
    else:
        neighbour = seq.trailing.pulse
    return (
        shift(seq.working, endpoint, offset)
        - shift(neighbour, "start", offset)
        - shift(neighbour, "end", offset)
    )


def pi_pulse_matrix_approx(spec: PiPulseSpec, offset: float = 0.0) -> np.ndarray:
    """Population-swap shortcut for a bracketing pulse: -iX times the z
    rotation by the pulse's total bracket phase.  Differs from the exact
    gate by the leakage scale, about 2 exp(-pi g^2)."""
    pulse = spec.pulse
    _, axis = rotation_angles(pulse.adiabaticity)
    bracket = (
        2.0 * adiabatic_phase(pulse, "start", offset)
        + 2.0 * adiabatic_phase(pulse, "end", offset)
        - 2.0 * axis
    )
    return -1j * PAULI_X @ rz(bracket)
