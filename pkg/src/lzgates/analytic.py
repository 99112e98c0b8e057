"""Closed-form description of a single linear sweep through an avoided crossing.

A pulse drives the detuning linearly through zero while the coupling is held
constant, and the net effect on the two adiabatic frame states is a fixed 2x2
unitary.  This module builds that unitary two independent ways: by filling in
the scattering amplitudes directly, and by composing elementary z/x rotations
from the equivalent rotation decomposition.  Both share only the adiabatic
phase functions defined here.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .core import AdiabaticFrame, log_gamma_imag, rx, rz

_PHASE_METHODS = ("exact", "closed_form", "quadrature")


@dataclass(frozen=True)
class LinearSweepPulse:
    """One linear detuning sweep at constant coupling.

    The detuning runs from detuning_start to detuning_end at constant rate
    (detuning(t) = -sweep_rate * t, with the crossing at t = 0), so the two
    endpoint detunings must straddle zero and the start endpoint must carry
    the sign of the sweep rate.  Both endpoints have to sit well outside the
    crossing region for the asymptotic amplitudes to apply; the margin is
    adiabatic_factor times max(coupling, sqrt(|sweep_rate|)).
    """

    coupling: float
    sweep_rate: float
    detuning_start: float
    detuning_end: float
    adiabatic_factor: float = 5.0

    def __post_init__(self):
        values = (
            self.coupling,
            self.sweep_rate,
            self.detuning_start,
            self.detuning_end,
            self.adiabatic_factor,
        )
        if not all(math.isfinite(v) for v in values):
            raise ValueError("pulse parameters must be finite")
        if self.coupling <= 0.0:
            raise ValueError(f"coupling must be positive, got {self.coupling}")
        if self.sweep_rate == 0.0:
            raise ValueError("sweep_rate must be nonzero")
        if self.adiabatic_factor <= 0.0:
            raise ValueError("adiabatic_factor must be positive")
        if self.detuning_start * self.detuning_end >= 0.0:
            raise ValueError("endpoint detunings must straddle the crossing")
        if math.copysign(1.0, self.detuning_start) != math.copysign(
            1.0, self.sweep_rate
        ):
            raise ValueError("detuning_start must carry the sign of sweep_rate")
        threshold = self.adiabatic_factor * max(
            self.coupling, math.sqrt(abs(self.sweep_rate))
        )
        smallest = min(abs(self.detuning_start), abs(self.detuning_end))
        if smallest < threshold:
            raise ValueError(
                f"endpoint detuning {smallest:.6g} is inside the adiabatic "
                f"threshold {threshold:.6g}"
            )

    @property
    def adiabaticity(self) -> float:
        """Dimensionless coupling g = coupling / sqrt(|sweep_rate|)."""
        return self.coupling / math.sqrt(abs(self.sweep_rate))

    @property
    def time_start(self) -> float:
        return -self.detuning_start / self.sweep_rate

    @property
    def time_end(self) -> float:
        return -self.detuning_end / self.sweep_rate

    @property
    def duration(self) -> float:
        return self.time_end - self.time_start

    def detuning(self, t: float) -> float:
        """Detuning at time t; the crossing sits at t = 0."""
        return -self.sweep_rate * t

    def endpoint_detuning(self, endpoint: str) -> float:
        if endpoint == "start":
            return self.detuning_start
        if endpoint == "end":
            return self.detuning_end
        raise ValueError(f"endpoint must be 'start' or 'end', got {endpoint!r}")


def adiabatic_frame(delta: float, gamma: float) -> AdiabaticFrame:
    """Instantaneous eigenframe at detuning delta and coupling gamma > 0.

    The mixing angle is sgn(delta) * arccos(|delta| / 2E); it is discontinuous
    across delta = 0, so the crossing itself is rejected.
    """
    if not (math.isfinite(delta) and math.isfinite(gamma)):
        raise ValueError("delta and gamma must be finite")
    if gamma <= 0.0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if delta == 0.0:
        raise ValueError("the frame is not defined at the crossing delta = 0")
    energy = math.sqrt(0.25 * delta * delta + gamma * gamma)
    ratio = min(abs(delta) / (2.0 * energy), 1.0)
    angle = math.copysign(math.acos(ratio), delta)
    return AdiabaticFrame(energy=energy, mixing_angle=angle)


def _phase_matching_constant(g: float) -> float:
    """Constant offset between the asymptotic endpoint phases and the
    accumulated adiabatic phase: 0.5 * g^2 * (ln g^2 - 1)."""
    g2 = g * g
    return 0.5 * g2 * (math.log(g2) - 1.0)


def _phase_integral(d: float, coupling: float, rate_abs: float) -> float:
    """Adiabatic phase accumulated from the crossing out to |detuning| = d,
    via the exact antiderivative of sqrt(u^2/4 + coupling^2) / rate."""
    e = math.sqrt(0.25 * d * d + coupling * coupling)
    return (0.5 * d * e + coupling * coupling * math.asinh(0.5 * d / coupling)) / rate_abs


def _phase_series(d: float, coupling: float, rate_abs: float) -> float:
    """Large-detuning expansion of the same phase (drops O(d^-4) terms)."""
    g2 = coupling * coupling / rate_abs
    series = (
        0.25 * d * d / rate_abs
        + g2 * math.log(d / math.sqrt(rate_abs))
        + 0.5 * g2 * g2 * rate_abs / (d * d)
    )
    return series - _phase_matching_constant(math.sqrt(g2))


def _phase_quadrature(d: float, coupling: float, rate_abs: float) -> float:
    value, _ = quad(
        lambda u: math.sqrt(0.25 * u * u + coupling * coupling),
        0.0,
        d,
        epsabs=1e-12,
        epsrel=1e-13,
        limit=200,
    )
    return value / rate_abs


def _shifted_endpoint(pulse: LinearSweepPulse, endpoint: str, offset: float) -> float:
    """Endpoint detuning with the crossing offset applied; rejects offsets
    that push the endpoint across (or onto) the crossing."""
    delta = pulse.endpoint_detuning(endpoint)
    shifted = delta + offset
    if shifted == 0.0 or math.copysign(1.0, shifted) != math.copysign(1.0, delta):
        raise ValueError(
            f"offset {offset:.6g} pushes the {endpoint} endpoint across the crossing"
        )
    return shifted


def adiabatic_phase(
    pulse: LinearSweepPulse,
    endpoint: str,
    offset: float = 0.0,
    method: str = "exact",
) -> float:
    """Adiabatic phase accumulated between the crossing and one endpoint.

    The detuning offset error shifts the crossing, which is equivalent to
    evaluating at the shifted endpoint detuning.  Methods: "exact" uses the
    closed antiderivative of the frame energy, "quadrature" integrates it
    numerically (absolute tolerance 1e-12) as an independent check, and
    "closed_form" uses the large-detuning expansion, accurate to O(d^-4).
    """
    if method not in _PHASE_METHODS:
        raise ValueError(f"unknown phase method {method!r}")
    d = abs(_shifted_endpoint(pulse, endpoint, offset))
    rate_abs = abs(pulse.sweep_rate)
    if method == "exact":
        return _phase_integral(d, pulse.coupling, rate_abs)
    if method == "closed_form":
        return _phase_series(d, pulse.coupling, rate_abs)
    return _phase_quadrature(d, pulse.coupling, rate_abs)


def phase_shift_exact(pulse: LinearSweepPulse, endpoint: str, offset: float) -> float:
    """Exact change of the endpoint adiabatic phase caused by a detuning
    offset, computed as a cancellation-free difference.

    Equivalent to adiabatic_phase(..., offset) - adiabatic_phase(..., 0) but
    stable down to offsets where that difference would drown in roundoff of
    the large absolute phases.
    """
    delta = pulse.endpoint_detuning(endpoint)
    _shifted_endpoint(pulse, endpoint, offset)
    d0 = abs(delta)
    h = math.copysign(1.0, delta) * offset  # change of |detuning|
    gamma = pulse.coupling
    rate_abs = abs(pulse.sweep_rate)
    e0 = math.sqrt(0.25 * d0 * d0 + gamma * gamma)
    d1 = d0 + h
    e1 = math.sqrt(0.25 * d1 * d1 + gamma * gamma)
    de = 0.25 * h * (2.0 * d0 + h) / (e0 + e1)
    area = 0.5 * (d0 * de + h * e1)
    log_part = gamma * gamma * math.log1p((h + 2.0 * de) / (d0 + 2.0 * e0))
    return (area + log_part) / rate_abs


def phase_offset_perturbative(
    pulse: LinearSweepPulse, endpoint: str, offset: float
) -> float:
    """Second-order expansion of the endpoint phase shift in the detuning
    offset: sgn(delta) * E/|rate| * offset + |delta|/(8 |rate| E) * offset^2."""
    delta = pulse.endpoint_detuning(endpoint)
    energy = adiabatic_frame(delta, pulse.coupling).energy
    rate_abs = abs(pulse.sweep_rate)
    linear = math.copysign(1.0, delta) * energy / rate_abs * offset
    quadratic = abs(delta) / (8.0 * rate_abs * energy) * offset * offset
    return linear + quadratic


def transition_probability(adiabaticity: float) -> float:
    """Probability of ending in the other frame state, 1 - exp(-2 pi g^2)."""
    if adiabaticity <= 0.0:
        raise ValueError("adiabaticity must be positive")
    return -math.expm1(-2.0 * math.pi * adiabaticity * adiabaticity)


def rotation_angles(adiabaticity: float) -> tuple[float, float]:
    """Rotation angle and axis azimuth of the sweep gate stripped of its
    endpoint phases.

    Returns (angle, axis_azimuth): the gate equals
    Rz(axis_azimuth) Rx(angle) Rz(-axis_azimuth) between the endpoint phase
    factors.  angle = 2 arccos(exp(-pi g^2)); the azimuth collects the
    gamma-function phase and the matching constant.
    """
    g = float(adiabaticity)
    if not math.isfinite(g) or g <= 0.0:
        raise ValueError(f"adiabaticity must be positive, got {g}")
    g2 = g * g
    angle = 2.0 * math.acos(math.exp(-math.pi * g2))
    axis_azimuth = (
        -2.0 * _phase_matching_constant(g)
        + log_gamma_imag(g2).imag
        + 0.75 * math.pi
    )
    return angle, axis_azimuth


@dataclass(frozen=True)
class RotationDecomposition:
    """Sweep gate as endpoint z rotations around a fixed-axis rotation.

    For a downward sweep the matrix is
    Rz(-2 phase_end) Rz(axis_azimuth) Rx(angle) Rz(-axis_azimuth) Rz(2 phase_start)
    and for an upward sweep the signs of the azimuth and both phases flip.
    """

    angle: float
    axis_azimuth: float
    phase_start: float
    phase_end: float
    downward: bool

    def __post_init__(self):
        if self.phase_start < 0.0 or self.phase_end < 0.0:
            raise ValueError("endpoint phases must be nonnegative")

    def matrix(self) -> np.ndarray:
        sign = 1.0 if self.downward else -1.0
        return (
            rz(-2.0 * sign * self.phase_end)
            @ rz(sign * self.axis_azimuth)
            @ rx(self.angle)
            @ rz(-sign * self.axis_azimuth)
            @ rz(2.0 * sign * self.phase_start)
        )


def rotation_decomposition(
    pulse: LinearSweepPulse,
    offset: float = 0.0,
    method: str = "exact",
) -> RotationDecomposition:
    """Rotation decomposition of the sweep gate at the given offset error."""
    angle, axis_azimuth = rotation_angles(pulse.adiabaticity)
    return RotationDecomposition(
        angle=angle,
        axis_azimuth=axis_azimuth,
        phase_start=adiabatic_phase(pulse, "start", offset, method),
        phase_end=adiabatic_phase(pulse, "end", offset, method),
        downward=pulse.sweep_rate > 0.0,
    )


def rotation_form(
    pulse: LinearSweepPulse,
    offset: float = 0.0,
    method: str = "exact",
) -> np.ndarray:
    """Sweep gate built by composing elementary rotations."""
    return rotation_decomposition(pulse, offset, method).matrix()


def _entry_matrix(g: float, phi_start: float, phi_end: float) -> np.ndarray:
    """Scattering amplitudes of a downward sweep, filled in directly."""
    g2 = g * g
    stay = math.exp(-math.pi * g2)
    inv_gamma = cmath.exp(-log_gamma_imag(g2))  # 1 / Gamma(i g^2)
    prefactor = math.sqrt(2.0 * math.pi) / g * math.exp(-0.5 * math.pi * g2)
    phase_diff = phi_end - phi_start
    phase_sum = phi_start + phi_end
    s00 = stay * cmath.exp(1j * phase_diff)
    s01 = -prefactor * inv_gamma * cmath.exp(1j * (phase_sum - 0.25 * math.pi))
    s10 = (
        prefactor
        * inv_gamma.conjugate()
        * cmath.exp(1j * (0.25 * math.pi - phase_sum))
    )
    s11 = stay * cmath.exp(-1j * phase_diff)
    return np.array([[s00, s01], [s10, s11]], dtype=complex)


def scattering_matrix(
    pulse: LinearSweepPulse,
    offset: float = 0.0,
    method: str = "exact",
) -> np.ndarray:
    """Frame-basis gate of one sweep, from the asymptotic crossing amplitudes.

    The endpoint phases enter through the phase functions plus the matching
    constant.  An upward sweep is the transpose of the downward matrix with
    the two endpoint phases interchanged.
    """
    g = pulse.adiabaticity
    match = _phase_matching_constant(g)
    phi_start = adiabatic_phase(pulse, "start", offset, method) + match
    phi_end = adiabatic_phase(pulse, "end", offset, method) + match
    if pulse.sweep_rate > 0.0:
        return _entry_matrix(g, phi_start, phi_end)
    return _entry_matrix(g, phi_end, phi_start).T
