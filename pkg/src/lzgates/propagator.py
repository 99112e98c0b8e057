"""Direct numerical integration of the two-level Schrodinger equation.

The control history is a piecewise-linear detuning with piecewise-constant
coupling.  Propagation uses midpoint exponentials (second-order Magnus) with
exact 2x2 Pauli exponentials per step, so every step is exactly unitary; the
step density is set by a bound on the phase advanced per step, and repeated
step halving certifies the result against a requested tolerance.
"""

import math
from dataclasses import dataclass

import numpy as np

from .analytic import LinearSweepPulse, adiabatic_frame
from .core import AdiabaticFrame, spectral_norm

_BASES = ("adiabatic", "computational")
_INITIAL_MAX_PHASE = 0.1  # radians of dynamical phase per step, first pass
_MAX_HALVINGS = 30
_CHUNK = 1 << 16


class ConvergenceError(RuntimeError):
    """Raised when step halving fails to reach the requested tolerance."""


@dataclass(frozen=True)
class ProfileSegment:
    """One linear-detuning stretch at constant coupling."""

    time_start: float
    time_end: float
    detuning_start: float
    detuning_end: float
    coupling: float

    def __post_init__(self):
        values = (
            self.time_start,
            self.time_end,
            self.detuning_start,
            self.detuning_end,
            self.coupling,
        )
        if not all(math.isfinite(v) for v in values):
            raise ValueError("segment parameters must be finite")
        if self.time_end <= self.time_start:
            raise ValueError("segment must have positive duration")
        if self.coupling < 0.0:
            raise ValueError("coupling must be nonnegative")
        if self.coupling > 0.0 and self.slope == 0.0 and self.detuning_start == 0.0:
            raise ValueError(
                "a coupled segment pinned at zero detuning has no linear crossing"
            )

    @property
    def slope(self) -> float:
        return (self.detuning_end - self.detuning_start) / (
            self.time_end - self.time_start
        )

    def detuning(self, t: float) -> float:
        return self.detuning_start + self.slope * (t - self.time_start)


@dataclass(frozen=True)
class DetuningProfile:
    """Contiguous sequence of segments; detuning jumps between segments are
    allowed and cost no time."""

    segments: tuple[ProfileSegment, ...]

    def __post_init__(self):
        if not self.segments:
            raise ValueError("profile needs at least one segment")
        for prev, nxt in zip(self.segments, self.segments[1:]):
            if nxt.time_start != prev.time_end:
                raise ValueError("segments must be contiguous in time")

    @classmethod
    def from_knots(cls, times, detunings, couplings) -> "DetuningProfile":
        """Profile through detuning knots at strictly increasing times, with
        one constant coupling per interval."""
        times = [float(t) for t in times]
        detunings = [float(d) for d in detunings]
        couplings = [float(g) for g in couplings]
        if len(times) < 2 or len(times) != len(detunings):
            raise ValueError("need matching times and detunings, at least two")
        if len(couplings) != len(times) - 1:
            raise ValueError("need one coupling per interval between knots")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("knot times must be strictly increasing")
        segments = tuple(
            ProfileSegment(times[i], times[i + 1], detunings[i], detunings[i + 1], couplings[i])
            for i in range(len(times) - 1)
        )
        return cls(segments)

    @classmethod
    def from_pulse(cls, pulse: LinearSweepPulse) -> "DetuningProfile":
        segment = ProfileSegment(
            pulse.time_start,
            pulse.time_end,
            pulse.detuning_start,
            pulse.detuning_end,
            pulse.coupling,
        )
        return cls((segment,))

    @property
    def time_start(self) -> float:
        return self.segments[0].time_start

    @property
    def time_end(self) -> float:
        return self.segments[-1].time_end

    def shifted(self, offset: float) -> "DetuningProfile":
        """Same profile with the detuning offset by a constant error."""
        segments = tuple(
            ProfileSegment(
                s.time_start,
                s.time_end,
                s.detuning_start + offset,
                s.detuning_end + offset,
                s.coupling,
            )
            for s in self.segments
        )
        return DetuningProfile(segments)

    def detuning(self, t: float) -> float:
        for segment in self.segments:
            if segment.time_start <= t <= segment.time_end:
                return segment.detuning(t)
        raise ValueError(f"time {t} is outside the profile span")

    def coupling(self, t: float) -> float:
        for segment in self.segments:
            if segment.time_start <= t <= segment.time_end:
                return segment.coupling
        raise ValueError(f"time {t} is outside the profile span")


def _step_factors(segment: ProfileSegment, lo: float, hi: float, max_phase: float):
    """Step matrices for one segment window as stacked (n, 2, 2) chunks."""
    gamma = segment.coupling
    e_lo = math.sqrt(0.25 * segment.detuning(lo) ** 2 + gamma * gamma)
    e_hi = math.sqrt(0.25 * segment.detuning(hi) ** 2 + gamma * gamma)
    e_max = max(e_lo, e_hi)
    n = max(1, math.ceil(e_max * (hi - lo) / max_phase))
    dt = (hi - lo) / n
    for first in range(0, n, _CHUNK):
        count = min(_CHUNK, n - first)
        mid = lo + (np.arange(first, first + count) + 0.5) * dt
        d = segment.detuning_start + segment.slope * (mid - segment.time_start)
        energy = np.sqrt(0.25 * d * d + gamma * gamma)
        phase = energy * dt
        cos = np.cos(phase)
        # sin(phase)/energy, with the free-evolution limit energy -> 0
        sinc = np.where(energy > 0.0, np.sin(phase) / np.where(energy > 0.0, energy, 1.0), dt)
        steps = np.empty((count, 2, 2), dtype=complex)
        steps[:, 0, 0] = cos - 0.5j * sinc * d
        steps[:, 0, 1] = -1j * sinc * gamma
        steps[:, 1, 0] = steps[:, 0, 1]
        steps[:, 1, 1] = cos + 0.5j * sinc * d
        yield steps


def _reduce_ordered(steps: np.ndarray) -> np.ndarray:
    """Product steps[n-1] @ ... @ steps[0] by pairwise reduction."""
    while steps.shape[0] > 1:
        if steps.shape[0] % 2:
            tail = steps[-1:]
            body = steps[:-1]
            steps = np.concatenate(
                [np.matmul(body[1::2], body[0::2]), tail], axis=0
            )
        else:
            steps = np.matmul(steps[1::2], steps[0::2])
    return steps[0]


def _fixed_step_propagator(
    profile: DetuningProfile, t_start: float, t_end: float, max_phase: float
) -> np.ndarray:
    u = np.eye(2, dtype=complex)
    for segment in profile.segments:
        lo = max(segment.time_start, t_start)
        hi = min(segment.time_end, t_end)
        if hi <= lo:
            continue
        for steps in _step_factors(segment, lo, hi, max_phase):
            u = _reduce_ordered(steps) @ u
    return u


def evolve(
    profile: DetuningProfile,
    t_start: float | None = None,
    t_end: float | None = None,
    tol: float = 1e-8,
) -> np.ndarray:
    """Propagator over [t_start, t_end] in the computational basis.

    The step-phase bound is halved until two successive propagators agree to
    tol in spectral norm, which certifies the global error of the returned
    (finer) result below tol for a second-order scheme.
    """
    if t_start is None:
        t_start = profile.time_start
    if t_end is None:
        t_end = profile.time_end
    if not 1e-12 <= tol <= 1e-6:
        raise ValueError(f"tol must lie in [1e-12, 1e-6], got {tol}")
    if not (profile.time_start <= t_start < t_end <= profile.time_end):
        raise ValueError("requested interval is outside the profile span")
    max_phase = _INITIAL_MAX_PHASE
    previous = _fixed_step_propagator(profile, t_start, t_end, max_phase)
    for _ in range(_MAX_HALVINGS):
        max_phase *= 0.5
        current = _fixed_step_propagator(profile, t_start, t_end, max_phase)
        if spectral_norm(current - previous) <= tol:
            return current
        previous = current
    raise ConvergenceError(
        f"step halving stalled before reaching tol = {tol:.3e}"
    )


def to_adiabatic(
    matrix: np.ndarray,
    delta_initial: float,
    delta_final: float,
    coupling_initial: float,
    coupling_final: float | None = None,
) -> np.ndarray:
    """Re-express a computational-basis propagator between the instantaneous
    frames at its initial and final detunings."""
    if coupling_final is None:
        coupling_final = coupling_initial
    v_initial = adiabatic_frame(delta_initial, coupling_initial).basis_matrix
    v_final = adiabatic_frame(delta_final, coupling_final).basis_matrix
    return v_final.conj().T @ np.asarray(matrix, dtype=complex) @ v_initial


@dataclass(frozen=True)
class CrossingTrace:
    """Occupation of the initially empty state sampled along one sweep."""

    basis: str
    times: np.ndarray
    occupations: np.ndarray
    near_crossing: np.ndarray  # True where |detuning| < flag window


def _frame_at(pulse: LinearSweepPulse, t: float) -> AdiabaticFrame:
    delta = pulse.detuning(t)
    if delta == 0.0:
        # exactly at the crossing: use the incoming side's frame
        return AdiabaticFrame(
            energy=pulse.coupling,
            mixing_angle=math.copysign(0.5 * math.pi, pulse.sweep_rate),
        )
    return adiabatic_frame(delta, pulse.coupling)


def _trace_pass(
    pulse: LinearSweepPulse, times: np.ndarray, basis: str, max_phase: float
) -> np.ndarray:
    profile = DetuningProfile.from_pulse(pulse)
    state = _frame_at(pulse, times[0]).state_lower_index.copy()
    occupations = np.empty(len(times))

    def occupation(t: float, psi: np.ndarray) -> float:
        if basis == "computational":
            return abs(psi[1]) ** 2
        empty = _frame_at(pulse, t).state_upper_index
        return abs(np.vdot(empty, psi)) ** 2

    occupations[0] = occupation(times[0], state)
    for i in range(1, len(times)):
        u = _fixed_step_propagator(profile, times[i - 1], times[i], max_phase)
        state = u @ state
        occupations[i] = occupation(times[i], state)
    return occupations


def crossing_trace(
    pulse: LinearSweepPulse,
    basis: str = "adiabatic",
    n_samples: int = 400,
    tol: float = 1e-6,
    flag_window: float | None = None,
) -> CrossingTrace:
    """Occupation of the initially empty state on a uniform time grid.

    The system starts in the lower-index frame state at the first sample.
    Sampled occupations are refined by step halving until two passes agree to
    tol everywhere.  Samples with |detuning| below the flag window (default
    2 max(coupling, sqrt|rate|)) are marked near the crossing, where the
    adiabatic basis reading is not meaningful.
    """
    if basis not in _BASES:
        raise ValueError(f"basis must be one of {_BASES}, got {basis!r}")
    if n_samples < 2:
        raise ValueError("need at least two samples")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if flag_window is None:
        flag_window = 2.0 * max(pulse.coupling, math.sqrt(abs(pulse.sweep_rate)))
    times = np.linspace(pulse.time_start, pulse.time_end, n_samples)
    max_phase = _INITIAL_MAX_PHASE
    previous = _trace_pass(pulse, times, basis, max_phase)
    for _ in range(_MAX_HALVINGS):
        max_phase *= 0.5
        current = _trace_pass(pulse, times, basis, max_phase)
        if float(np.max(np.abs(current - previous))) <= tol:
            detunings = np.array([pulse.detuning(t) for t in times])
            return CrossingTrace(
                basis=basis,
                times=times,
                occupations=current,
                near_crossing=np.abs(detunings) < flag_window,
            )
        previous = current
    raise ConvergenceError(
        f"trace refinement stalled before reaching tol = {tol:.3e}"
    )
