"""Numeric propagation: piecewise-linear profiles, the step-halving
integrator, frame conversion, and occupation traces through the crossing."""

import math

import numpy as np
import pytest
import scipy.linalg

from lzgates import (
    DetuningProfile,
    LinearSweepPulse,
    ProfileSegment,
    adiabatic_frame,
    crossing_trace,
    evolve,
    rz,
    scattering_matrix,
    to_adiabatic,
    transition_probability,
    unitarity_defect,
)


def make_pulse(coupling=1.0, rate=1.0, start=10.0, end=-10.0):
    return LinearSweepPulse(
        coupling=coupling,
        sweep_rate=rate,
        detuning_start=start,
        detuning_end=end,
    )


# ------------------------------------------------------------------ profiles


def test_segment_validation():
    with pytest.raises(ValueError):
        ProfileSegment(1.0, 1.0, 5.0, -5.0, 1.0)  # zero duration
    with pytest.raises(ValueError):
        ProfileSegment(0.0, 1.0, 5.0, -5.0, -1.0)  # negative coupling
    with pytest.raises(ValueError):
        ProfileSegment(0.0, 1.0, 0.0, 0.0, 1.0)  # coupled, pinned at zero
    with pytest.raises(ValueError):
        ProfileSegment(0.0, math.inf, 5.0, -5.0, 1.0)
    # uncoupled segment pinned at zero is allowed
    ProfileSegment(0.0, 1.0, 0.0, 0.0, 0.0)


def test_segment_geometry():
    seg = ProfileSegment(1.0, 3.0, 4.0, -2.0, 0.5)
    assert seg.slope == pytest.approx(-3.0)
    assert seg.detuning(1.0) == 4.0
    assert seg.detuning(2.0) == pytest.approx(1.0)
    assert seg.detuning(3.0) == pytest.approx(-2.0)


def test_profile_contiguity():
    a = ProfileSegment(0.0, 1.0, 5.0, -5.0, 1.0)
    b = ProfileSegment(1.0, 2.0, 5.0, -5.0, 1.0)
    gap = ProfileSegment(1.5, 2.0, 5.0, -5.0, 1.0)
    DetuningProfile((a, b))  # detuning jump at the seam is fine
    with pytest.raises(ValueError):
        DetuningProfile((a, gap))
    with pytest.raises(ValueError):
        DetuningProfile(())


def test_profile_from_knots():
    profile = DetuningProfile.from_knots(
        times=[0.0, 1.0, 3.0],
        detunings=[6.0, 0.5, -6.0],
        couplings=[1.0, 2.0],
    )
    assert len(profile.segments) == 2
    assert profile.time_start == 0.0
    assert profile.time_end == 3.0
    assert profile.segments[1].coupling == 2.0
    with pytest.raises(ValueError):
        DetuningProfile.from_knots([0.0, 1.0], [1.0, 2.0, 3.0], [1.0])
    with pytest.raises(ValueError):
        DetuningProfile.from_knots([0.0, 0.0], [1.0, 2.0], [1.0])
    with pytest.raises(ValueError):
        DetuningProfile.from_knots([0.0], [1.0], [])


def test_profile_from_pulse_and_shifted():
    pulse = make_pulse(coupling=2.0, rate=4.0, start=20.0, end=-12.0)
    profile = DetuningProfile.from_pulse(pulse)
    (seg,) = profile.segments
    assert seg.time_start == pulse.time_start
    assert seg.time_end == pulse.time_end
    assert seg.detuning_start == 20.0
    assert seg.detuning_end == -12.0
    assert seg.coupling == 2.0
    shifted = profile.shifted(0.25)
    assert shifted.segments[0].detuning_start == 20.25
    assert shifted.segments[0].detuning_end == -11.75
    assert shifted.segments[0].coupling == 2.0


# -------------------------------------------------------------------- evolve


def test_evolve_flat_segment_against_expm():
    d, gamma, t = 3.0, 0.8, 2.5
    profile = DetuningProfile((ProfileSegment(0.0, t, d, d, gamma),))
    h = np.array([[0.5 * d, gamma], [gamma, -0.5 * d]], dtype=complex)
    expected = scipy.linalg.expm(-1j * h * t)
    u = evolve(profile, tol=1e-10)
    assert np.abs(u - expected).max() < 1e-9


def test_evolve_uncoupled_sweep_is_a_pure_phase():
    # without coupling the propagator is diagonal with phase
    # -0.5 * integral of the detuning
    profile = DetuningProfile.from_knots([0.0, 2.0], [1.0, 3.0], [0.0])
    u = evolve(profile, tol=1e-12)
    phi = 0.5 * (1.0 + 3.0) / 2.0 * 2.0  # mean detuning / 2 times duration
    assert np.abs(u - rz(2.0 * phi)).max() < 1e-11


def test_evolve_validates_tolerance_and_interval():
    profile = DetuningProfile.from_pulse(make_pulse())
    with pytest.raises(ValueError):
        evolve(profile, tol=1e-13)
    with pytest.raises(ValueError):
        evolve(profile, tol=1e-5)
    with pytest.raises(ValueError):
        evolve(profile, t_start=0.0, t_end=11.0)
    with pytest.raises(ValueError):
        evolve(profile, t_start=5.0, t_end=5.0)


def test_evolve_is_unitary_and_composes():
    profile = DetuningProfile.from_pulse(make_pulse(coupling=0.6))
    full = evolve(profile, tol=1e-8)
    assert unitarity_defect(full) < 1e-12
    first = evolve(profile, t_end=-1.3, tol=1e-8)
    second = evolve(profile, t_start=-1.3, tol=1e-8)
    assert np.abs(second @ first - full).max() < 5e-8


def test_evolve_tolerances_are_consistent():
    profile = DetuningProfile.from_pulse(make_pulse(coupling=0.5))
    coarse = evolve(profile, tol=1e-6)
    fine = evolve(profile, tol=1e-9)
    assert np.abs(coarse - fine).max() < 2e-6


def test_evolve_agrees_with_closed_form_gate():
    pulse = make_pulse(coupling=0.5)
    u = evolve(DetuningProfile.from_pulse(pulse), tol=1e-8)
    s = to_adiabatic(u, 10.0, -10.0, 0.5)
    assert np.abs(s - scattering_matrix(pulse)).max() < 1e-2


# -------------------------------------------------------------- to_adiabatic


def test_to_adiabatic_inverts_the_frame_sandwich():
    rng = np.random.default_rng(5)
    m = rz(rng.uniform(-3, 3)) @ np.array(
        [[0.6, 0.8j], [0.8j, 0.6]], dtype=complex
    )
    v_i = adiabatic_frame(7.0, 1.2).basis_matrix
    v_f = adiabatic_frame(-9.0, 1.2).basis_matrix
    computational = v_f @ m @ v_i.conj().T
    recovered = to_adiabatic(computational, 7.0, -9.0, 1.2)
    assert np.abs(recovered - m).max() < 1e-14


def test_to_adiabatic_accepts_distinct_couplings():
    u = np.eye(2, dtype=complex)
    a = to_adiabatic(u, 5.0, -5.0, 1.0, 2.0)
    v_i = adiabatic_frame(5.0, 1.0).basis_matrix
    v_f = adiabatic_frame(-5.0, 2.0).basis_matrix
    assert np.abs(a - v_f.conj().T @ v_i).max() < 1e-15


# ------------------------------------------------------------ crossing trace


def test_crossing_trace_validation():
    pulse = make_pulse(coupling=0.47)
    with pytest.raises(ValueError):
        crossing_trace(pulse, basis="diabatic")
    with pytest.raises(ValueError):
        crossing_trace(pulse, n_samples=1)
    with pytest.raises(ValueError):
        crossing_trace(pulse, tol=0.0)


def test_crossing_trace_adiabatic_endpoints():
    pulse = make_pulse(coupling=0.47)
    trace = crossing_trace(pulse, n_samples=41, tol=1e-6)
    assert trace.basis == "adiabatic"
    assert len(trace.times) == 41
    assert trace.times[0] == pulse.time_start
    assert trace.times[-1] == pulse.time_end
    # starts in the tracked frame state, ends at the hop probability
    assert trace.occupations[0] < 1e-20
    expected = transition_probability(pulse.adiabaticity)
    assert trace.occupations[-1] == pytest.approx(expected, abs=1e-3)


def test_crossing_trace_flag_window():
    pulse = make_pulse(coupling=0.47)
    trace = crossing_trace(pulse, n_samples=41, tol=1e-4)
    # default window 2 max(coupling, sqrt(rate)) = 2, grid spacing 0.5,
    # |detuning| = |t|: strictly inside gives t in {-1.5, ..., 1.5}
    assert int(trace.near_crossing.sum()) == 7
    wide = crossing_trace(pulse, n_samples=41, tol=1e-4, flag_window=100.0)
    assert bool(wide.near_crossing.all())


def test_crossing_trace_computational_basis():
    pulse = make_pulse(coupling=0.47)
    trace = crossing_trace(pulse, basis="computational", n_samples=41, tol=1e-6)
    # the initial frame state carries a bare |1> weight of sin^2(theta/2),
    # about (coupling / detuning)^2 at the endpoint, and the final bare
    # occupation matches the hop probability to the same accuracy
    assert trace.occupations[0] == pytest.approx((0.47 / 10.0) ** 2, rel=0.01)
    expected = transition_probability(pulse.adiabaticity)
    assert trace.occupations[-1] == pytest.approx(expected, abs=5e-3)
