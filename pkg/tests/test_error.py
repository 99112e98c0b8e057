"""Gate-error metrics and the offset-robustness sweep."""

import math

import numpy as np
import pytest

from lzgates import (
    ErrorSweepRow,
    compose,
    composite_error_analytic,
    design_composite,
    error_sweep,
    gate_error,
    loglog_slope,
    quantize_working_pulse,
    rx,
    rz,
    uncorrected_error_analytic,
)


@pytest.fixture(scope="module")
def seq():
    return design_composite(quantize_working_pulse(1.0, 10.0), 3.0)


# ---------------------------------------------------------------- gate_error


def test_gate_error_basics():
    u = rz(0.4) @ rx(1.3)
    assert gate_error(u, u) == 0.0
    assert gate_error(-u, u, negate=True) == 0.0
    # a global phase moves every singular value of the difference equally
    delta = 0.37
    shifted = np.exp(1j * delta) * u
    assert gate_error(shifted, u) == pytest.approx(
        2.0 * abs(math.sin(0.5 * delta)), rel=1e-12
    )


def test_gate_error_rejects_nonunitary_input():
    u = rx(0.5)
    with pytest.raises(ValueError):
        gate_error(1.01 * u, u)
    with pytest.raises(ValueError):
        gate_error(u, 1.01 * u)


# ------------------------------------------------------- closed-form metrics


def test_uncorrected_error_zeros_and_symmetry():
    assert uncorrected_error_analytic(0.0, 0.0, 1.0) == 0.0
    # swapping the shifts leaves the error unchanged
    assert uncorrected_error_analytic(0.2, -0.5, 1.1) == pytest.approx(
        uncorrected_error_analytic(-0.5, 0.2, 1.1), rel=1e-15
    )


def test_uncorrected_error_equal_shifts():
    for s, angle in ((0.3, 1.0), (1e-8, 2.5), (0.7, 3.0)):
        expected = 2.0 * abs(math.sin(s)) * math.sin(0.5 * angle)
        assert uncorrected_error_analytic(s, s, angle) == pytest.approx(
            expected, rel=1e-12
        )


def test_uncorrected_error_matches_the_matrix_model():
    # the shifts enter the gate as rz(2 * shift) factors around the rotation
    rng = np.random.default_rng(17)
    for _ in range(200):
        s1, s2 = rng.uniform(-1.5, 1.5, size=2)
        angle = rng.uniform(0.1, 3.1)
        gate = rz(2.0 * s2) @ rx(angle) @ rz(-2.0 * s1)
        measured = gate_error(gate, rx(angle))
        assert measured == pytest.approx(
            uncorrected_error_analytic(s1, s2, angle), abs=1e-12
        )


def test_composite_error_analytic_matches_perturbative_compose(seq):
    # with matched methods the only error channel is the injected phases,
    # so the closed form and the matrix distance must coincide
    ideal = rx(seq.rotation_angle)
    gamma = seq.working.coupling
    for ratio in (1e-3, 1e-2, 1e-1, 1.0):
        analytic = composite_error_analytic(seq, ratio * gamma, "perturbative")
        matrix = gate_error(
            compose(seq, ratio * gamma, "perturbative"), ideal, negate=True
        )
        assert abs(analytic - matrix) < 1e-10


def test_composite_error_analytic_exact_is_tiny_at_zero(seq):
    assert composite_error_analytic(seq, 0.0) < 1e-10
    # continuity: far below the designed-away orders the error is cubic
    gamma = seq.working.coupling
    assert composite_error_analytic(seq, 1e-6 * gamma) < 1e-12


# --------------------------------------------------------------- error_sweep


def test_error_sweep_default_grid(seq):
    rows = error_sweep(1.0, 10.0)
    assert len(rows) == 60
    assert isinstance(rows[0], ErrorSweepRow)
    assert rows[0].offset_ratio == pytest.approx(1e-3)
    assert rows[-1].offset_ratio == pytest.approx(1.0)
    assert all(r.mode == "exact" for r in rows)
    # offsets are the ratios scaled by the working coupling (here 1)
    for row in rows[:5]:
        assert row.offset == pytest.approx(row.offset_ratio * seq.working.coupling)


def test_error_sweep_rejects_unknown_mode():
    with pytest.raises(ValueError):
        error_sweep(1.0, 10.0, mode="adaptive")


def test_error_sweep_composite_beats_single_at_small_offsets():
    ratios = tuple(np.logspace(-3, -1, 8))
    for g in (0.3, 1.0, 2.0):
        rows = error_sweep(g, 10.0, offset_ratios=ratios)
        assert all(r.error_composite < r.error_single for r in rows)
        # both errors grow with the offset over this range
        singles = [r.error_single for r in rows]
        composites = [r.error_composite for r in rows]
        assert singles == sorted(singles)
        assert composites == sorted(composites)


def test_error_sweep_large_offset_crossover():
    # at offsets of order the coupling, stronger-coupling working pulses
    # keep less of their advantage: the cubic term carries a g^2 factor
    weak = error_sweep(0.3, 10.0, offset_ratios=(1.0,))[0]
    strong = error_sweep(2.0, 10.0, offset_ratios=(1.0,))[0]
    assert strong.error_composite > weak.error_composite
    assert weak.error_composite < 2e-3


def test_error_sweep_perturbative_mode_matches_exact_at_small_offset():
    ratios = (1e-3, 1e-2)
    exact = error_sweep(1.0, 10.0, offset_ratios=ratios)
    pert = error_sweep(1.0, 10.0, offset_ratios=ratios, mode="perturbative")
    for a, b in zip(exact, pert):
        assert b.mode == "perturbative"
        assert a.error_single == pytest.approx(b.error_single, rel=1e-3)
        # the composite responses differ only at cubic order, far below
        # either value at these offsets
        assert abs(a.error_composite - b.error_composite) < 1e-8


def test_error_sweep_numeric_mode_runs():
    rows = error_sweep(1.0, 10.0, offset_ratios=(0.1,), mode="numeric", tol=1e-6)
    (row,) = rows
    assert row.mode == "numeric"
    # numeric errors carry the switching residual on top of the designed
    # response, so only loose agreement with the closed form is expected
    exact_row = error_sweep(1.0, 10.0, offset_ratios=(0.1,))[0]
    assert row.error_single == pytest.approx(exact_row.error_single, abs=1e-2)
    assert abs(row.error_composite - exact_row.error_composite) < 5e-2


# -------------------------------------------------------------- loglog_slope


def test_loglog_slope_recovers_power_laws():
    x = np.logspace(-3, 0, 40)
    assert loglog_slope(x, 5.0 * x**2) == pytest.approx(2.0, abs=1e-10)
    assert loglog_slope(x, 0.1 * x**3, window=(1e-3, 1e-1)) == pytest.approx(
        3.0, abs=1e-10
    )


def test_loglog_slope_window_semantics():
    x = np.array([1e-3, 1e-2, 1e-1, 1.0])
    y = x**1.5
    # edge points are kept despite roundoff on the window boundaries
    assert loglog_slope(x, y, window=(1e-3, 1e-1)) == pytest.approx(1.5)
    with pytest.raises(ValueError):
        loglog_slope(x, y, window=(2e-3, 5e-2))  # one point survives
    # zero values are dropped rather than passed to the log
    y2 = y.copy()
    y2[0] = 0.0
    with pytest.raises(ValueError):
        loglog_slope(x, y2, window=(1e-3, 1e-1))
