"""Core primitives: rotations, norms, unitarity checks, log-gamma on the
imaginary axis, and the instantaneous eigenframe container.

The log-gamma reference values were frozen from a 40-digit mpmath
evaluation (mpmath.loggamma(1j * y)) so the test does not depend on mpmath
being installed.
"""

import math

import numpy as np
import pytest

from lzgates import (
    AdiabaticFrame,
    check_unitary,
    log_gamma_imag,
    rx,
    rz,
    spectral_norm,
    unitarity_defect,
)
from lzgates.core import IDENTITY, PAULI_X, PAULI_Y, PAULI_Z


def test_pauli_algebra():
    assert np.allclose(PAULI_X @ PAULI_X, IDENTITY)
    assert np.allclose(PAULI_Y @ PAULI_Y, IDENTITY)
    assert np.allclose(PAULI_Z @ PAULI_Z, IDENTITY)
    assert np.allclose(PAULI_X @ PAULI_Y, 1j * PAULI_Z)


def test_rz_explicit_entries():
    phi = 0.7318
    m = rz(phi)
    assert m[0, 1] == 0 and m[1, 0] == 0
    assert m[0, 0] == pytest.approx(np.exp(-0.5j * phi), abs=1e-15)
    assert m[1, 1] == pytest.approx(np.exp(0.5j * phi), abs=1e-15)


def test_rx_explicit_entries():
    alpha = 1.234
    m = rx(alpha)
    assert m[0, 0] == pytest.approx(math.cos(0.5 * alpha), abs=1e-15)
    assert m[0, 1] == pytest.approx(-1j * math.sin(0.5 * alpha), abs=1e-15)
    assert m[1, 0] == m[0, 1]
    assert m[1, 1] == m[0, 0]


def test_rotations_compose_additively():
    rng = np.random.default_rng(7)
    a, b = rng.uniform(-6, 6, size=2)
    assert np.allclose(rz(a) @ rz(b), rz(a + b), atol=1e-14)
    assert np.allclose(rx(a) @ rx(b), rx(a + b), atol=1e-14)
    assert np.allclose(rz(0.0), IDENTITY)
    # full turn is minus the identity for a half-integer spin
    assert np.allclose(rx(2.0 * math.pi), -IDENTITY, atol=1e-15)


def test_spectral_norm_known_values():
    assert spectral_norm(np.zeros((2, 2))) == 0.0
    assert spectral_norm(np.diag([3.0, -1.0])) == pytest.approx(3.0, rel=1e-15)
    # nilpotent: singular values are 2 and 0
    assert spectral_norm(np.array([[0.0, 2.0], [0.0, 0.0]])) == pytest.approx(2.0)
    assert spectral_norm(rz(0.9) @ rx(0.4)) == pytest.approx(1.0, rel=1e-14)


def test_spectral_norm_matches_numpy_on_random_matrices():
    rng = np.random.default_rng(42)
    for _ in range(50):
        m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        assert spectral_norm(m) == pytest.approx(np.linalg.norm(m, 2), rel=1e-13)


def test_spectral_norm_keeps_precision_for_unitary_differences():
    # Differences of nearby unitaries have two nearly equal singular values;
    # the norm must still resolve them to full precision.  Compare against
    # the exact norm of rz(s) - I, which is 2|sin(s/4)|.
    for s in (1e-3, 1e-6, 1e-9):
        measured = spectral_norm(rz(s) - IDENTITY)
        assert measured == pytest.approx(2.0 * abs(math.sin(0.25 * s)), rel=1e-10)


def test_spectral_norm_rejects_bad_input():
    with pytest.raises(ValueError):
        spectral_norm(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        spectral_norm(np.array([[np.nan, 0.0], [0.0, 0.0]]))


def test_unitarity_defect_and_check():
    u = rz(0.3) @ rx(1.1)
    assert unitarity_defect(u) < 1e-15
    scaled = 1.01 * np.eye(2)
    assert unitarity_defect(scaled) == pytest.approx(1.01**2 - 1.0, rel=1e-12)
    check_unitary(u)
    with pytest.raises(ValueError):
        check_unitary(scaled)
    # looser tolerance accepts the same matrix
    check_unitary(scaled, tol=0.05)


# (y, Re log Gamma(iy), Im log Gamma(iy)), frozen from mpmath at 40 digits
LOG_GAMMA_TABLE = [
    (1e-4, 9.2103403637515124289, -1.5708540483609860869),
    (0.01, 4.6050879419903874964, -1.576568082779014676),
    (0.09, 2.4013012889151530142, -1.6224548545524948518),
    (0.25, 1.3359075563978843796, -1.7090336669361382225),
    (1.0, -0.65092319930185633889, -1.8724366472624298171),
    (2.25, -3.0208179477182518469, -1.2481028993071134088),
    (4.0, -6.0573939545287782662, 0.73890172977763834089),
    (9.0, -14.316840696617506523, 9.9803599494072781128),
    (16.0, -25.600097056633563785, 27.57081238017820121),
]


@pytest.mark.parametrize("y, re_expected, im_expected", LOG_GAMMA_TABLE)
def test_log_gamma_imag_frozen_values(y, re_expected, im_expected):
    value = log_gamma_imag(y)
    assert value.real == pytest.approx(re_expected, rel=1e-13)
    assert value.imag == pytest.approx(im_expected, rel=1e-13)


def test_log_gamma_imag_modulus_identity():
    # |Gamma(iy)|^2 = pi / (y sinh(pi y)), a reflection-formula consequence
    for y in (0.04, 0.5, 1.0, 5.0):
        measured = math.exp(2.0 * log_gamma_imag(y).real)
        expected = math.pi / (y * math.sinh(math.pi * y))
        assert measured == pytest.approx(expected, rel=1e-12)


def test_log_gamma_imag_at_unit_argument():
    value = log_gamma_imag(1.0)
    assert math.exp(value.real) == pytest.approx(0.52156404686493984116, rel=1e-14)
    assert value.imag == pytest.approx(-1.8724366472624298171, rel=1e-14)


def test_log_gamma_imag_rejects_nonpositive():
    with pytest.raises(ValueError):
        log_gamma_imag(0.0)
    with pytest.raises(ValueError):
        log_gamma_imag(-1.0)
    with pytest.raises(ValueError):
        log_gamma_imag(float("nan"))


def test_adiabatic_frame_columns_are_orthonormal():
    frame = AdiabaticFrame(energy=2.5, mixing_angle=0.8)
    v = frame.basis_matrix
    assert np.allclose(v.conj().T @ v, IDENTITY, atol=1e-15)
    assert np.allclose(v[:, 0], frame.state_lower_index)
    assert np.allclose(v[:, 1], frame.state_upper_index)


def test_adiabatic_frame_identity_at_zero_mixing():
    frame = AdiabaticFrame(energy=1.0, mixing_angle=0.0)
    assert np.allclose(frame.basis_matrix, IDENTITY)
