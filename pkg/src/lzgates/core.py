"""Small dense building blocks shared by every layer of the package.

Everything here works on plain 2x2 complex numpy arrays: Pauli matrices,
z/x rotations, a closed-form spectral norm, and the log-gamma function on
the imaginary axis that the sweep scattering amplitudes need.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

IDENTITY = np.eye(2, dtype=complex)
PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

# Lanczos coefficients, g = 7, n = 9 (Godfrey's set, widely reprinted).
_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
# Recurrence shift applied before the Lanczos evaluation; Re(z) = 8 keeps the
# series deep inside its region of full double accuracy.
_AXIS_SHIFT = 8


def rz(angle: float) -> np.ndarray:
    """Rotation exp(-i*angle*Z/2) about the z axis."""
    half = 0.5 * angle
    return np.array(
        [[cmath.exp(-1j * half), 0.0], [0.0, cmath.exp(1j * half)]], dtype=complex
    )


def rx(angle: float) -> np.ndarray:
    """Rotation exp(-i*angle*X/2) about the x axis."""
    c = math.cos(0.5 * angle)
    s = math.sin(0.5 * angle)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def spectral_norm(m: np.ndarray) -> float:
    """Largest singular value of a 2x2 matrix.

    Computed by LAPACK's SVD rather than the trace/determinant closed form:
    the closed form cancels catastrophically when the two singular values
    nearly coincide, which is the generic situation for a difference of two
    unitaries, and that cancellation costs half the significant digits.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m.view(float))):
        raise ValueError("matrix entries must be finite")
    return float(np.linalg.svd(m, compute_uv=False)[0])


def unitarity_defect(m: np.ndarray) -> float:
    """Spectral-norm distance of m^dag m from the identity."""
    m = np.asarray(m, dtype=complex)
    return spectral_norm(m.conj().T @ m - IDENTITY)


def check_unitary(m: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Validate that m is unitary to within tol; returns m unchanged."""
    defect = unitarity_defect(m)
    if defect > tol:
        raise ValueError(f"matrix is not unitary: defect {defect:.3e} > {tol:.3e}")
    return np.asarray(m, dtype=complex)


def log_gamma_imag(y: float) -> complex:
    """log Gamma(i*y) for real y > 0, on the branch analytic in the upper half plane.

    Uses the recurrence log Gamma(z) = log Gamma(z + n) - sum log(z + k) to move
    the argument to Re(z) = 8, where a fixed Lanczos approximation holds to
    full double precision.  For y > 0 every factor stays in the upper half
    plane, so the principal logs never wrap and the result is the analytic
    continuation of the real log-gamma.
    """
    y = float(y)
    if not math.isfinite(y) or y <= 0.0:
        raise ValueError(f"log_gamma_imag requires y > 0, got {y}")
    z = complex(0.0, y)
    shift = 0.0 + 0.0j
    for k in range(_AXIS_SHIFT):
        shift += cmath.log(z + k)
    w = z + _AXIS_SHIFT
    series = _LANCZOS_COEFFS[0]
    for i, c in enumerate(_LANCZOS_COEFFS[1:], start=1):
        series += c / (w - 1.0 + i)
    t = w + _LANCZOS_G - 0.5
    log_shifted = (
        0.5 * math.log(2.0 * math.pi)
        + (w - 0.5) * cmath.log(t)
        - t
        + cmath.log(series)
    )
    return log_shifted - shift


@dataclass(frozen=True)
class AdiabaticFrame:
    """Instantaneous two-level eigenframe at detuning delta and coupling gamma.

    energy is E = sqrt(delta^2/4 + gamma^2) and mixing_angle is
    theta = sgn(delta) * arccos(|delta| / 2E).  The frame states coincide with
    the bare computational states as |delta|/gamma -> infinity, and theta jumps
    by pi across delta = 0, which is why delta = 0 is outside the domain.
    """

    energy: float
    mixing_angle: float

    @property
    def state_lower_index(self) -> np.ndarray:
        """Frame state that continues the bare |0> at large |delta|."""
        half = 0.5 * self.mixing_angle
        return np.array([math.cos(half), math.sin(half)], dtype=complex)

    @property
    def state_upper_index(self) -> np.ndarray:
        """Frame state that continues the bare |1> at large |delta|."""
        half = 0.5 * self.mixing_angle
        return np.array([-math.sin(half), math.cos(half)], dtype=complex)

    @property
    def basis_matrix(self) -> np.ndarray:
        """Real orthogonal matrix whose columns are the two frame states."""
        half = 0.5 * self.mixing_angle
        c, s = math.cos(half), math.sin(half)
        return np.array([[c, -s], [s, c]], dtype=complex)
