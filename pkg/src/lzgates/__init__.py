"""Fault-tolerant single-qubit gates from linear detuning sweeps.

The library designs pulses that sweep a two-level system through its
avoided crossing, derives their asymptotic scattering matrices in the
adiabatic basis, assembles the error-compensating three-pulse composite,
and cross-checks everything against direct numerical propagation.
"""

from .analytic import (
    LinearSweepPulse,
    RotationDecomposition,
    adiabatic_frame,
    adiabatic_phase,
    phase_offset_perturbative,
    phase_shift_exact,
    rotation_angles,
    rotation_decomposition,
    rotation_form,
    scattering_matrix,
    transition_probability,
)
from .composite import (
    CompositeSequence,
    PiPulseSpec,
    compose,
    composite_profile,
    corrected_phase_error,
    design_composite,
    design_pi_pulse,
    pi_pulse_matrix_approx,
    quantize_working_pulse,
    working_quantization_defect,
)
from .core import (
    AdiabaticFrame,
    check_unitary,
    log_gamma_imag,
    rx,
    rz,
    spectral_norm,
    unitarity_defect,
)
from .error import (
    ErrorSweepRow,
    composite_error_analytic,
    error_sweep,
    gate_error,
    loglog_slope,
    uncorrected_error_analytic,
)
from .propagator import (
    ConvergenceError,
    CrossingTrace,
    DetuningProfile,
    ProfileSegment,
    crossing_trace,
    evolve,
    to_adiabatic,
)

__version__ = "0.1.0"

__all__ = [
    "AdiabaticFrame",
    "CompositeSequence",
    "ConvergenceError",
    "CrossingTrace",
    "DetuningProfile",
    "ErrorSweepRow",
    "LinearSweepPulse",
    "PiPulseSpec",
    "ProfileSegment",
    "RotationDecomposition",
    "adiabatic_frame",
    "adiabatic_phase",
    "check_unitary",
    "compose",
    "composite_error_analytic",
    "composite_profile",
    "corrected_phase_error",
    "crossing_trace",
    "design_composite",
    "design_pi_pulse",
    "error_sweep",
    "evolve",
    "gate_error",
    "log_gamma_imag",
    "loglog_slope",
    "phase_offset_perturbative",
    "phase_shift_exact",
    "pi_pulse_matrix_approx",
    "quantize_working_pulse",
    "rotation_angles",
    "rotation_decomposition",
    "rotation_form",
    "rx",
    "rz",
    "scattering_matrix",
    "spectral_norm",
    "to_adiabatic",
    "transition_probability",
    "uncorrected_error_analytic",
    "unitarity_defect",
    "working_quantization_defect",
]
