"""Oscillator coupled to a 1D massless scalar-field vacuum: stationary state,
thermometer reading and oscillator-field correlations, with a lattice oracle."""

from .correlations import commutator_residual, correlation_profile, decay_rate_fit, qphi_symmetric
from .gaussian_state import (
    ThermalDiagnostics,
    diagnose,
    effective_temperature,
    entropy,
    normal_form_frequency,
    symplectic_invariant,
)
from .lattice_oracle import LatticeConfig, extract_report, run_lattice
from .model import ModelParams, Regime, classify_regime, validate
from .quadrature import QuadResult, integrate, integrate_phase
from .spectral_moments import (
    Covariance2,
    autocorrelation_q,
    closed_forms_report,
    covariance,
    moment_pp,
    moment_qp,
    moment_qq,
)
from .thermometer import ThermometerResult, extrapolate_mu_to_zero, thermometer_moments

__version__ = "0.1.0"

__all__ = [
    "Covariance2",
    "LatticeConfig",
    "ModelParams",
    "QuadResult",
    "Regime",
    "ThermalDiagnostics",
    "ThermometerResult",
    "autocorrelation_q",
    "classify_regime",
    "closed_forms_report",
    "commutator_residual",
    "correlation_profile",
    "covariance",
    "decay_rate_fit",
    "diagnose",
    "effective_temperature",
    "entropy",
    "extract_report",
    "extrapolate_mu_to_zero",
    "integrate",
    "integrate_phase",
    "moment_pp",
    "moment_qp",
    "moment_qq",
    "normal_form_frequency",
    "qphi_symmetric",
    "run_lattice",
    "symplectic_invariant",
    "thermometer_moments",
    "validate",
]
