"""Spontaneous-emission dynamics of a strongly driven two-level emitter.

The package models an emitter whose transition frequency far exceeds both
the decay rate and the drive frequency, while the drive amplitude may be a
sizable fraction of the transition frequency.  In a frame that follows the
instantaneous field the decay acquires a periodic modulation built from
Bessel-weighted multiphoton sidebands; the lab-frame population can then
decay faster than the bare exponential law.  A conventional quantum-optics
master equation (drive in the Hamiltonian, bare dissipator) is included as
the reference model.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import (
    InvariantBreach,
    NumericalFailure,
    QudecayError,
    RegimeError,
    ResourceLimit,
)
from .params import (
    DerivedParams,
    DriveParams,
    ModelOrder,
    derive,
    drive_phase,
    gen_rabi_exact,
    gen_rabi_series,
    shifted_frequency,
    theta,
)
from .bessel import bessel_j, bessel_jn_all
from .rates import (
    HarmonicSpectrum,
    TruncationPolicy,
    chi_order2,
    chi_order8,
    gamma_bar,
    gamma_t,
    harmonic_amplitudes,
    select_truncation,
)
from .dynamics import (
    QubitState,
    SpinOps,
    Trajectory,
    analytic_limit,
    evolve,
    exponential_law,
    h0_coherent,
    initial_state,
    lindblad_rhs,
    sz_lab,
)
from .scenarios import (
    ComparisonReport,
    ScenarioPreset,
    SweepPoint,
    compare,
    departure_metric,
    preset,
    preset_names,
    run,
    sweep,
)

__all__ = [
    "__version__",
    "QudecayError", "RegimeError", "NumericalFailure", "InvariantBreach",
    "ResourceLimit",
    "DriveParams", "DerivedParams", "ModelOrder", "derive", "theta",
    "drive_phase", "gen_rabi_exact", "gen_rabi_series", "shifted_frequency",
    "bessel_j", "bessel_jn_all",
    "TruncationPolicy", "HarmonicSpectrum", "select_truncation",
    "chi_order2", "chi_order8", "harmonic_amplitudes", "gamma_t", "gamma_bar",
    "QubitState", "SpinOps", "Trajectory", "initial_state", "evolve",
    "lindblad_rhs", "h0_coherent", "sz_lab", "exponential_law",
    "analytic_limit",
    "ScenarioPreset", "ComparisonReport", "SweepPoint", "preset",
    "preset_names", "run", "compare", "sweep", "departure_metric",
]
