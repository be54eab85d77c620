"""Coherence-enhanced Raman generation in a three-level Lambda medium.

Density-matrix dynamics of a driven Lambda atom, shaped-pulse sequence
construction (full and fractional adiabatic passage), 1-D Maxwell-Bloch
co-propagation in retarded coordinates, and scripted delay/density/power
scans of the generated Raman signal.
"""

__version__ = "0.1.0"

from .bloch import (
    A,
    B,
    C,
    AtomSpec,
    FieldSample,
    StabilityError,
    bloch_derivative,
    build_hamiltonian,
    coherent_ground_state,
    dark_state,
    decay_free,
    evolve,
    ground_mixture,
    pure_state,
)
from .experiments import (
    FitResult,
    ScanResult,
    SignalWindow,
    extract_signal_amplitude,
    fit_power_law,
    run_delay_scan,
    run_density_scan,
    run_power_scan,
)
from .propagation import (
    MediumSpec,
    PropagationGrid,
    PropagationResult,
    coupling_constant,
    propagate,
)
from .pulses import (
    AdiabaticityMetric,
    ChannelEnvelope,
    PulseSpec,
    SequenceSpec,
    adiabaticity_metric,
    build_channel_envelopes,
    eval_pulse,
    experiment_sequence,
    fstirap_sequence,
    gaussian,
    smoothed_square,
    stirap_sequence,
)

__all__ = [
    "A", "B", "C",
    "AtomSpec", "FieldSample", "StabilityError",
    "bloch_derivative", "build_hamiltonian", "coherent_ground_state",
    "dark_state", "decay_free", "evolve", "ground_mixture", "pure_state",
    "AdiabaticityMetric", "ChannelEnvelope", "PulseSpec", "SequenceSpec",
    "adiabaticity_metric", "build_channel_envelopes", "eval_pulse",
    "experiment_sequence", "fstirap_sequence", "gaussian",
    "smoothed_square", "stirap_sequence",
    "MediumSpec", "PropagationGrid", "PropagationResult",
    "coupling_constant", "propagate",
    "FitResult", "ScanResult", "SignalWindow",
    "extract_signal_amplitude", "fit_power_law",
    "run_delay_scan", "run_density_scan", "run_power_scan",
]
