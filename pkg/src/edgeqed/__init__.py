"""Waveguide QED at a band edge: pulse design, propagation, and emission."""

from .errors import (
    ConfigError,
    DesignError,
    DomainError,
    EdgeQEDError,
    GridError,
    ToleranceError,
)
from .model import (
    KGrid,
    TimeGrid,
    WaveguideModel,
    calibrate_coupling,
    calibrated_model,
    detuning_of_k,
    dipole_to_rate,
    dos,
    group_velocity,
    group_velocity_of_k,
    k_of_detuning,
    k_of_omega,
    markovian_rate,
    omega_of_k,
)
from .wavepacket import SpectralWavepacket, overlap, sech_wavepacket
from .pulse_design import (
    ControlPulse,
    DesignRecord,
    ThreeLevelNode,
    c1_reconstruct,
    c2_history,
    c3_from_target,
    design_receiving_pulse,
    design_sending_pulse,
    design_sending_pulse_markovian,
    pulse_distance,
)
from .propagate import (
    Trajectory,
    population_traces,
    propagate_receiving,
    propagate_sending,
    sending_fidelity,
)
from .emission import (
    BoundState,
    EmissionResult,
    FieldSnapshot,
    SelfEnergyCurve,
    TwoLevelParams,
    TwoLevelTrajectory,
    bound_state,
    delta_band_limited,
    delta_closed_form,
    delta_numeric,
    excited_amplitude,
    field_snapshot,
    gamma_of_omega,
    propagate_two_level,
    self_energy_curve,
    snapshots_from_trajectory,
    spectral_function,
    weisskopf_wigner,
)
from .units import C_UM_PER_PS, HBAR_MEV_PS

__version__ = "0.1.0"
