"""Dark-pathway pulse design and open-system simulation for bus-coupled qubits."""

from darkpath.config import ConfigError, RunConfig
from darkpath.dynamics import (
    NumericalContractError,
    SimulationResult,
    fidelity,
    propagate_lindblad,
    propagate_schrodinger,
)
from darkpath.model import BasisIndex, ErrorModel, NoiseModel, collapse_operators, hamiltonian
from darkpath.optimize import TimeCurve, dimensionless_peak, optimal_amplitude, time_curve
from darkpath.pulse_design import (
    GammaPoint,
    PathwayReport,
    ProtocolKind,
    ProtocolSpec,
    PulseSchedule,
    coupling_matrix,
    couplings_all_qubit,
    couplings_two_qubit,
    dark_state,
    dark_state_trajectory,
    gamma_all_qubit,
    gamma_two_qubit,
    required_theta,
    synthesize,
    verify_pathway,
)
from darkpath.scans import ScanGrid, scan_decoherence, scan_x_error, scan_z_error, sweep_qubit_count
from darkpath.transmon import (
    DriveWaveform,
    InfeasibleDriveError,
    TransmonParams,
    design_physical,
    full_hamiltonian,
    invert_bessel,
    simulate_physical,
)

__version__ = "0.1.0"

__all__ = [
    "BasisIndex",
    "ConfigError",
    "DriveWaveform",
    "ErrorModel",
    "GammaPoint",
    "InfeasibleDriveError",
    "NoiseModel",
    "NumericalContractError",
    "PathwayReport",
    "ProtocolKind",
    "ProtocolSpec",
    "PulseSchedule",
    "RunConfig",
    "ScanGrid",
    "SimulationResult",
    "TimeCurve",
    "TransmonParams",
    "collapse_operators",
    "coupling_matrix",
    "couplings_all_qubit",
    "couplings_two_qubit",
    "dark_state",
    "dark_state_trajectory",
    "design_physical",
    "dimensionless_peak",
    "fidelity",
    "full_hamiltonian",
    "gamma_all_qubit",
    "gamma_two_qubit",
    "hamiltonian",
    "invert_bessel",
    "optimal_amplitude",
    "propagate_lindblad",
    "propagate_schrodinger",
    "required_theta",
    "scan_decoherence",
    "scan_x_error",
    "scan_z_error",
    "simulate_physical",
    "sweep_qubit_count",
    "synthesize",
    "time_curve",
    "verify_pathway",
    "__version__",
]
