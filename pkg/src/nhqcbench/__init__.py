"""Pulse-level simulator and robustness benchmark for holonomic quantum gates."""

from .system import (
    DriveSegment,
    ErrorModel,
    GateAngles,
    GeneratorSegment,
    LevelSystem,
    PulseSchedule,
    SchemeSpec,
    bright_dark_basis,
    hamiltonian_at,
)
from .schemes import (
    SCHEME_LABELS,
    brachistochrone_tau,
    build_schedule,
    circle_path_params,
    dfs3_schedule,
    inverse_engineer_hamiltonian,
    ps_design,
    rotation_gate,
    sta_schedule,
)
from .dynamics import (
    Trajectory,
    oracle_propagate_lindblad,
    oracle_propagate_unitary,
    propagate_lindblad,
    propagate_unitary,
)
from .holonomy import (
    AuxiliaryFrame,
    ConnectionPair,
    condition_residuals,
    frame_connection,
    holonomy_reconstruct,
)
from .bench import (
    GateReport,
    SweepResult,
    benchmark_catalog,
    fit_leading_order,
    lindblad_gate_fidelity,
    overlap_gate_fidelity,
    peak_excited_population,
    pulse_area,
    sweep,
    unitary_gate_fidelity,
)

__all__ = [
    "AuxiliaryFrame",
    "ConnectionPair",
    "DriveSegment",
    "ErrorModel",
    "GateAngles",
    "GateReport",
    "GeneratorSegment",
    "LevelSystem",
    "PulseSchedule",
    "SCHEME_LABELS",
    "SchemeSpec",
    "SweepResult",
    "Trajectory",
    "benchmark_catalog",
    "brachistochrone_tau",
    "bright_dark_basis",
    "build_schedule",
    "circle_path_params",
    "condition_residuals",
    "dfs3_schedule",
    "fit_leading_order",
    "frame_connection",
    "hamiltonian_at",
    "holonomy_reconstruct",
    "inverse_engineer_hamiltonian",
    "lindblad_gate_fidelity",
    "oracle_propagate_lindblad",
    "oracle_propagate_unitary",
    "overlap_gate_fidelity",
    "peak_excited_population",
    "propagate_lindblad",
    "propagate_unitary",
    "ps_design",
    "pulse_area",
    "rotation_gate",
    "sta_schedule",
    "sweep",
    "unitary_gate_fidelity",
]

__version__ = "0.1.0"
