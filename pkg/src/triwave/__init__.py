"""Classical simulation and pulse compilation of cubic three-wave interactions."""

__version__ = "0.1.0"

from .action_space import (  # noqa: E402
    SubspaceSpec,
    TriHamiltonian,
    basis_fock_state,
    build_hamiltonian,
    make_subspace,
    moment,
    occupations,
    three_level_hamiltonian,
)
from .dynamics import (  # noqa: E402
    ClassicalState,
    classical_curvature,
    classical_threewave,
    evolve_state,
    expm_tridiagonal,
    quantum_curvature,
    repeated_application,
    unitary_3level,
)
from .gate_decomposer import embed_two_qubit, givens_decompose, noisy_sequence_channel  # noqa: E402
from .open_system import (  # noqa: E402
    ConfigError,
    HardwareModel,
    PulseEnvelope,
    control_hamiltonian,
    default_model,
    evolve_master,
    load_hardware_model,
    populations,
)
from .pulse_control import (  # noqa: E402
    CompiledGate,
    OptimizationConfig,
    average_gate_fidelity,
    grape_optimize,
    interpolate_pulse,
    interpolation_family_target,
    simulate_gate_repetition,
    state_fidelity,
    unitary_overlap_error,
)
