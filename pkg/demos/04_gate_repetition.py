"""Repeat the cubic gate many times: exact, one-pulse-per-gate and gate-sequence paths.

The sequence path decomposes the gate into two-level rotations and applies
a depolarizing error after each; its error rate is matched per native
gate to the pulse-level gate.  This noise model is illustrative only.
"""

import numpy as np

from triwave import OptimizationConfig, default_model, grape_optimize, simulate_gate_repetition, unitary_3level
from triwave.dynamics import repeated_states
from triwave.gate_decomposer import NATIVE_PER_ROTATION, embed_two_qubit, givens_decompose, noisy_sequence_channel
from triwave.open_system import pure_density
from triwave.pulse_control import average_gate_fidelity

model = default_model()
U = unitary_3level(0.2, np.pi / 2, 2)
gate = grape_optimize(model, U, OptimizationConfig.for_duration(80.0))
N = 120
exact = np.abs(repeated_states(U, np.array([1, 0, 0]), N)) ** 2
modular = simulate_gate_repetition(model, gate, N)

report = givens_decompose(embed_two_qubit(U))
p_native = 1 - average_gate_fidelity(model, gate)
channel = noisy_sequence_channel(report, 1 - (1 - p_native) ** NATIVE_PER_ROTATION)
rho = pure_density([1.0], 4)
print(f"{report.count} two-level gates (about {report.native_estimate} native), native error {p_native:.2e}")
for k in range(1, N + 1):
    rho = channel(rho)
    if k in (1, 10, 30, 60, 100, 120):
        seq = np.real(np.diag(rho))[:3]
        print(f"N={k:3d}  exact p0={exact[k - 1, 0]:.3f}  modular p0={modular[k - 1, 0]:.3f}  sequence p0={seq[0]:.3f}")
