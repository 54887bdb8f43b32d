"""Compile the three-level cubic gate into a 150 ns transmon pulse.

The optimizer only sees the closed-system propagator; the resulting
pulse is then run through the Lindblad model of the same device.
"""

import numpy as np

from triwave import OptimizationConfig, default_model, evolve_master, grape_optimize, unitary_3level
from triwave.open_system import pure_density
from triwave.pulse_control import average_gate_fidelity

model = default_model()
target = unitary_3level(0.1, np.pi / 2, 2)
gate = grape_optimize(model, target, OptimizationConfig())
print(f"converged={gate.converged} after {gate.iterations} iterations, "
      f"overlap error {gate.overlap_error:.2e}, leakage {gate.leakage:.1e}")
print("max |eps| =", np.abs(gate.pulse.samples).max())

# %% Populations during the pulse, with decay and dephasing switched on
traj = evolve_master(model, gate.pulse, pure_density([1.0], model.levels), record_every=30)
for t, p in zip(traj.times, traj.populations()):
    print(f"t={t:6.1f} ns  p0={p[0]:.4f}  p1={p[1]:.4f}  p2={p[2]:.4f}  guard={p[3:].sum():.1e}")
print("targets:", np.round(np.abs(target[:, 0]) ** 2, 4))
print("average gate fidelity under noise:", round(average_gate_fidelity(model, gate), 5))
