"""Reuse two compiled pulses for a whole family of cubic gates.

Pulses compiled at s = 2 and s = infinity are mixed slice by slice with
weights set by xi(s) = sqrt(1 - 1/s).  We compare the mixed pulse with a
freshly optimized one by the state fidelity of their outputs.
"""

import numpy as np

from triwave import OptimizationConfig, default_model, grape_optimize, interpolate_pulse
from triwave.open_system import evolve_master, noiseless, pure_density
from triwave.pulse_control import interpolation_target_unitary, interpolation_weights, state_fidelity

model = noiseless(default_model())
cfg = OptimizationConfig()
eps2 = grape_optimize(model, interpolation_target_unitary(2), cfg)
eps_inf = grape_optimize(model, interpolation_target_unitary(np.inf), cfg, initial=eps2.pulse)

for s in (2, 3, 8, 64):
    fresh = grape_optimize(model, interpolation_target_unitary(s), cfg, initial=eps2.pulse)
    mixed = interpolate_pulse(eps2.pulse, eps_inf.pulse, s)
    fids = []
    for k in range(3):
        rho0 = pure_density(np.eye(model.levels)[k])
        a = evolve_master(model, fresh.pulse, rho0, record_every=cfg.n_slices).states[-1]
        b = evolve_master(model, mixed, rho0, record_every=cfg.n_slices).states[-1]
        fids.append(state_fidelity(a, b))
    w = interpolation_weights(s)
    print(f"s={s:3d}  weights=({w[0]:.3f}, {w[1]:.3f})  fidelities={np.round(fids, 6)}")
