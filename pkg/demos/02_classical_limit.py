"""Quantum occupations approach the classical three-wave solution as actions grow.

The classical amplitudes obey dA1 = g A2 A3, dA2 = -g* A1 A3*,
dA3 = -g* A1 A2*.  A coherent-state projection onto the invariant
subspace gives a matching quantum initial state.  With g = 1 the
subspace Hamiltonian has phase theta = pi/2.
"""

import numpy as np

from triwave import ClassicalState, build_hamiltonian, classical_threewave, make_subspace, occupations
from triwave.dynamics import coherent_packet, expm_tridiagonal, theta_from_coupling

for s in (4, 16, 64, 256):
    A = (np.sqrt(0.5 * s) * np.exp(0.7j), np.sqrt(1.5 * s), np.sqrt(0.5 * s))
    # the exchange period shrinks like 1/sqrt(s)
    dt = 1e-3 / np.sqrt(s)
    steps = int(8 / np.sqrt(s) / dt)
    I1 = np.abs(classical_threewave(ClassicalState(*A, 1.0), dt, steps)[:, 0]) ** 2

    spec = make_subspace(s, 2 * s)
    H = build_hamiltonian(spec, theta_from_coupling(1.0))
    psi = coherent_packet(spec, *A)
    idx = np.arange(0, steps + 1, 200)
    n1 = np.array([occupations(spec, expm_tridiagonal(H, k * dt) @ psi)[0] for k in idx])
    print(f"s={s:4d}  dimension {spec.D:4d}  max |<n1> - I1| / s = {np.abs(n1 - I1[idx]).max() / s:.4f}")
