"""Exact dynamics of a cubic three-wave interaction inside one invariant subspace.

Fixing the two conserved actions s2 = n1 + n3 and s3 = n1 + n2 leaves a
tridiagonal Hamiltonian of dimension min(s2, s3) + 1.  We build it, step
the state with its exact exponential and watch the mode occupations.
"""

import numpy as np

from triwave import build_hamiltonian, make_subspace, occupations, unitary_3level
from triwave.dynamics import expm_tridiagonal, quantum_curvature

# %% A small subspace: s2 = 2, s3 = 2 is the three-level case
spec = make_subspace(2, 2)
H = build_hamiltonian(spec, theta=np.pi / 2)
print("dimension", spec.D)
print(np.round(H.dense(), 4))

# %% The closed form and the general eigendecomposition path agree
U_closed = unitary_3level(0.1, np.pi / 2, 2)
U_eig = expm_tridiagonal(H, 0.1)
print("closed form vs eigendecomposition:", np.linalg.norm(U_closed - U_eig))
print("transition probabilities from |0>:", np.round(np.abs(U_closed[:, 0]) ** 2, 6))

# %% A bigger subspace: the pump mode empties and refills
spec = make_subspace(20, 30)
H = build_hamiltonian(spec, theta=np.pi / 2)
U = expm_tridiagonal(H, 0.01)
psi = np.zeros(spec.D, dtype=complex)
psi[0] = 1.0
for step in range(0, 301):
    if step % 50 == 0:
        n1, n2, n3 = occupations(spec, psi)
        print(f"tau={step * 0.01:4.2f}  n1={n1:7.3f}  n2={n2:7.3f}  n3={n3:7.3f}  "
              f"d2n1/dtau2={quantum_curvature(spec, psi):9.2f}")
    psi = U @ psi
