"""Two-level decomposition of the embedded cubic gate and of random unitaries."""

import numpy as np

from triwave import embed_two_qubit, givens_decompose, unitary_3level

report = givens_decompose(embed_two_qubit(unitary_3level(0.2, np.pi / 2, 2)))
print(f"{len(report.rotations)} rotations, phase gate: {report.has_phase_gate}, "
      f"estimated native gates: {report.native_estimate}")
for R in report.rotations:
    print(f"  levels ({R.i}, {R.j})  |cos| = {abs(R.block[0, 0]):.6f}")

rng = np.random.default_rng(0)
for D in (3, 4, 6, 8):
    Z = rng.normal(size=(D, D)) + 1j * rng.normal(size=(D, D))
    Q, R = np.linalg.qr(Z)
    r = givens_decompose(Q)
    print(f"D={D}: {r.count} gates (bound {D * (D - 1) // 2 + D}), error {r.reconstruction_error:.1e}")
