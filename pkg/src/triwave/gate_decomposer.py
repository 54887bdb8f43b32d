"""Two-level (Givens) decomposition: the standard-compilation baseline.

Any ``D x D`` unitary factors into at most ``D(D-1)/2`` rotations acting on
two basis levels each, followed by one diagonal phase gate.  A rotation
expands into a handful of hardware-native one- and two-qubit gates; we
report a fixed ``NATIVE_PER_ROTATION = 3`` expansion as an estimate only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dynamics import is_unitary

__all__ = [
    "TwoLevelRotation",
    "GateSequenceReport",
    "NATIVE_PER_ROTATION",
    "embed_two_qubit",
    "givens_decompose",
    "sequence_unitaries",
    "noisy_sequence_channel",
    "report_to_dict",
    "report_to_json",
]

NATIVE_PER_ROTATION = 3
_SKIP = 1e-14


@dataclass(frozen=True, eq=False)
class TwoLevelRotation:
    dim: int
    i: int
    j: int
    block: np.ndarray

    def matrix(self) -> np.ndarray:
        M = np.eye(self.dim, dtype=complex)
        idx = np.ix_([self.i, self.j], [self.i, self.j])
        M[idx] = self.block
        return M


@dataclass(frozen=True, eq=False)
class GateSequenceReport:
    """Rotations in application order, then ``diag(phases)``."""

    dim: int
    rotations: tuple[TwoLevelRotation, ...]
    phases: np.ndarray
    reconstruction_error: float

    @property
    def has_phase_gate(self) -> bool:
        return bool(np.any(np.abs(self.phases - 1.0) > _SKIP))

    @property
    def count(self) -> int:
        return len(self.rotations) + int(self.has_phase_gate)

    @property
    def native_estimate(self) -> int:
        return NATIVE_PER_ROTATION * self.count

    def unitary(self) -> np.ndarray:
        U = np.eye(self.dim, dtype=complex)
        for G in sequence_unitaries(self):
            U = G @ U
        return U


def _require_unitary(U, what: str = "input") -> np.ndarray:
    U = np.asarray(U, dtype=complex)
    if not is_unitary(U, 1e-10):
        raise ValueError(f"{what} is not unitary")
    return U


def embed_two_qubit(U3) -> np.ndarray:
    """Act with ``U3`` on ``|00>, |01>, |10>`` and leave ``|11>`` invariant."""
    U3 = _require_unitary(U3)
    if U3.shape != (3, 3):
        raise ValueError(f"expected a 3x3 unitary, got {U3.shape}")
    U = np.eye(4, dtype=complex)
    U[:3, :3] = U3
    return U


def givens_decompose(U) -> GateSequenceReport:
    """Column-by-column elimination of ``U^+`` with two-level rotations.

    For each column ``c`` the entries below the diagonal are zeroed bottom
    up by rotations on levels ``(c, r)``; entries already below 1e-14 are
    skipped.  If ``R_m ... R_1 U^+ = Delta`` then ``U = Delta^+ R_m ... R_1``.
    """
    U = _require_unitary(U)
    D = U.shape[0]
    W = U.conj().T.copy()
    rotations = []
    for c in range(D - 1):
        for r in range(D - 1, c, -1):
            b = W[r, c]
            if abs(b) < _SKIP:
                continue
            a = W[c, c]
            nrm = np.hypot(abs(a), abs(b))
            G = np.array([[np.conj(a), np.conj(b)], [-b, a]]) / nrm
            rows = W[[c, r], :]
            W[[c, r], :] = G @ rows
            W[r, c] = 0.0
            rotations.append(TwoLevelRotation(D, c, r, G))
    phases = np.conj(np.diag(W)) / np.abs(np.diag(W))
    report = GateSequenceReport(D, tuple(rotations), phases, 0.0)
    err = float(np.linalg.norm(report.unitary() - U))
    return GateSequenceReport(D, tuple(rotations), phases, err)


def sequence_unitaries(report: GateSequenceReport) -> list[np.ndarray]:
    """Full-dimension matrix of every emitted gate, in application order."""
    gates = [R.matrix() for R in report.rotations]
    if report.has_phase_gate:
        gates.append(np.diag(report.phases))
    return gates


def noisy_sequence_channel(report: GateSequenceReport, per_gate_error: float) -> Callable[[np.ndarray], np.ndarray]:
    """Channel applying every gate followed by depolarizing noise.

    After each gate ``rho -> (1 - p) rho + p I / D``.  This is an
    illustrative stand-in for hardware noise, not a device model.
    """
    if not 0.0 <= per_gate_error <= 1.0:
        raise ValueError(f"per-gate error must lie in [0, 1], got {per_gate_error}")
    gates = sequence_unitaries(report)
    D, p = report.dim, per_gate_error
    mixed = np.eye(D) / D

    def apply(rho):
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (D, D):
            raise ValueError(f"state shape {rho.shape} does not match gate dimension {D}")
        for G in gates:
            rho = (1.0 - p) * (G @ rho @ G.conj().T) + p * mixed
        return rho

    return apply


def report_to_dict(report: GateSequenceReport) -> dict:
    def cplx(z):
        return [float(np.real(z)), float(np.imag(z))]

    return {
        "dim": report.dim,
        "count": report.count,
        "native_estimate": report.native_estimate,
        "native_per_rotation": NATIVE_PER_ROTATION,
        "reconstruction_error": report.reconstruction_error,
        "rotations": [
            {"i": R.i, "j": R.j, "block": [[cplx(x) for x in row] for row in R.block]} for R in report.rotations
        ],
        "phases": [cplx(z) for z in report.phases],
    }


def report_to_json(report: GateSequenceReport) -> str:
    return json.dumps(report_to_dict(report), indent=2)
