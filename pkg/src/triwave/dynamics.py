"""Closed-system propagation inside an invariant subspace.

Propagators are plain complex ``ndarray`` objects; states are 1-D complex
arrays of expansion coefficients.  The classical three-wave equations are
integrated with a fixed-step RK4 scheme so that trajectories are
reproducible bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln

from .action_space import (
    SubspaceSpec,
    TriHamiltonian,
    moment,
    occupations,
)

__all__ = [
    "ClassicalState",
    "unitary_3level",
    "expm_tridiagonal",
    "evolve_state",
    "repeated_states",
    "repeated_application",
    "classical_threewave",
    "classical_actions",
    "coherent_packet",
    "theta_from_coupling",
    "quantum_curvature",
    "classical_curvature",
    "is_unitary",
]

DEFAULT_DT = 1e-3


def is_unitary(U, atol: float = 1e-10) -> bool:
    U = np.asarray(U)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        return False
    return np.linalg.norm(U.conj().T @ U - np.eye(U.shape[0])) <= atol


def unitary_3level(tau: float, theta: float, s: float) -> np.ndarray:
    """Closed-form ``exp(-i h(theta, s) tau)`` for the three-level problem."""
    if s < 2:
        raise ValueError(f"three-level unitary requires s >= 2, got {s}")
    lam = np.sqrt(2.0 * (2.0 * s - 1.0))
    c, sn = np.cos(lam * tau), np.sin(lam * tau)
    d = 2.0 * s - 1.0
    e = np.exp(1j * theta)
    a = np.sqrt((s - 1.0) / d)
    b = np.sqrt(s / d)
    q = np.sqrt(s * (s - 1.0)) / d * (c - 1.0)
    return np.array(
        [
            [((s - 1.0) * c + s) / d, -1j * e * a * sn, e**2 * q],
            [-1j * a * sn / e, c, -1j * e * b * sn],
            [q / e**2, -1j * b * sn / e, (s * c + s - 1.0) / d],
        ]
    )


def _gauge(H: TriHamiltonian) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal phases ``g`` with ``diag(g)^* H diag(g)`` real symmetric."""
    phases = np.concatenate([[0.0], np.cumsum(np.angle(H.super))])
    return np.exp(-1j * phases), np.abs(H.super)


def expm_tridiagonal(H: TriHamiltonian, tau: float) -> np.ndarray:
    """``exp(-i H tau)`` via the real symmetric gauge-equivalent matrix.

    Writing ``H = G T G^*`` with ``G`` diagonal unitary and ``T`` real
    symmetric tridiagonal, ``U = G V exp(-i w tau) V^T G^*`` where
    ``T = V diag(w) V^T``.
    """
    if H.dim == 1:
        return np.ones((1, 1), dtype=complex)
    g, off = _gauge(H)
    w, V = eigh_tridiagonal(np.zeros(H.dim), off)
    R = (V * np.exp(-1j * w * tau)) @ V.T
    return g[:, None] * R * g.conj()[None, :]


def evolve_state(U, psi) -> np.ndarray:
    U = np.asarray(U)
    psi = np.asarray(psi, dtype=complex)
    if U.shape != (psi.shape[0], psi.shape[0]):
        raise ValueError(f"propagator {U.shape} does not act on state of length {psi.shape[0]}")
    return U @ psi


def repeated_states(U, psi0, N: int) -> np.ndarray:
    """States after each of ``N`` applications of ``U``; shape ``(N, D)``."""
    if N < 0:
        raise ValueError(f"N must be non-negative, got {N}")
    psi = np.asarray(psi0, dtype=complex)
    out = np.empty((N, psi.shape[0]), dtype=complex)
    for k in range(N):
        psi = evolve_state(U, psi)
        out[k] = psi
    return out


def repeated_application(U, psi0, N: int, spec: SubspaceSpec) -> np.ndarray:
    """Occupations ``(<n1>, <n2>, <n3>)`` after each of ``N`` steps."""
    states = repeated_states(U, psi0, N)
    return np.array([occupations(spec, psi) for psi in states]).reshape(N, 3)


@dataclass(frozen=True)
class ClassicalState:
    A1: complex
    A2: complex
    A3: complex
    g: complex = 1.0

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([self.A1, self.A2, self.A3], dtype=complex)


def _threewave_rhs(A: np.ndarray, g: complex) -> np.ndarray:
    A1, A2, A3 = A
    return np.array([g * A2 * A3, -np.conj(g) * A1 * np.conj(A3), -np.conj(g) * A1 * np.conj(A2)])


def classical_threewave(init: ClassicalState, dt: float = DEFAULT_DT, steps: int = 1000) -> np.ndarray:
    """RK4 trajectory of the classical three-wave equations.

    Returns an array of shape ``(steps + 1, 3)`` holding ``(A1, A2, A3)``
    at ``t = 0, dt, ..., steps * dt``.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    g = complex(init.g)
    A = init.amplitudes
    out = np.empty((steps + 1, 3), dtype=complex)
    out[0] = A
    # overflow is reported below as a FloatingPointError
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(steps):
            k1 = _threewave_rhs(A, g)
            k2 = _threewave_rhs(A + 0.5 * dt * k1, g)
            k3 = _threewave_rhs(A + 0.5 * dt * k2, g)
            k4 = _threewave_rhs(A + dt * k3, g)
            A = A + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if not np.all(np.isfinite(A)):
                raise FloatingPointError(f"classical integration diverged at step {k + 1}")
            out[k + 1] = A
    return out


def classical_actions(traj: np.ndarray) -> dict[str, np.ndarray]:
    """Wave actions ``I_j = |A_j|^2`` and the invariants ``I2 = I1 + I3``, ``I3 = I1 + I2``."""
    I = np.abs(traj) ** 2
    return {
        "I1": I[:, 0],
        "I2": I[:, 1],
        "I3": I[:, 2],
        "S2": I[:, 0] + I[:, 2],
        "S3": I[:, 0] + I[:, 1],
    }


def theta_from_coupling(g: complex) -> float:
    """Phase ``theta`` with ``exp(i theta) = i g / |g|``."""
    return float(np.angle(1j * g))


def coherent_packet(spec: SubspaceSpec, A1: complex, A2: complex, A3: complex) -> np.ndarray:
    """Projection of the product coherent state ``|A1>|A2>|A3>`` onto ``spec``.

    ``alpha_j ~ A1^n1 A2^n2 A3^n3 / sqrt(n1! n2! n3!)`` with ``(n1, n2, n3)``
    the occupations of basis vector ``j``, renormalized.  This is a
    localized packet whose occupations track the classical actions when
    they are large.
    """
    j = np.arange(spec.D, dtype=float)
    n = np.stack([spec.s2 - j, float(spec.s3) - spec.s2 + j, j])
    amps = np.array([A1, A2, A3], dtype=complex)
    with np.errstate(divide="ignore"):
        logmag = np.log(np.abs(amps))[:, None]
    logw = np.where(n > 0, n * logmag, 0.0).sum(axis=0) - 0.5 * gammaln(n + 1.0).sum(axis=0)
    if not np.any(np.isfinite(logw)):
        raise ValueError("coherent amplitudes have no overlap with this subspace")
    phase = (n * np.angle(amps)[:, None]).sum(axis=0)
    logw = logw - np.max(logw[np.isfinite(logw)])
    alpha = np.where(np.isfinite(logw), np.exp(logw), 0.0) * np.exp(1j * phase)
    return alpha / np.linalg.norm(alpha)


def quantum_curvature(spec: SubspaceSpec, psi) -> float:
    """``d^2 <n1> / dtau^2`` from the Heisenberg equation, in units of ``|g|^2``."""
    n1 = moment(spec, psi, 1, 1)
    n1sq = moment(spec, psi, 1, 2)
    s2, s3 = float(spec.s2), float(spec.s3)
    return 2.0 * (s2 * s3 - (2.0 * s2 + 2.0 * s3 + 1.0) * n1 + 3.0 * n1sq)


def classical_curvature(I1: float, s2: float, s3: float) -> float:
    """``d^2 I1 / dt^2`` of the classical equations, in units of ``|g|^2``."""
    if I1 < 0:
        raise ValueError(f"wave action must be non-negative, got {I1}")
    return 2.0 * (s2 * s3 - (2.0 * s2 + 2.0 * s3) * I1 + 3.0 * I1**2)
