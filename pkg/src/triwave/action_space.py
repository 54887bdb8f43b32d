"""Invariant-subspace encoding of the cubic three-wave Hamiltonian.

The interaction ``H = i g A1^+ A2 A3 - i g* A1 A2^+ A3^+`` commutes with the
action operators ``S2 = n1 + n3`` and ``S3 = n1 + n2``.  Fixing their
eigenvalues ``(s2, s3)`` leaves a ``D = min(s2, s3) + 1`` dimensional subspace
spanned by the Fock states ``|s2 - j, s3 - s2 + j, j>``, on which ``H / |g|``
is a Hermitian tridiagonal matrix with zero diagonal.

All times in this package are the dimensionless ``tau = |g| t``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SubspaceSpec",
    "TriHamiltonian",
    "make_subspace",
    "basis_fock_state",
    "coupling_magnitudes",
    "build_hamiltonian",
    "three_level_hamiltonian",
    "occupations",
    "moment",
    "normalize",
]


@dataclass(frozen=True)
class SubspaceSpec:
    """Labels of one invariant subspace, with ``s2 <= s3``.

    ``swapped`` is True when the caller passed ``s2 > s3``; waves 2 and 3
    were then exchanged and outputs should be relabelled accordingly.
    """

    s2: int
    s3: int
    swapped: bool = False

    @property
    def D(self) -> int:
        return self.s2 + 1

    @property
    def dim(self) -> int:
        return self.s2 + 1


@dataclass(frozen=True)
class TriHamiltonian:
    """Hermitian tridiagonal matrix with zero diagonal.

    Only the superdiagonal is stored; ``super[j] = exp(i theta) * h_{j+1/2}``.
    """

    dim: int
    theta: float
    super: np.ndarray

    def __post_init__(self):
        sup = np.asarray(self.super, dtype=complex)
        if sup.shape != (max(self.dim - 1, 0),):
            raise ValueError(f"superdiagonal must have length {self.dim - 1}, got {sup.shape}")
        sup.setflags(write=False)
        object.__setattr__(self, "super", sup)

    @property
    def magnitudes(self) -> np.ndarray:
        return np.abs(self.super)

    def dense(self) -> np.ndarray:
        """Materialize the full ``dim x dim`` complex matrix."""
        H = np.zeros((self.dim, self.dim), dtype=complex)
        if self.dim > 1:
            idx = np.arange(self.dim - 1)
            H[idx, idx + 1] = self.super
            H[idx + 1, idx] = self.super.conj()
        return H


def make_subspace(s2: int, s3: int) -> SubspaceSpec:
    s2, s3 = int(s2), int(s3)
    if s2 < 0 or s3 < 0:
        raise ValueError(f"action eigenvalues must be non-negative, got s2={s2}, s3={s3}")
    if s2 > s3:
        return SubspaceSpec(s3, s2, swapped=True)
    return SubspaceSpec(s2, s3)


def basis_fock_state(spec: SubspaceSpec, j: int) -> tuple[int, int, int]:
    """Occupation numbers ``(n1, n2, n3)`` of basis vector ``j``."""
    if not 0 <= j <= spec.s2:
        raise IndexError(f"basis index {j} outside 0..{spec.s2}")
    return (spec.s2 - j, spec.s3 - spec.s2 + j, j)


def _fock_table(spec: SubspaceSpec) -> np.ndarray:
    # floats: s3 may exceed the int64 range of later products
    j = np.arange(spec.D, dtype=float)
    return np.stack([spec.s2 - j, float(spec.s3) - spec.s2 + j, j])


def coupling_magnitudes(spec: SubspaceSpec) -> np.ndarray:
    """``h_{j+1/2} = sqrt((j+1)(s2-j)(s3-s2+j+1))`` for ``j = 0..D-2``."""
    j = np.arange(spec.D - 1, dtype=float)
    return np.sqrt((j + 1.0) * (spec.s2 - j) * (float(spec.s3) - spec.s2 + j + 1.0))


def build_hamiltonian(spec: SubspaceSpec, theta: float) -> TriHamiltonian:
    """Normalized Hamiltonian ``H/|g|`` restricted to ``spec``.

    ``theta`` is the coupling phase defined by ``exp(i theta) = i g / |g|``.
    """
    sup = np.exp(1j * theta) * coupling_magnitudes(spec)
    return TriHamiltonian(spec.D, float(theta), sup)


def three_level_hamiltonian(theta: float, s: float) -> TriHamiltonian:
    """``H/|g|`` for ``s2 = 2, s3 = s``; ``s`` may be any real ``>= 2``.

    Real ``s`` is needed by the parametric interpolation family, which is
    not tied to integer photon numbers.
    """
    if s < 2:
        raise ValueError(f"three-level family requires s >= 2, got {s}")
    mags = np.array([np.sqrt(2.0 * (s - 1.0)), np.sqrt(2.0 * s)])
    return TriHamiltonian(3, float(theta), np.exp(1j * theta) * mags)


def _probabilities(spec: SubspaceSpec, psi) -> np.ndarray:
    psi = np.asarray(psi)
    if psi.shape != (spec.D,):
        raise ValueError(f"state has shape {psi.shape}, subspace needs ({spec.D},)")
    return np.abs(psi) ** 2


def occupations(spec: SubspaceSpec, psi) -> tuple[float, float, float]:
    p = _probabilities(spec, psi)
    n = _fock_table(spec) @ p
    return float(n[0]), float(n[1]), float(n[2])


def moment(spec: SubspaceSpec, psi, wave: int, order: int) -> float:
    """``<n_wave^order>`` for a state expanded in the subspace basis."""
    if order < 1:
        raise ValueError(f"moment order must be >= 1, got {order}")
    if wave not in (1, 2, 3):
        raise ValueError(f"wave must be 1, 2 or 3, got {wave}")
    p = _probabilities(spec, psi)
    return float(np.sum(_fock_table(spec)[wave - 1] ** order * p))


def normalize(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise ValueError("cannot normalize the zero vector")
    return psi / norm
