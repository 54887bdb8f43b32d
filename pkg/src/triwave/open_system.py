"""Transmon qudit model and Lindblad propagation under piecewise-constant pulses.

Units: angular frequencies in rad/ns, times in ns, Lindblad operators in
ns^-1/2.  Everything is expressed in the frame rotating at ``frame_freq``
on the linear ladder ``diag(0, 1, 2, ...)``, with the rotating-wave
approximation applied to the drive.

Density matrices are vectorized row-major (``rho.reshape(-1)``), for which
``vec(A rho B) = kron(A, B.T) vec(rho)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import numpy as np
from scipy.linalg import expm

__all__ = [
    "ConfigError",
    "HardwareModel",
    "MasterTrajectory",
    "PulseEnvelope",
    "load_hardware_model",
    "default_model",
    "model_document",
    "noiseless",
    "frame_hamiltonian",
    "control_hamiltonian",
    "control_generators",
    "liouvillian",
    "slice_propagators",
    "closed_propagator",
    "gate_superoperator",
    "evolve_master",
    "populations",
    "check_density_matrix",
    "pure_density",
]

DEFAULT_AMP_BOUND = 0.03


class ConfigError(ValueError):
    """Invalid hardware-model document; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class HardwareModel:
    """Bare Hamiltonian, drive operator and Lindbladians of one qudit."""

    levels: int
    h0_diag: np.ndarray
    c: np.ndarray
    L1: np.ndarray
    L2: np.ndarray
    frame_freq: float
    name: str = ""

    @property
    def lindblad_ops(self) -> list[np.ndarray]:
        return [L for L in (self.L1, self.L2) if np.any(L)]


@dataclass(frozen=True, eq=False)
class PulseEnvelope:
    """Piecewise-constant complex envelope, one sample per slice (rad/ns)."""

    slice_ns: float
    samples: np.ndarray
    amp_bound: float = DEFAULT_AMP_BOUND

    def __post_init__(self):
        if not self.slice_ns > 0:
            raise ValueError(f"slice duration must be positive, got {self.slice_ns}")
        samples = np.array(self.samples, dtype=complex).reshape(-1)
        if np.max(np.abs(samples), initial=0.0) > self.amp_bound:
            raise ValueError(
                f"envelope exceeds amplitude bound {self.amp_bound}: max |eps| = {np.abs(samples).max()}"
            )
        object.__setattr__(self, "samples", _frozen(samples))

    @property
    def n_slices(self) -> int:
        return self.samples.shape[0]

    @property
    def duration(self) -> float:
        return self.slice_ns * self.n_slices

    @property
    def times(self) -> np.ndarray:
        """Start time of every slice."""
        return self.slice_ns * np.arange(self.n_slices)

    @classmethod
    def zeros(cls, n_slices: int, slice_ns: float, amp_bound: float = DEFAULT_AMP_BOUND) -> PulseEnvelope:
        return cls(slice_ns, np.zeros(n_slices, dtype=complex), amp_bound)

    @classmethod
    def clipped(cls, slice_ns: float, samples, amp_bound: float = DEFAULT_AMP_BOUND) -> PulseEnvelope:
        """Build an envelope after radially projecting samples onto ``|eps| <= amp_bound``."""
        samples = np.asarray(samples, dtype=complex)
        mag = np.abs(samples)
        scale = np.where(mag > amp_bound, amp_bound / np.where(mag > 0, mag, 1.0), 1.0)
        out = samples * scale
        # rounding in the rescale can land one ulp outside the disk
        over = np.abs(out) > amp_bound
        out[over] *= 1.0 - 2.0**-52
        return cls(slice_ns, out, amp_bound)


def _matrix(doc: Mapping[str, Any], key: str, n: int) -> np.ndarray:
    if key not in doc:
        raise ConfigError(key, "missing field")
    try:
        a = np.array(doc[key], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(key, f"not a numeric matrix ({exc})") from None
    if a.shape != (n, n):
        raise ConfigError(key, f"expected shape ({n}, {n}), got {a.shape}")
    if not np.all(np.isfinite(a)):
        bad = tuple(int(i) for i in np.argwhere(~np.isfinite(a))[0])
        raise ConfigError(f"{key}[{bad[0]}][{bad[1]}]", "non-finite entry")
    return a


def _only_on(a: np.ndarray, key: str, allowed: np.ndarray, what: str) -> None:
    bad = np.argwhere((a != 0) & ~allowed)
    if bad.size:
        i, j = (int(x) for x in bad[0])
        raise ConfigError(f"{key}[{i}][{j}]", f"nonzero entry outside the {what}")


def load_hardware_model(document: Mapping[str, Any] | str | Path) -> HardwareModel:
    """Validate a model document (mapping or path to a JSON file)."""
    if isinstance(document, (str, Path)):
        try:
            document = json.loads(Path(document).read_text())
        except OSError as exc:
            raise ConfigError("<file>", str(exc)) from None
        except json.JSONDecodeError as exc:
            raise ConfigError("<file>", f"invalid JSON ({exc})") from None
    if not isinstance(document, Mapping):
        raise ConfigError("<root>", "model document must be a mapping")
    doc = document

    if "levels" not in doc:
        raise ConfigError("levels", "missing field")
    n = doc["levels"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise ConfigError("levels", f"must be an integer >= 2, got {n!r}")

    if "h0_diag" not in doc:
        raise ConfigError("h0_diag", "missing field")
    h0 = np.array(doc["h0_diag"], dtype=float)
    if h0.shape != (n,):
        raise ConfigError("h0_diag", f"expected length {n}, got shape {h0.shape}")
    if h0[0] != 0.0:
        raise ConfigError("h0_diag[0]", f"ground-state energy must be 0, got {h0[0]}")
    dec = np.nonzero(np.diff(h0) < 0)[0]
    if dec.size:
        raise ConfigError(f"h0_diag[{dec[0] + 1}]", "energies must be nondecreasing")

    c = _matrix(doc, "c_real", n) + 1j * _matrix(doc, "c_imag", n)
    L1 = _matrix(doc, "l1", n)
    L2 = _matrix(doc, "l2", n)
    i, j = np.indices((n, n))
    _only_on(L1, "l1", j == i + 1, "first superdiagonal")
    _only_on(L2, "l2", i == j, "diagonal")
    if L2[0, 0] != 0.0:
        raise ConfigError("l2[0][0]", "ground level cannot dephase")

    if "frame_freq" not in doc:
        raise ConfigError("frame_freq", "missing field")
    try:
        frame = float(doc["frame_freq"])
    except (TypeError, ValueError):
        raise ConfigError("frame_freq", f"not a number: {doc['frame_freq']!r}") from None

    return HardwareModel(
        levels=n,
        h0_diag=_frozen(h0),
        c=_frozen(c),
        L1=_frozen(L1.astype(complex)),
        L2=_frozen(L2.astype(complex)),
        frame_freq=frame,
        name=str(doc.get("name", "")),
    )


def default_model() -> HardwareModel:
    """The bundled measured five-level transmon model."""
    text = resources.files("triwave").joinpath("models/paper_transmon.json").read_text()
    return load_hardware_model(json.loads(text))


def model_document(model: HardwareModel) -> dict:
    """Inverse of :func:`load_hardware_model`."""
    return {
        "name": model.name,
        "levels": model.levels,
        "h0_diag": model.h0_diag.tolist(),
        "c_real": model.c.real.tolist(),
        "c_imag": model.c.imag.tolist(),
        "l1": model.L1.real.tolist(),
        "l2": model.L2.real.tolist(),
        "frame_freq": model.frame_freq,
    }


def noiseless(model: HardwareModel) -> HardwareModel:
    z = _frozen(np.zeros_like(model.L1))
    return replace(model, L1=z, L2=z, name=model.name + " (noiseless)")


def frame_hamiltonian(model: HardwareModel) -> np.ndarray:
    """Bare Hamiltonian in the rotating frame: ``H0 - frame_freq * diag(0, 1, ...)``."""
    ladder = np.arange(model.levels, dtype=float)
    return np.diag(model.h0_diag - model.frame_freq * ladder).astype(complex)


def control_generators(model: HardwareModel) -> tuple[np.ndarray, np.ndarray]:
    """``(Hx, Hy)`` with ``eps c + eps^* c^+ = Re(eps) Hx + Im(eps) Hy``."""
    c = model.c
    return c + c.conj().T, 1j * (c - c.conj().T)


def control_hamiltonian(model: HardwareModel, eps: complex, t: float = 0.0, rwa: bool = True) -> np.ndarray:
    """Drive Hamiltonian in the rotating frame at time ``t`` (ns).

    The envelope convention puts ``eps`` on the lowering operator ``c``:
    under the rotating-wave approximation ``Hc = eps c + eps^* c^+`` and is
    time independent.  With ``rwa=False`` the counter-rotating terms
    ``eps^* c e^{-2i w t} + eps c^+ e^{2i w t}`` are kept.
    """
    c = model.c
    H = eps * c + np.conj(eps) * c.conj().T
    if not rwa:
        ph = np.exp(-2j * model.frame_freq * t)
        H = H + np.conj(eps) * ph * c + eps * np.conj(ph) * c.conj().T
    return H


def _commutator_super(H: np.ndarray) -> np.ndarray:
    eye = np.eye(H.shape[0])
    return -1j * (np.kron(H, eye) - np.kron(eye, H.T))


def _dissipator_super(ops: list[np.ndarray], n: int) -> np.ndarray:
    eye = np.eye(n)
    D = np.zeros((n * n, n * n), dtype=complex)
    for L in ops:
        LdL = L.conj().T @ L
        D += np.kron(L, L.conj()) - 0.5 * np.kron(LdL, eye) - 0.5 * np.kron(eye, LdL.T)
    return D


def liouvillian(model: HardwareModel, eps: complex) -> np.ndarray:
    """Generator of ``d vec(rho)/dt`` for a constant envelope value."""
    H = frame_hamiltonian(model) + control_hamiltonian(model, eps)
    return _commutator_super(H) + _dissipator_super(model.lindblad_ops, model.levels)


def slice_propagators(model: HardwareModel, pulse: PulseEnvelope) -> np.ndarray:
    """Superoperator of every slice, shape ``(n_slices, n^2, n^2)``."""
    D = _dissipator_super(model.lindblad_ops, model.levels)
    H0 = frame_hamiltonian(model)
    out = np.empty((pulse.n_slices, model.levels**2, model.levels**2), dtype=complex)
    # identical samples share one exponential
    cache: dict[complex, np.ndarray] = {}
    for k, eps in enumerate(pulse.samples):
        key = complex(eps)
        if key not in cache:
            gen = _commutator_super(H0 + control_hamiltonian(model, eps)) + D
            cache[key] = expm(gen * pulse.slice_ns)
        out[k] = cache[key]
    return out


def closed_propagator(model: HardwareModel, pulse: PulseEnvelope) -> np.ndarray:
    """Time-ordered Schrodinger propagator of the whole pulse (Lindbladians ignored)."""
    H0 = frame_hamiltonian(model)
    Hx, Hy = control_generators(model)
    H = H0[None] + pulse.samples.real[:, None, None] * Hx + pulse.samples.imag[:, None, None] * Hy
    w, V = np.linalg.eigh(H)
    Uk = np.einsum("kab,kb,kcb->kac", V, np.exp(-1j * w * pulse.slice_ns), V.conj())
    U = np.eye(model.levels, dtype=complex)
    for u in Uk:
        U = u @ U
    return U


def gate_superoperator(model: HardwareModel, pulse: PulseEnvelope) -> np.ndarray:
    """Lindblad channel of one full pulse application as an ``n^2 x n^2`` matrix."""
    S = np.eye(model.levels**2, dtype=complex)
    for P in slice_propagators(model, pulse):
        S = P @ S
    return S


def pure_density(psi, levels: int | None = None) -> np.ndarray:
    """``|psi><psi|``, zero-padded to ``levels`` if given."""
    psi = np.asarray(psi, dtype=complex)
    if levels is not None and levels > psi.shape[0]:
        psi = np.concatenate([psi, np.zeros(levels - psi.shape[0], dtype=complex)])
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def check_density_matrix(rho, herm_tol: float = 1e-9, trace_tol: float = 1e-8, pos_tol: float = 1e-7) -> None:
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise FloatingPointError("density matrix has non-finite entries")
    herm = np.linalg.norm(rho - rho.conj().T)
    if herm > herm_tol:
        raise ValueError(f"density matrix not Hermitian: ||rho - rho^+|| = {herm:.3e}")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > trace_tol:
        raise ValueError(f"density matrix trace {tr!r} differs from 1")
    lo = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min()
    if lo < -pos_tol:
        raise ValueError(f"density matrix has negative eigenvalue {lo:.3e}")


@dataclass(frozen=True, eq=False)
class MasterTrajectory:
    times: np.ndarray
    states: np.ndarray = field(repr=False)

    def populations(self) -> np.ndarray:
        return np.real(np.einsum("kii->ki", self.states))


def evolve_master(
    model: HardwareModel,
    pulse: PulseEnvelope,
    rho0,
    record_every: int = 1,
    check: bool = True,
) -> MasterTrajectory:
    """Integrate the Lindblad equation across ``pulse``.

    Each slice is propagated with the exact exponential of its (constant)
    Liouvillian.  States are recorded at ``t = 0`` and after every
    ``record_every`` slices, always including the final time.  With
    ``check`` the trace, Hermiticity and positivity of every recorded state
    are asserted.
    """
    if record_every < 1:
        raise ValueError(f"record_every must be >= 1, got {record_every}")
    rho0 = np.asarray(rho0, dtype=complex)
    n = model.levels
    if rho0.shape != (n, n):
        raise ValueError(f"initial state has shape {rho0.shape}, model has {n} levels")
    if check:
        check_density_matrix(rho0)
    props = slice_propagators(model, pulse)
    v = rho0.reshape(-1)
    times, states = [0.0], [rho0]
    for k, P in enumerate(props, start=1):
        v = P @ v
        if k % record_every == 0 or k == len(props):
            rho = v.reshape(n, n)
            if not np.all(np.isfinite(rho)):
                raise FloatingPointError(f"master equation diverged in slice {k}")
            if check:
                check_density_matrix(rho)
            times.append(k * pulse.slice_ns)
            states.append(rho)
    return MasterTrajectory(np.array(times), np.array(states))


def populations(rho) -> np.ndarray:
    return np.real(np.diag(np.asarray(rho)))
