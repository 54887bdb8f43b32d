"""Optimal-control compilation of subspace unitaries into qudit pulses.

The figure of merit for a target ``V`` on the computational levels
``0..d-1`` of an ``n``-level qudit is

    error = 1 - |tr(V^+ P U P)|^2 / d^2 + w * leak,
    leak  = 1 - ||P U P||_F^2 / d,

where ``U`` is the closed-system propagator of the piecewise-constant pulse
and ``P`` projects on the computational levels.  The first term is the
global-phase-invariant overlap error; ``leak`` is the guard-level
population at the end of the pulse averaged over computational inputs.

Gradients are exact: each slice propagator is differentiated through the
eigendecomposition of its Hamiltonian.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .action_space import TriHamiltonian
from .dynamics import expm_tridiagonal, is_unitary
from .open_system import (
    DEFAULT_AMP_BOUND,
    HardwareModel,
    PulseEnvelope,
    check_density_matrix,
    closed_propagator,
    control_generators,
    evolve_master,
    frame_hamiltonian,
    gate_superoperator,
    pure_density,
)

__all__ = [
    "OptimizationConfig",
    "CompiledGate",
    "GrapeObjective",
    "grape_optimize",
    "unitary_overlap_error",
    "leakage",
    "state_fidelity",
    "xi",
    "interpolation_weights",
    "interpolate_pulse",
    "interpolation_family_target",
    "scaled_family_hamiltonian",
    "interpolation_target_unitary",
    "simulate_gate_repetition",
    "average_gate_fidelity",
    "channel_on_subspace",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class OptimizationConfig:
    n_slices: int = 300
    total_T_ns: float = 150.0
    amp_bound: float = DEFAULT_AMP_BOUND
    fid_error_target: float = 1e-5
    max_iters: int = 200
    guard_penalty_weight: float = 10.0
    method: str = "lbfgs"

    def __post_init__(self):
        if self.n_slices < 1 or not self.total_T_ns > 0:
            raise ValueError("need n_slices >= 1 and total_T_ns > 0")
        if not self.amp_bound > 0:
            raise ValueError(f"amp_bound must be positive, got {self.amp_bound}")
        if self.method not in ("lbfgs", "adaptive"):
            raise ValueError(f"unknown optimizer {self.method!r}")

    @property
    def slice_ns(self) -> float:
        return self.total_T_ns / self.n_slices

    @classmethod
    def for_duration(cls, total_T_ns: float, slice_ns: float = 0.5, **kw) -> OptimizationConfig:
        return cls(n_slices=int(round(total_T_ns / slice_ns)), total_T_ns=total_T_ns, **kw)


@dataclass(frozen=True, eq=False)
class CompiledGate:
    pulse: PulseEnvelope
    target: np.ndarray
    achieved_fidelity: float
    iterations: int
    converged: bool
    leakage: float = 0.0
    history: tuple[float, ...] = field(default=(), repr=False)

    @property
    def overlap_error(self) -> float:
        return 1.0 - self.achieved_fidelity


def unitary_overlap_error(achieved, target) -> float:
    """``1 - |tr(target^+ achieved) / d|^2``; insensitive to global phase."""
    achieved = np.asarray(achieved)
    target = np.asarray(target)
    if achieved.shape != target.shape:
        raise ValueError(f"shape mismatch: {achieved.shape} vs {target.shape}")
    d = target.shape[0]
    return float(1.0 - abs(np.vdot(target, achieved)) ** 2 / d**2)


def leakage(U, d: int) -> float:
    """Population outside the first ``d`` levels, averaged over computational inputs."""
    U = np.asarray(U)
    return float(1.0 - np.sum(np.abs(U[:d, :d]) ** 2) / d)


def _slice_derivatives(H: np.ndarray, dt: float, gens: list[np.ndarray]):
    """Propagators ``exp(-i H_k dt)`` and their derivatives along each generator."""
    w, V = np.linalg.eigh(H)
    ph = np.exp(-1j * w * dt)
    U = np.einsum("kab,kb,kcb->kac", V, ph, V.conj())
    # divided differences of exp(-i w dt), stable at degeneracy
    dw = w[:, :, None] - w[:, None, :]
    mean = np.exp(-0.5j * (w[:, :, None] + w[:, None, :]) * dt)
    phi = -1j * dt * mean * np.sinc(dw * dt / (2.0 * np.pi))
    Vh = np.conj(np.swapaxes(V, 1, 2))
    dU = []
    for G in gens:
        Gt = Vh @ G @ V
        dU.append(V @ (phi * Gt) @ Vh)
    return U, dU


class GrapeObjective:
    """Penalized overlap error and its exact gradient w.r.t. ``(Re eps, Im eps)``."""

    def __init__(self, model: HardwareModel, target, cfg: OptimizationConfig):
        target = np.asarray(target, dtype=complex)
        if target.ndim != 2 or target.shape[0] != target.shape[1] or not is_unitary(target, 1e-8):
            raise ValueError("target must be a square unitary matrix")
        d = target.shape[0]
        if model.levels < d:
            raise ValueError(f"model has {model.levels} levels, target needs {d}")
        self.model = model
        self.target = target
        self.cfg = cfg
        self.d = d
        self.dt = cfg.slice_ns
        self.H0 = frame_hamiltonian(model)
        self.Hx, self.Hy = control_generators(model)

    def propagator(self, eps: np.ndarray) -> np.ndarray:
        H = self.H0[None] + eps.real[:, None, None] * self.Hx + eps.imag[:, None, None] * self.Hy
        w, V = np.linalg.eigh(H)
        Uk = np.einsum("kab,kb,kcb->kac", V, np.exp(-1j * w * self.dt), V.conj())
        U = np.eye(self.model.levels, dtype=complex)
        for u in Uk:
            U = u @ U
        return U

    def terms(self, eps: np.ndarray) -> tuple[float, float]:
        U = self.propagator(np.asarray(eps, dtype=complex))
        return unitary_overlap_error(U[: self.d, : self.d], self.target), leakage(U, self.d)

    def value(self, eps: np.ndarray) -> float:
        err, leak = self.terms(eps)
        return err + self.cfg.guard_penalty_weight * leak

    def value_and_grad(self, eps: np.ndarray) -> tuple[float, np.ndarray, np.ndarray, dict]:
        """Objective, gradients along ``Re eps`` and ``Im eps``, and diagnostics."""
        eps = np.asarray(eps, dtype=complex)
        n, d, N = self.model.levels, self.d, eps.shape[0]
        H = self.H0[None] + eps.real[:, None, None] * self.Hx + eps.imag[:, None, None] * self.Hy
        Uk, (dUx, dUy) = _slice_derivatives(H, self.dt, [self.Hx, self.Hy])

        # fwd[k] = U_k ... U_1 P (n x d), bwd[k] = P U_N ... U_{k+1} (d x n)
        fwd = np.empty((N + 1, n, d), dtype=complex)
        fwd[0] = np.eye(n, d)
        for k in range(N):
            fwd[k + 1] = Uk[k] @ fwd[k]
        bwd = np.empty((N + 1, d, n), dtype=complex)
        bwd[N] = np.eye(d, n)
        for k in range(N - 1, -1, -1):
            bwd[k] = bwd[k + 1] @ Uk[k]

        UP = fwd[N][:d]
        g = np.vdot(self.target, UP)
        err = 1.0 - abs(g) ** 2 / d**2
        leak = 1.0 - np.sum(np.abs(UP) ** 2) / d
        w = self.cfg.guard_penalty_weight

        # dUP_k = bwd[k+1] dU_k fwd[k]; contract against conj(target) and conj(UP)
        # A_k = fwd[k] X^+ bwd[k+1] so that tr(X^+ dUP_k) = sum(A_k^T * dU_k)
        Vc = self.target.conj().T
        A_t = np.einsum("knd,de,kem->knm", fwd[:N], Vc, bwd[1:])
        A_l = np.einsum("knd,de,kem->knm", fwd[:N], UP.conj().T, bwd[1:])
        grads = []
        for dU in (dUx, dUy):
            dg = np.einsum("knm,kmn->k", A_t, dU)
            dl = np.einsum("knm,kmn->k", A_l, dU)
            d_err = -2.0 * np.real(np.conj(g) * dg) / d**2
            d_leak = -2.0 * np.real(dl) / d
            grads.append(d_err + w * d_leak)
        return err + w * leak, grads[0], grads[1], {"overlap_error": err, "leakage": leak}

    def grad_complex(self, eps: np.ndarray) -> tuple[float, np.ndarray]:
        f, gx, gy, _ = self.value_and_grad(eps)
        return f, gx + 1j * gy


def _squash(z: np.ndarray, bound: float) -> np.ndarray:
    return bound * z / np.sqrt(1.0 + np.abs(z) ** 2)


def _unsquash(eps: np.ndarray, bound: float) -> np.ndarray:
    r = np.minimum(np.abs(eps) / bound, 1.0 - 1e-9)
    return eps / bound / np.sqrt(1.0 - r**2)


def _squash_vjp(z: np.ndarray, bound: float, g: np.ndarray) -> np.ndarray:
    """Pull the gradient ``g = df/dRe + i df/dIm`` back through ``_squash``."""
    q = np.abs(z) ** 2
    a = bound / np.sqrt(1.0 + q)
    b = -bound / (1.0 + q) ** 1.5
    # eps = a z; d eps/du = a + b z u, d eps/dv = i a + b z v
    u, v = z.real, z.imag
    deu = a + b * z * u
    dev = 1j * a + b * z * v
    gu = np.real(np.conj(g) * deu)
    gv = np.real(np.conj(g) * dev)
    return gu + 1j * gv


def grape_optimize(
    model: HardwareModel,
    target,
    cfg: OptimizationConfig | None = None,
    initial: PulseEnvelope | np.ndarray | None = None,
) -> CompiledGate:
    """Optimize a piecewise-constant envelope whose propagator matches ``target``.

    Starts from the zero pulse unless ``initial`` is given.  Stops as soon as
    the overlap error is at most ``cfg.fid_error_target``; otherwise returns
    the best pulse after ``cfg.max_iters`` iterations with ``converged``
    False.  ``method="lbfgs"`` runs L-BFGS on an unconstrained
    reparametrization ``eps = A z / sqrt(1 + |z|^2)`` of the amplitude disk;
    ``method="adaptive"`` is projected steepest descent whose step doubles
    after an accepted move and halves after a rejected one.
    """
    cfg = cfg or OptimizationConfig()
    obj = GrapeObjective(model, target, cfg)
    if initial is None:
        eps0 = np.zeros(cfg.n_slices, dtype=complex)
    else:
        eps0 = np.asarray(initial.samples if isinstance(initial, PulseEnvelope) else initial, dtype=complex)
        if eps0.shape != (cfg.n_slices,):
            raise ValueError(f"initial pulse has {eps0.shape[0]} slices, config expects {cfg.n_slices}")
        eps0 = PulseEnvelope.clipped(cfg.slice_ns, eps0, cfg.amp_bound).samples.copy()

    if cfg.method == "adaptive":
        eps, iters, history = _adaptive_descent(obj, eps0)
    else:
        eps, iters, history = _lbfgs(obj, eps0)

    pulse = PulseEnvelope.clipped(cfg.slice_ns, eps, cfg.amp_bound)
    err, leak = obj.terms(pulse.samples)
    converged = err <= cfg.fid_error_target
    if not converged:
        log.warning("GRAPE stopped after %d iterations at overlap error %.3e", iters, err)
    return CompiledGate(
        pulse=pulse,
        target=obj.target,
        achieved_fidelity=float(np.clip(1.0 - err, 0.0, 1.0)),
        iterations=iters,
        converged=bool(converged),
        leakage=leak,
        history=tuple(history),
    )


class _Converged(Exception):
    pass


def _lbfgs(obj: GrapeObjective, eps0: np.ndarray):
    cfg = obj.cfg
    A = cfg.amp_bound
    N = eps0.shape[0]
    history: list[float] = []
    best = {"f": np.inf, "eps": eps0, "err": np.inf}

    def fun(x):
        z = x[:N] + 1j * x[N:]
        eps = _squash(z, A)
        f, g = obj.grad_complex(eps)
        gz = _squash_vjp(z, A, g)
        return f, np.concatenate([gz.real, gz.imag])

    f0, _, _, info0 = obj.value_and_grad(eps0)
    history.append(f0)
    if info0["overlap_error"] <= cfg.fid_error_target:
        return eps0, 0, history

    z0 = _unsquash(eps0, A)
    x0 = np.concatenate([z0.real, z0.imag])
    count = {"it": 0}

    def callback(intermediate_result):
        count["it"] += 1
        x = intermediate_result.x
        eps = _squash(x[:N] + 1j * x[N:], A)
        err, leak = obj.terms(eps)
        history.append(float(intermediate_result.fun))
        best.update(eps=eps, err=err)
        if err <= cfg.fid_error_target:
            raise StopIteration

    res = minimize(
        fun,
        x0,
        jac=True,
        method="L-BFGS-B",
        callback=callback,
        options={"maxiter": cfg.max_iters, "maxcor": 20, "ftol": 0.0, "gtol": 1e-14},
    )
    eps = _squash(res.x[:N] + 1j * res.x[N:], A)
    return eps, count["it"], history


def _adaptive_descent(obj: GrapeObjective, eps0: np.ndarray):
    cfg = obj.cfg
    A = cfg.amp_bound
    eps = eps0.copy()
    f, g = obj.grad_complex(eps)
    history = [f]
    if obj.terms(eps)[0] <= cfg.fid_error_target:
        return eps, 0, history
    step = 0.1 * A / max(np.abs(g).max(), 1e-300)
    it = 0
    while it < cfg.max_iters:
        it += 1
        for _ in range(60):
            trial = PulseEnvelope.clipped(obj.dt, eps - step * g, A).samples
            ft, gt = obj.grad_complex(trial)
            if ft < f:
                eps, f, g = trial, ft, gt
                step *= 2.0
                break
            step *= 0.5
        else:
            break
        history.append(f)
        if obj.terms(eps)[0] <= cfg.fid_error_target:
            break
    return eps, it, history


def state_fidelity(rho, sigma) -> float:
    """``tr sqrt(sqrt(rho) sigma sqrt(rho))``; equals ``|<psi|phi>|`` for pure states."""
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise ValueError(f"shape mismatch: {rho.shape} vs {sigma.shape}")
    check_density_matrix(rho)
    check_density_matrix(sigma)
    w, V = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    sq = (V * np.sqrt(np.clip(w, 0.0, None))) @ V.conj().T
    M = sq @ sigma @ sq
    ev = np.linalg.eigvalsh(0.5 * (M + M.conj().T))
    return float(np.clip(np.sum(np.sqrt(np.clip(ev, 0.0, None))), 0.0, 1.0))


def xi(s: float) -> float:
    """``sqrt(1 - 1/s)``; 1 at ``s = inf``."""
    if s < 2:
        raise ValueError(f"interpolation parameter must satisfy s >= 2, got {s}")
    return float(np.sqrt(1.0 - 1.0 / s))


def interpolation_weights(s: float) -> tuple[float, float]:
    """Coefficients of the ``s = 2`` and ``s = inf`` anchors; they sum to 1."""
    x = xi(s)
    r = 1.0 / np.sqrt(2.0)
    return (1.0 - x) / (1.0 - r), (x - r) / (1.0 - r)


def interpolate_pulse(eps_s2: PulseEnvelope, eps_inf: PulseEnvelope, s: float) -> PulseEnvelope:
    if eps_s2.n_slices != eps_inf.n_slices or eps_s2.slice_ns != eps_inf.slice_ns:
        raise ValueError("anchor pulses must share the same slice grid")
    if s < 2:
        raise ValueError(f"interpolation parameter must satisfy s >= 2, got {s}")
    if s == 2:
        return eps_s2
    if np.isinf(s):
        return eps_inf
    a, b = interpolation_weights(s)
    bound = max(eps_s2.amp_bound, eps_inf.amp_bound)
    return PulseEnvelope.clipped(eps_s2.slice_ns, a * eps_s2.samples + b * eps_inf.samples, bound)


def scaled_family_hamiltonian(s: float, theta: float = np.pi / 2) -> TriHamiltonian:
    """``K(s)``: couplings ``(xi(s), 1)``, finite for ``s = inf``."""
    return TriHamiltonian(3, theta, np.exp(1j * theta) * np.array([xi(s), 1.0]))


def interpolation_family_target(s: float, theta: float = np.pi / 2) -> TriHamiltonian:
    """``h(s)`` assembled from the two anchor matrices ``K(2)`` and ``K(inf)``.

    Off-diagonal magnitudes reduce to ``(sqrt(2(s-1)), sqrt(2s))``.
    """
    if np.isinf(s):
        raise ValueError("h(s) diverges at s = inf; use scaled_family_hamiltonian")
    a, b = interpolation_weights(s)
    K2 = scaled_family_hamiltonian(2.0, theta).super
    Kinf = scaled_family_hamiltonian(np.inf, theta).super
    return TriHamiltonian(3, theta, np.sqrt(2.0 * s) * (a * K2 + b * Kinf))


def interpolation_target_unitary(s: float, product: float = 0.2, theta: float = np.pi / 2) -> np.ndarray:
    """``U(tau, theta, s)`` at fixed ``tau sqrt(2s) = product``, i.e. ``exp(-i product K(s))``."""
    return expm_tridiagonal(scaled_family_hamiltonian(s, theta), product)


def simulate_gate_repetition(model: HardwareModel, gate: CompiledGate, N: int, rho0=None) -> np.ndarray:
    """Computational-level populations after each of ``N`` pulse applications.

    Returns shape ``(N, d)``; guard-level leakage means rows may sum below 1.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    n, d = model.levels, gate.target.shape[0]
    if rho0 is None:
        rho0 = pure_density([1.0], n)
    rho0 = np.asarray(rho0, dtype=complex)
    check_density_matrix(rho0)
    S = gate_superoperator(model, gate.pulse)
    v = rho0.reshape(-1)
    out = np.empty((N, d))
    for k in range(N):
        v = S @ v
        rho = v.reshape(n, n)
        check_density_matrix(rho)
        out[k] = np.real(np.diag(rho))[:d]
    return out


def channel_on_subspace(S: np.ndarray, n: int, d: int) -> np.ndarray:
    """Outputs ``E(|a><b|)`` for computational ``a, b``; shape ``(d, d, n, n)``."""
    out = np.empty((d, d, n, n), dtype=complex)
    for a in range(d):
        for b in range(d):
            E = np.zeros((n, n), dtype=complex)
            E[a, b] = 1.0
            out[a, b] = (S @ E.reshape(-1)).reshape(n, n)
    return out


def average_gate_fidelity(model: HardwareModel, gate: CompiledGate) -> float:
    """Haar average of ``<phi|E(psi)|phi>`` with ``phi = target psi``.

    This is the squared state fidelity between the ideal output and the
    Lindblad-propagated output, averaged exactly over pure computational
    inputs using the second-moment Haar integral.  Leakage out of the
    computational levels counts as infidelity.
    """
    n, d = model.levels, gate.target.shape[0]
    S = gate_superoperator(model, gate.pulse)
    M = channel_on_subspace(S, n, d)
    W = np.zeros((n, d), dtype=complex)
    W[:d] = gate.target
    X = np.einsum("ia,pqij,jb->pqab", W.conj(), M, W)
    total = np.einsum("aacc->", X) + np.einsum("abab->", X)
    return float(np.real(total) / (d * (d + 1)))
