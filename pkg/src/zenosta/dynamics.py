"""Time evolution: Schrodinger and Lindblad integration, populations, fidelity.

Both integrators use fixed-step fourth-order Runge-Kutta so that sweep
results are bit-reproducible; conservation drifts (norm, trace,
Hermiticity, positivity) are tracked and enforced rather than corrected
away.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .basis import MODES, Basis, Operator, annihilation, atomic_sigma
from .hamiltonians import SystemParams


class IntegratorError(RuntimeError):
    """Raised when a conservation law drifts beyond its configured tolerance."""


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step RK4 settings and drift tolerances.

    Acceptance-grade runs use at least 1000 steps (default 20000 for the
    reference duration); ``record_stride`` thins the stored samples.
    """

    steps: int = 20000
    record_stride: int = 10
    norm_tol: float = 1e-9
    trace_tol: float = 1e-8
    herm_tol: float = 1e-10
    positivity_floor: float = -1e-6

    def __post_init__(self) -> None:
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.record_stride < 1:
            raise ValueError("record_stride must be >= 1")


@dataclass(frozen=True)
class LindbladChannel:
    """A jump operator with its rate."""

    operator: Operator
    rate: float

    def __post_init__(self) -> None:
        if self.rate < 0:
            raise ValueError("channel rate must be non-negative")


@dataclass
class TrajectoryResult:
    """Time grid, tracked populations, fidelity trace and the final state."""

    times: np.ndarray
    populations: dict[str, np.ndarray]
    fidelity: np.ndarray | None
    final_state: np.ndarray
    max_norm_drift: float | None = None
    max_trace_drift: float | None = None
    max_herm_residual: float | None = None
    min_eigenvalue: float | None = None

    @property
    def final_fidelity(self) -> float:
        if self.fidelity is None:
            raise ValueError("no target was tracked for this trajectory")
        return float(self.fidelity[-1])


def target_state(basis: Basis) -> np.ndarray:
    """The two-qutrit entangled target (|g0,g0> - |gL,gL> - |gR,gR>)/sqrt(3)."""
    from .basis import BasisState

    v = np.zeros(basis.dim, dtype=complex)
    v[basis.index_of(BasisState("g0", "g0"))] = 1.0
    v[basis.index_of(BasisState("gL", "gL"))] = -1.0
    v[basis.index_of(BasisState("gR", "gR"))] = -1.0
    return v / np.sqrt(3.0)


def fidelity(state: np.ndarray, target: np.ndarray) -> float:
    """Overlap fidelity with a pure target.

    |<target|psi>|^2 for state vectors, <target|rho|target> for density
    matrices (the standard pure-target form, which reduces to the former
    for pure rho).
    """
    state = np.asarray(state)
    target = np.asarray(target)
    if state.ndim == 1:
        if state.shape != target.shape:
            raise ValueError(f"dimension mismatch: {state.shape} vs {target.shape}")
        return float(np.abs(np.vdot(target, state)) ** 2)
    if state.ndim == 2:
        if state.shape != (target.size, target.size):
            raise ValueError(f"dimension mismatch: {state.shape} vs {target.shape}")
        return float(np.real(np.vdot(target, state @ target)))
    raise ValueError("state must be a vector or a square matrix")


def _matrix_fn(h: Callable[[float], np.ndarray | Operator]) -> Callable[[float], np.ndarray]:
    def fn(t: float) -> np.ndarray:
        m = h(t)
        return m.matrix if isinstance(m, Operator) else m

    return fn


def _record_indices(steps: int, stride: int) -> np.ndarray:
    idx = np.arange(0, steps + 1, stride)
    if idx[-1] != steps:
        idx = np.append(idx, steps)
    return idx


def evolve_schrodinger(
    h: Callable[[float], np.ndarray | Operator],
    psi0: np.ndarray,
    duration: float,
    cfg: IntegratorConfig = IntegratorConfig(),
    target: np.ndarray | None = None,
    tracked: Mapping[str, int] | None = None,
) -> TrajectoryResult:
    """Fixed-step RK4 solution of i dpsi/dt = H(t) psi.

    Norm preservation is monitored every step; drift beyond
    ``cfg.norm_tol`` aborts with a drift report.
    """
    hm = _matrix_fn(h)
    psi = np.asarray(psi0, dtype=complex).copy()
    if abs(np.linalg.norm(psi) - 1.0) > 1e-9:
        raise ValueError("psi0 must be normalized")
    if not duration > 0:
        raise ValueError("duration must be positive")

    n = cfg.steps
    dt = duration / n
    rec = _record_indices(n, cfg.record_stride)
    rec_set = set(int(i) for i in rec)
    tracked = dict(tracked or {})

    times = rec * dt
    pops = {label: np.empty(len(rec)) for label in tracked}
    fids = np.empty(len(rec)) if target is not None else None

    def record(slot: int, state: np.ndarray) -> None:
        for label, idx in tracked.items():
            pops[label][slot] = np.abs(state[idx]) ** 2
        if fids is not None:
            fids[slot] = np.abs(np.vdot(target, state)) ** 2

    slot = 0
    record(slot, psi)
    slot += 1

    max_drift = abs(np.linalg.norm(psi) - 1.0)
    h_next = hm(0.0)
    for k in range(n):
        t = k * dt
        h1 = h_next
        h2 = hm(t + 0.5 * dt)
        h4 = hm(t + dt)
        k1 = -1j * (h1 @ psi)
        k2 = -1j * (h2 @ (psi + (0.5 * dt) * k1))
        k3 = -1j * (h2 @ (psi + (0.5 * dt) * k2))
        k4 = -1j * (h4 @ (psi + dt * k3))
        psi = psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        h_next = h4
        drift = abs(np.linalg.norm(psi) - 1.0)
        if drift > max_drift:
            max_drift = drift
        if drift > cfg.norm_tol:
            raise IntegratorError(
                f"norm drift {drift:.3e} exceeded tolerance {cfg.norm_tol:.1e} "
                f"at step {k + 1}/{n} (t = {t + dt:.6g}); increase steps"
            )
        if (k + 1) in rec_set:
            record(slot, psi)
            slot += 1

    _check_populations(pops)
    return TrajectoryResult(
        times=times,
        populations=pops,
        fidelity=fids,
        final_state=psi,
        max_norm_drift=max_drift,
    )


def _check_populations(pops: dict[str, np.ndarray]) -> None:
    if not pops:
        return
    total = np.zeros_like(next(iter(pops.values())))
    for arr in pops.values():
        if np.any(arr < -1e-12) or np.any(arr > 1.0 + 1e-8):
            raise IntegratorError("tracked population left [0, 1]")
        total = total + arr
    if np.any(total > 1.0 + 1e-8):
        raise IntegratorError("tracked populations sum above 1")


def standard_channels(params: SystemParams, basis: Basis) -> list[LindbladChannel]:
    """The 15 dissipation channels: photon leakage and spontaneous emission.

    Six bosonic modes decay at kappa each.  Each excited atomic level decays
    to all three ground levels, branch rate gamma/3 apiece, so gamma is the
    total linewidth of every excited level (the quantity quoted for real
    cavity-QED hardware).
    """
    channels = [
        LindbladChannel(annihilation(mode, basis), params.kappa) for mode in MODES
    ]
    branch = params.gamma / 3.0
    for ground in ("g0", "gL", "gR"):
        channels.append(LindbladChannel(atomic_sigma(1, ground, "e0", basis), branch))
    for excited in ("eL", "eR"):
        for ground in ("g0", "gL", "gR"):
            channels.append(
                LindbladChannel(atomic_sigma(2, ground, excited, basis), branch)
            )
    return channels


def _scaled_jumps(channels: list[LindbladChannel]) -> np.ndarray:
    mats = [np.sqrt(ch.rate) * ch.operator.matrix for ch in channels]
    return np.array(mats)


def _single_entry_decomposition(
    cs: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray] | None:
    """(rows, cols, weights) if every scaled jump has at most one nonzero entry."""
    rows, cols, weights = [], [], []
    for c in cs:
        nz = np.argwhere(np.abs(c) > 0)
        if len(nz) == 0:
            continue
        if len(nz) > 1:
            return None
        i, j = nz[0]
        rows.append(i)
        cols.append(j)
        weights.append(np.abs(c[i, j]) ** 2)
    return np.array(rows, int), np.array(cols, int), np.array(weights)


def evolve_lindblad(
    h: Callable[[float], np.ndarray | Operator],
    rho0: np.ndarray,
    channels: list[LindbladChannel],
    duration: float,
    cfg: IntegratorConfig = IntegratorConfig(),
    target: np.ndarray | None = None,
    tracked: Mapping[str, int] | None = None,
) -> TrajectoryResult:
    """Fixed-step RK4 master-equation solution.

    drho/dt = -i[H, rho] + sum_k rate_k (c_k rho c_k^+ - {c_k^+ c_k, rho}/2).

    The density matrix is re-symmetrized each step to suppress round-off
    drift; trace is monitored every step and positivity on the recorded
    samples.  Jump operators with a single nonzero entry (always the case for
    this model's basis) take a fast elementwise path.
    """
    hm = _matrix_fn(h)
    rho = np.asarray(rho0, dtype=complex).copy()
    dim = rho.shape[0]
    if rho.shape != (dim, dim):
        raise ValueError("rho0 must be square")
    if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
        raise ValueError("rho0 must be Hermitian")
    if abs(np.trace(rho).real - 1.0) > 1e-8:
        raise ValueError("rho0 must have unit trace")
    if np.linalg.eigvalsh(rho).min() < -1e-10:
        raise ValueError("rho0 must be positive semidefinite")
    if not duration > 0:
        raise ValueError("duration must be positive")

    cs = _scaled_jumps(channels)
    sparse = _single_entry_decomposition(cs) if len(cs) else (np.array([], int), np.array([], int), np.array([]))
    if sparse is not None:
        rows, cols, weights = sparse
        d_diag = np.zeros(dim)
        np.add.at(d_diag, cols, weights)
        w_matrix = -0.5 * (d_diag[:, None] + d_diag[None, :])
        jump_map = np.zeros((dim, dim))
        np.add.at(jump_map, (rows, cols), weights)
        diag_idx = np.arange(dim)

        def dissipator(r: np.ndarray) -> np.ndarray:
            out = w_matrix * r
            out[diag_idx, diag_idx] += jump_map @ r.diagonal()
            return out

    else:
        csc = cs.conj()
        d_full = np.tensordot(csc.transpose(0, 2, 1), cs, axes=([0, 2], [0, 1]))

        def dissipator(r: np.ndarray) -> np.ndarray:
            out = -0.5 * (d_full @ r + r @ d_full)
            tmp = cs @ r
            out += np.tensordot(tmp, csc, axes=([0, 2], [0, 2]))
            return out

    def rhs(t: float, r: np.ndarray, hmat: np.ndarray) -> np.ndarray:
        return -1j * (hmat @ r - r @ hmat) + dissipator(r)

    n = cfg.steps
    dt = duration / n
    rec = _record_indices(n, cfg.record_stride)
    rec_set = set(int(i) for i in rec)
    tracked = dict(tracked or {})

    times = rec * dt
    pops = {label: np.empty(len(rec)) for label in tracked}
    fids = np.empty(len(rec)) if target is not None else None
    max_trace_drift = abs(np.trace(rho).real - 1.0)
    max_herm = 0.0
    min_eig = float(np.linalg.eigvalsh(rho).min())

    def record(slot: int, r: np.ndarray) -> float:
        for label, idx in tracked.items():
            pops[label][slot] = np.real(r[idx, idx])
        if fids is not None:
            fids[slot] = np.real(np.vdot(target, r @ target))
        return float(np.linalg.eigvalsh(r).min())

    slot = 0
    min_eig = min(min_eig, record(slot, rho))
    slot += 1

    h_next = hm(0.0)
    for k in range(n):
        t = k * dt
        h1 = h_next
        h2 = hm(t + 0.5 * dt)
        h4 = hm(t + dt)
        k1 = rhs(t, rho, h1)
        k2 = rhs(t + 0.5 * dt, rho + (0.5 * dt) * k1, h2)
        k3 = rhs(t + 0.5 * dt, rho + (0.5 * dt) * k2, h2)
        k4 = rhs(t + dt, rho + dt * k3, h4)
        rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        herm = float(np.max(np.abs(rho - rho.conj().T)))
        if herm > max_herm:
            max_herm = herm
        if herm > cfg.herm_tol:
            raise IntegratorError(
                f"hermiticity residual {herm:.3e} exceeded {cfg.herm_tol:.1e} at step {k + 1}"
            )
        rho = 0.5 * (rho + rho.conj().T)
        h_next = h4
        drift = abs(np.trace(rho).real - 1.0)
        if drift > max_trace_drift:
            max_trace_drift = drift
        if drift > cfg.trace_tol:
            raise IntegratorError(
                f"trace drift {drift:.3e} exceeded tolerance {cfg.trace_tol:.1e} "
                f"at step {k + 1}/{n}; increase steps"
            )
        if (k + 1) in rec_set:
            eig = record(slot, rho)
            slot += 1
            if eig < min_eig:
                min_eig = eig
            if eig < cfg.positivity_floor:
                raise IntegratorError(
                    f"density matrix eigenvalue {eig:.3e} below {cfg.positivity_floor:.1e}"
                )

    _check_populations(pops)
    return TrajectoryResult(
        times=times,
        populations=pops,
        fidelity=fids,
        final_state=rho,
        max_trace_drift=max_trace_drift,
        max_herm_residual=max_herm,
        min_eigenvalue=min_eig,
    )
