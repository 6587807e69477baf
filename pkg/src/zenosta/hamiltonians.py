"""Interaction Hamiltonians and the Zeno dark-state reduction.

The total Hamiltonian splits into the classical drives acting on the atoms
and the static atom-cavity-fiber coupling.  With the couplings strong
compared to the drives, the dynamics is confined to the four-dimensional
null space of the static part; projecting the drives onto it yields the
three-level effective model the pulse design operates on.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import sqrt
from typing import Callable

import numpy as np

from .basis import Basis, ModeId, Operator, annihilation, atomic_sigma

SQRT2 = sqrt(2.0)
SQRT5 = sqrt(5.0)


@dataclass(frozen=True)
class SystemParams:
    """Physical constants in units of the atom-cavity coupling g.

    g sets the global frequency scale (all times are 1/g, all rates are g);
    v is the cavity-fiber hopping; kappa the photon leakage rate per mode;
    gamma the total spontaneous-emission rate per excited atomic level.
    """

    g: float = 1.0
    v: float = 1.0
    kappa: float = 0.0
    gamma: float = 0.0
    t_f: float = 90.0
    eps: float = 0.153

    def __post_init__(self) -> None:
        if not self.g > 0:
            raise ValueError("g must be positive")
        if self.v < 0:
            raise ValueError("v must be non-negative")
        if self.kappa < 0 or self.gamma < 0:
            raise ValueError("decay rates must be non-negative")
        if not self.t_f > 0:
            raise ValueError("t_f must be positive")
        if not 0.0 < self.eps < np.pi / 2:
            raise ValueError("eps must lie in (0, pi/2)")


@lru_cache(maxsize=None)
def _drive_generators(basis: Basis) -> tuple[np.ndarray, np.ndarray]:
    """Hermitian generators multiplying the two drive amplitudes."""
    x1 = atomic_sigma(1, "e0", "g0", basis).matrix
    x2 = (
        atomic_sigma(2, "eL", "gL", basis).matrix
        + atomic_sigma(2, "eR", "gR", basis).matrix
    )
    return x1 + x1.conj().T, x2 + x2.conj().T


def build_H_al(omega1: float, omega2: float, basis: Basis) -> Operator:
    """Classical drive Hamiltonian.

    omega1 couples g0<->e0 of atom 1; omega2 is the bare amplitude coupling
    gL<->eL and gR<->eR of atom 2 (the designed pulse pair supplies
    omega2 = omega2_prime / sqrt(2)).
    """
    x1, x2 = _drive_generators(basis)
    return Operator(omega1 * x1 + omega2 * x2, hermitian=True)


@lru_cache(maxsize=None)
def _coupling_matrix(basis: Basis, g: float, v: float) -> np.ndarray:
    # Products of truncated operators are order-sensitive: the photon must be
    # annihilated before the atom is raised so intermediates stay in the basis.
    m = np.zeros((basis.dim, basis.dim), dtype=complex)
    for pol in ("L", "R"):
        a1 = annihilation(ModeId("cavity1", pol), basis).matrix
        a2 = annihilation(ModeId("cavity2", pol), basis).matrix
        b = annihilation(ModeId("fiber", pol), basis).matrix
        term = (
            g * atomic_sigma(1, "e0", "g" + pol, basis).matrix @ a1
            + g * atomic_sigma(2, "e" + pol, "g0", basis).matrix @ a2
            + v * (a1.conj().T + a2.conj().T) @ b
        )
        m += term + term.conj().T
    return m


def build_H_acf(params: SystemParams, basis: Basis) -> Operator:
    """Static atom-cavity plus cavity-fiber coupling Hamiltonian."""
    return Operator(_coupling_matrix(basis, params.g, params.v), hermitian=True)


def hamiltonian_matrix_fn(
    protocol, params: SystemParams, basis: Basis
) -> Callable[[float], np.ndarray]:
    """Fast closure t -> H_total(t) as a plain matrix, for the integrators."""
    h_acf = _coupling_matrix(basis, params.g, params.v)
    x1, x2 = _drive_generators(basis)
    omega1, omega2_prime = protocol.omega1, protocol.omega2_prime

    def h(t: float) -> np.ndarray:
        return h_acf + omega1(t) * x1 + (omega2_prime(t) / SQRT2) * x2

    return h


def build_H_total(t: float, protocol, params: SystemParams, basis: Basis) -> Operator:
    """Full Hamiltonian at time t: drives evaluated on the protocol plus the coupling."""
    slack = 1e-9 * protocol.t_f
    if t < -slack or t > protocol.t_f + slack:
        raise ValueError(
            f"t={t} outside the pulse support [0, {protocol.t_f}]"
        )
    return Operator(hamiltonian_matrix_fn(protocol, params, basis)(t), hermitian=True)


# ---------------------------------------------------------------------------
# Zeno subspace
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ZenoSubspace:
    """Orthonormal null-space basis of the static coupling, with its projector.

    Vector order: initial ket, distributed dark state, |gL,gL>, |gR,gR>.
    """

    vectors: np.ndarray  # shape (4, dim), rows orthonormal
    projector: np.ndarray  # shape (dim, dim)


def distributed_dark_state(params: SystemParams, basis: Basis) -> np.ndarray:
    """The delocalized zero-eigenvalue state of the static coupling.

    Superposes the excited atom 1, both fiber photons and both excited atom 2
    configurations with weights set by v and g; phase fixed so the amplitude
    on the excited-atom-1 ket is real positive.
    """
    from .basis import coherent_subspace_states

    states = coherent_subspace_states()
    norm = sqrt(3 * params.v**2 + 2 * params.g**2)
    vec = np.zeros(basis.dim, dtype=complex)
    weights = {
        states[1]: params.v,       # e0, g0
        states[4]: -params.g,      # gL, g0, fiber L photon
        states[5]: -params.g,      # gR, g0, fiber R photon
        states[8]: params.v,       # gL, eL
        states[9]: params.v,       # gR, eR
    }
    for state, w in weights.items():
        vec[basis.index_of(state)] = w / norm
    return vec


def dark_subspace(params: SystemParams, basis: Basis) -> ZenoSubspace:
    """Null space of the static coupling restricted to the coherent 12-state block.

    Computed by eigendecomposition with the scale-invariant cutoff
    |eigenvalue| < 1e-9 * g; the dimension must come out exactly 4.  The
    returned vectors are the canonical closed forms, verified against the
    numerical null projector.
    """
    h = _coupling_matrix(basis, params.g, params.v)
    block = h[:12, :12]
    evals, evecs = np.linalg.eigh(block)
    null_mask = np.abs(evals) < 1e-9 * params.g
    n_null = int(np.sum(null_mask))
    if n_null != 4:
        raise RuntimeError(
            f"coupling null space on the coherent block has dimension {n_null}, expected 4"
        )
    null_proj_12 = evecs[:, null_mask] @ evecs[:, null_mask].conj().T

    vectors = np.zeros((4, basis.dim), dtype=complex)
    vectors[0] = basis.ket(0)
    vectors[1] = distributed_dark_state(params, basis)
    vectors[2] = basis.ket(10)
    vectors[3] = basis.ket(11)
    for k, vec in enumerate(vectors):
        resid = np.linalg.norm(null_proj_12 @ vec[:12] - vec[:12])
        if resid > 1e-9:
            raise RuntimeError(
                f"canonical dark vector {k} leaves the numerical null space (residual {resid:.2e})"
            )
    projector = vectors.T @ vectors.conj()
    return ZenoSubspace(vectors=vectors, projector=projector)


def zeno_effective_hamiltonian(
    omega1: float, omega2: float, zs: ZenoSubspace, params: SystemParams, basis: Basis
) -> Operator:
    """Drive Hamiltonian projected onto the dark subspace (4x4).

    Row/column order follows ZenoSubspace.vectors.  For any v, g the only
    nonzero elements couple the distributed dark state to the other three,
    with prefactor v / sqrt(3 v^2 + 2 g^2).
    """
    h_al = build_H_al(omega1, omega2, basis).matrix
    m = zs.vectors.conj() @ h_al @ zs.vectors.T
    return Operator(m, hermitian=True)


def zeno_effective_hamiltonian_3(
    omega1: float, omega2: float, zs: ZenoSubspace, params: SystemParams, basis: Basis
) -> Operator:
    """Three-level reduction on {initial ket, dark state, (|gL,gL>+|gR,gR>)/sqrt(2)}.

    Requires v = g; the antisymmetric combination (|gL,gL>-|gR,gR>)/sqrt(2)
    decouples exactly and is dropped.  Couplings are omega1/sqrt(5) and
    sqrt(2)*omega2/sqrt(5).
    """
    if not np.isclose(params.v, params.g, rtol=1e-12, atol=0.0):
        raise ValueError(
            f"three-level reduction requires v = g (got v/g = {params.v / params.g})"
        )
    h4 = zeno_effective_hamiltonian(omega1, omega2, zs, params, basis).matrix
    u = np.zeros((3, 4), dtype=complex)
    u[0, 0] = 1.0
    u[1, 1] = 1.0
    u[2, 2] = u[2, 3] = 1.0 / SQRT2
    return Operator(u @ h4 @ u.conj().T, hermitian=True)
