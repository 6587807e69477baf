"""Invariant-based pulse design for the three-level effective model.

The effective model couples the initial ket and the doubly-occupied-ground
combination to the distributed dark state with amplitudes Omega_1/sqrt(5)
and Omega_2'/sqrt(5).  A Hermitian dynamical invariant with constant
spectrum {0, +/- chi/sqrt(5)} is parametrized by two auxiliary angles
nu(t), beta(t); prescribing smooth angle trajectories and inverting the
invariance condition yields drive pulses that carry the initial ket to the
entangled target exactly up to the accumulated dynamical phases.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import atan, sqrt, pi
from typing import Callable

import numpy as np
from scipy.integrate import simpson

SQRT2 = sqrt(2.0)
SQRT5 = sqrt(5.0)
#: final mixing angle: tan(beta_f) equals the target amplitude ratio sqrt(2)
BETA_F = atan(SQRT2)


class SingularProtocolError(ValueError):
    """Raised when an angle trajectory would demand an infinite Rabi frequency."""


@dataclass(frozen=True)
class AuxAngles:
    """Auxiliary angle trajectories nu(t), beta(t) and their derivatives on [0, t_f]."""

    nu: Callable[[float], float]
    beta: Callable[[float], float]
    nu_dot: Callable[[float], float]
    beta_dot: Callable[[float], float]
    t_f: float


@dataclass(frozen=True)
class PulseProtocol:
    """A designed drive pair (Omega_1(t), Omega_2'(t)) with its parameters.

    Construction enforces the design boundary conditions: Omega_1 vanishes at
    t = 0 and the endpoint ratio Omega_1(t_f)/Omega_2'(t_f) equals sqrt(2).
    """

    t_f: float
    eps: float
    omega1: Callable[[float], float]
    omega2_prime: Callable[[float], float]
    peak_amplitude: float = field(default=0.0)

    def __post_init__(self) -> None:
        if not self.t_f > 0:
            raise ValueError("t_f must be positive")
        scale = max(abs(self.omega2_prime(0.0)), abs(self.omega1(self.t_f)), 1e-300)
        if abs(self.omega1(0.0)) > 1e-10 * scale:
            raise ValueError("protocol violates Omega_1(0) = 0")
        o1f, o2f = self.omega1(self.t_f), self.omega2_prime(self.t_f)
        if abs(o1f - SQRT2 * o2f) > 1e-10 * max(abs(o1f), abs(o2f)):
            raise ValueError("protocol violates Omega_1(t_f) = sqrt(2) * Omega_2'(t_f)")
        if self.peak_amplitude == 0.0:
            ts = np.linspace(0.0, self.t_f, 1001)
            peak = max(
                float(np.max(np.abs([self.omega1(t) for t in ts]))),
                float(np.max(np.abs([self.omega2_prime(t) for t in ts]))),
            )
            object.__setattr__(self, "peak_amplitude", peak)


def coupling_hamiltonian_3(omega1: float, omega2_prime: float) -> np.ndarray:
    """Three-level drive Hamiltonian on {initial, dark, symmetric-ground} order."""
    h = np.zeros((3, 3), dtype=complex)
    h[0, 1] = h[1, 0] = omega1 / SQRT5
    h[1, 2] = h[2, 1] = omega2_prime / SQRT5
    return h


def effective_hamiltonian_fn(protocol: PulseProtocol) -> Callable[[float], np.ndarray]:
    """Fast closure t -> 3x3 effective Hamiltonian for the integrators."""
    o1, o2 = protocol.omega1, protocol.omega2_prime
    return lambda t: coupling_hamiltonian_3(o1(t), o2(t))


def invariant_matrix(nu: float, beta: float, chi: float) -> np.ndarray:
    """Dynamical invariant at angles (nu, beta); chi sets the frequency scale.

    Hermitian with constant eigenvalues {0, +chi/sqrt(5), -chi/sqrt(5)}.
    """
    cn, sn = np.cos(nu), np.sin(nu)
    cb, sb = np.cos(beta), np.sin(beta)
    return (chi / SQRT5) * np.array(
        [
            [0.0, cn * sb, -1j * sn],
            [cn * sb, 0.0, cn * cb],
            [1j * sn, cn * cb, 0.0],
        ],
        dtype=complex,
    )


@dataclass(frozen=True)
class LRInvariant:
    """Invariant profile along an angle trajectory."""

    chi: float
    angles: AuxAngles

    def at(self, t: float) -> np.ndarray:
        return invariant_matrix(self.angles.nu(t), self.angles.beta(t), self.chi)


def _check_nonsingular(nu_value: float) -> None:
    if min(abs(np.sin(nu_value)), abs(np.cos(nu_value))) < 1e-9:
        raise SingularProtocolError(
            f"nu = {nu_value} touches 0 or pi/2; the inverted Rabi frequencies diverge"
        )


def pulses_from_aux(angles: AuxAngles) -> tuple[Callable[[float], float], Callable[[float], float]]:
    """Invert the invariance condition: angle trajectories -> drive pulses.

    Omega_1 = sqrt(5) (beta' cot(nu) sin(beta) + nu' cos(beta))
    Omega_2' = sqrt(5) (beta' cot(nu) cos(beta) - nu' sin(beta))
    """
    for t in np.linspace(0.0, angles.t_f, 513):
        _check_nonsingular(angles.nu(t))

    def omega1(t: float) -> float:
        nu = angles.nu(t)
        _check_nonsingular(nu)
        beta = angles.beta(t)
        cot = np.cos(nu) / np.sin(nu)
        return SQRT5 * (angles.beta_dot(t) * cot * np.sin(beta) + angles.nu_dot(t) * np.cos(beta))

    def omega2_prime(t: float) -> float:
        nu = angles.nu(t)
        _check_nonsingular(nu)
        beta = angles.beta(t)
        cot = np.cos(nu) / np.sin(nu)
        return SQRT5 * (angles.beta_dot(t) * cot * np.cos(beta) - angles.nu_dot(t) * np.sin(beta))

    return omega1, omega2_prime


def angle_derivatives(
    omega1: Callable[[float], float], omega2_prime: Callable[[float], float]
) -> Callable[[float, np.ndarray], np.ndarray]:
    """Right-hand side of the auxiliary-angle ODE system driven by a pulse pair.

    nu'   = (Omega_1 cos(beta) - Omega_2' sin(beta)) / sqrt(5)
    beta' = tan(nu) (Omega_2' cos(beta) + Omega_1 sin(beta)) / sqrt(5)
    """

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        nu, beta = y
        o1, o2 = omega1(t), omega2_prime(t)
        return np.array(
            [
                (o1 * np.cos(beta) - o2 * np.sin(beta)) / SQRT5,
                np.tan(nu) * (o2 * np.cos(beta) + o1 * np.sin(beta)) / SQRT5,
            ]
        )

    return rhs


def reference_angles(t_f: float, eps: float) -> AuxAngles:
    """Constant nu = eps with beta ramping linearly from 0 to arctan(sqrt(2))."""
    rate = BETA_F / t_f
    return AuxAngles(
        nu=lambda t: eps,
        beta=lambda t: rate * t,
        nu_dot=lambda t: 0.0,
        beta_dot=lambda t: rate,
        t_f=t_f,
    )


def reference_protocol(t_f: float, eps: float) -> PulseProtocol:
    """Closed-form drive pair for the constant-nu, linear-beta trajectory.

    Omega_1(t)  = (sqrt(5) arctan(sqrt(2)) / t_f) cot(eps) sin(arctan(sqrt(2)) t / t_f)
    Omega_2'(t) = same with cosine; Omega_1 rises from zero while Omega_2'
    decays from the peak, meeting the sqrt(2) endpoint ratio.
    """
    if not t_f > 0:
        raise ValueError("t_f must be positive")
    if not 0.0 < eps < pi / 2:
        raise ValueError("eps must lie in (0, pi/2)")
    amp = SQRT5 * BETA_F / (t_f * np.tan(eps))
    rate = BETA_F / t_f
    return PulseProtocol(
        t_f=t_f,
        eps=eps,
        omega1=lambda t: amp * np.sin(rate * t),
        omega2_prime=lambda t: amp * np.cos(rate * t),
        peak_amplitude=amp,
    )


def closed_form_fidelity(eps: float) -> float:
    """Final-state fidelity of the constant-nu protocol as a function of eps.

    F = [1 - sin^2(eps) (1 - cos(arctan(sqrt(2)) / sin(eps)))]^2.  Equal to 1
    exactly when the accumulated phase arctan(sqrt(2))/sin(eps) is a multiple
    of 2 pi.
    """
    if not 0.0 < eps < pi / 2:
        raise ValueError("eps must lie in (0, pi/2)")
    s2 = np.sin(eps) ** 2
    return float((1.0 - s2 * (1.0 - np.cos(BETA_F / np.sin(eps)))) ** 2)


def epsilon_star() -> float:
    """The largest-eps (weakest-drive) angle with unit closed-form fidelity.

    arcsin(arctan(sqrt(2)) / (2 pi)) = 0.15264...; smaller angles on higher
    2 n pi branches also reach unit fidelity but inflate cot(eps) and with it
    the peak Rabi frequency.
    """
    return float(np.arcsin(BETA_F / (2.0 * pi)))


def invariant_eigenstates(nu: float, beta: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Orthonormal eigenvectors of the invariant for eigenvalues 0, +chi/sqrt(5), -chi/sqrt(5)."""
    cn, sn = np.cos(nu), np.sin(nu)
    cb, sb = np.cos(beta), np.sin(beta)
    phi0 = np.array([cn * cb, -1j * sn, -cn * sb], dtype=complex)
    phi_p = np.array([sn * cb + 1j * sb, 1j * cn, -sn * sb + 1j * cb], dtype=complex) / SQRT2
    phi_m = np.array([sn * cb - 1j * sb, 1j * cn, -sn * sb - 1j * cb], dtype=complex) / SQRT2
    return phi0, phi_p, phi_m


def lr_phases(
    angles: AuxAngles, protocol: PulseProtocol, n_grid: int = 4001
) -> tuple[float, float, float]:
    """Accumulated phases of the three invariant eigenstates over [0, t_f].

    Each phase integrates <phi_n| (i d/dt - H) |phi_n>; the eigenvector time
    derivative is taken by central differences of the closed-form eigenvectors
    (a smooth gauge), and the integral by composite Simpson quadrature.
    """
    ts = np.linspace(0.0, angles.t_f, n_grid)
    h_fd = angles.t_f * 1e-7
    integrands = np.zeros((3, n_grid))
    for k, t in enumerate(ts):
        states = invariant_eigenstates(angles.nu(t), angles.beta(t))
        tp = min(t + h_fd, angles.t_f)
        tm = max(t - h_fd, 0.0)
        states_p = invariant_eigenstates(angles.nu(tp), angles.beta(tp))
        states_m = invariant_eigenstates(angles.nu(tm), angles.beta(tm))
        h = coupling_hamiltonian_3(protocol.omega1(t), protocol.omega2_prime(t))
        for n in range(3):
            dphi = (states_p[n] - states_m[n]) / (tp - tm)
            geom = 1j * np.vdot(states[n], dphi)
            dyn = np.vdot(states[n], h @ states[n])
            integrands[n, k] = float(np.real(geom - dyn))
    alphas = [float(simpson(integrands[n], x=ts)) for n in range(3)]
    return alphas[0], alphas[1], alphas[2]


def target_state_reduced() -> np.ndarray:
    """The entangled target in the three-level order: (1/sqrt(3), 0, -sqrt(2/3))."""
    return np.array([np.cos(BETA_F), 0.0, -np.sin(BETA_F)], dtype=complex)


def boundary_commutator_norms(protocol: PulseProtocol, chi: float = 1.0) -> tuple[float, float]:
    """Frobenius norms of [H(t), I_aligned(t)] at t = 0 and t = t_f.

    I_aligned is the invariant evaluated in the transfer-aligned limit nu -> 0,
    the limit in which the boundary commutation conditions hold exactly; at
    finite nu = eps the commutator equals i dI/dt and cannot vanish while the
    drives are on.  The aligned norms are zero precisely when Omega_1(0) = 0
    and Omega_1(t_f) = sqrt(2) Omega_2'(t_f), so this is a direct check of the
    designed pulse boundary conditions.
    """
    norms = []
    for t, beta in ((0.0, 0.0), (protocol.t_f, BETA_F)):
        h = coupling_hamiltonian_3(protocol.omega1(t), protocol.omega2_prime(t))
        inv = invariant_matrix(0.0, beta, chi)
        comm = h @ inv - inv @ h
        norms.append(float(np.linalg.norm(comm)))
    return norms[0], norms[1]
