"""Shortcut-to-adiabaticity entanglement protocols in a cavity-fiber-cavity link.

Simulates the one-step generation of the two-qutrit entangled state
(|g0,g0> - |gL,gL> - |gR,gR>)/sqrt(3) between two atoms trapped in
fiber-connected cavities: dark-subspace (Zeno) reduction of the coupled
system, invariant-based drive design, closed and open-system time
evolution, and parameter-sweep reproduction of the protocol's fidelity
and robustness maps.
"""

__version__ = "0.1.0"

from .basis import (
    Basis,
    BasisState,
    ModeId,
    MODES,
    Operator,
    annihilation,
    atomic_sigma,
    closure_oracle,
    enumerate_basis,
)
from .dynamics import (
    IntegratorConfig,
    IntegratorError,
    LindbladChannel,
    TrajectoryResult,
    evolve_lindblad,
    evolve_schrodinger,
    fidelity,
    standard_channels,
    target_state,
)
from .hamiltonians import (
    SystemParams,
    ZenoSubspace,
    build_H_acf,
    build_H_al,
    build_H_total,
    dark_subspace,
    zeno_effective_hamiltonian,
    zeno_effective_hamiltonian_3,
)
from .pulses import (
    AuxAngles,
    LRInvariant,
    PulseProtocol,
    SingularProtocolError,
    closed_form_fidelity,
    epsilon_star,
    invariant_eigenstates,
    invariant_matrix,
    lr_phases,
    pulses_from_aux,
    reference_angles,
    reference_protocol,
)

__all__ = [
    "__version__",
    "Basis",
    "BasisState",
    "ModeId",
    "MODES",
    "Operator",
    "annihilation",
    "atomic_sigma",
    "closure_oracle",
    "enumerate_basis",
    "IntegratorConfig",
    "IntegratorError",
    "LindbladChannel",
    "TrajectoryResult",
    "evolve_lindblad",
    "evolve_schrodinger",
    "fidelity",
    "standard_channels",
    "target_state",
    "SystemParams",
    "ZenoSubspace",
    "build_H_acf",
    "build_H_al",
    "build_H_total",
    "dark_subspace",
    "zeno_effective_hamiltonian",
    "zeno_effective_hamiltonian_3",
    "AuxAngles",
    "LRInvariant",
    "PulseProtocol",
    "SingularProtocolError",
    "closed_form_fidelity",
    "epsilon_star",
    "invariant_eigenstates",
    "invariant_matrix",
    "lr_phases",
    "pulses_from_aux",
    "reference_angles",
    "reference_protocol",
]
