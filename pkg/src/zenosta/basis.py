"""Truncated Hilbert space for the two-atom cavity-fiber-cavity system.

Atom 1 is a tripod (three ground levels, one excited level), atom 2 is
M-type (three ground levels, two excited levels).  Six bosonic modes
connect them: the left/right circularly polarized modes of each cavity
and of the fiber.  The simulation basis is the single-excitation sector
reachable from |g0, g0, vacuum> plus the zero-excitation configurations
that spontaneous emission can populate, 16 states in total.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple

import numpy as np

ATOM1_LEVELS = ("g0", "gL", "gR", "e0")
ATOM2_LEVELS = ("g0", "gL", "gR", "eL", "eR")
ATOM1_EXCITED = "e0"
ATOM2_EXCITED = ("eL", "eR")
GROUND_LEVELS = ("g0", "gL", "gR")


class ModeId(NamedTuple):
    location: str   # "cavity1" | "fiber" | "cavity2"
    polarization: str  # "L" | "R"

    def short(self) -> str:
        code = {"cavity1": "c1", "fiber": "f", "cavity2": "c2"}[self.location]
        return code + self.polarization


#: canonical mode order used for occupation tuples
MODES: tuple[ModeId, ...] = tuple(
    ModeId(loc, pol)
    for loc in ("cavity1", "fiber", "cavity2")
    for pol in ("L", "R")
)
_MODE_INDEX = {m: i for i, m in enumerate(MODES)}

VACUUM = (0,) * len(MODES)


@dataclass(frozen=True, order=True)
class BasisState:
    """One tensor-product configuration: two atomic levels plus mode occupations."""

    atom1: str
    atom2: str
    occupations: tuple[int, ...] = VACUUM

    def __post_init__(self) -> None:
        if self.atom1 not in ATOM1_LEVELS:
            raise ValueError(f"invalid atom1 level {self.atom1!r}")
        if self.atom2 not in ATOM2_LEVELS:
            raise ValueError(f"invalid atom2 level {self.atom2!r}")
        if len(self.occupations) != len(MODES) or any(
            n not in (0, 1) for n in self.occupations
        ):
            raise ValueError("occupations must be six 0/1 photon numbers")

    def excitation(self) -> int:
        """Total excitation number: photons plus excited atomic levels."""
        return (
            sum(self.occupations)
            + (self.atom1 == ATOM1_EXCITED)
            + (self.atom2 in ATOM2_EXCITED)
        )

    def with_atom1(self, level: str) -> "BasisState":
        return BasisState(level, self.atom2, self.occupations)

    def with_atom2(self, level: str) -> "BasisState":
        return BasisState(self.atom1, level, self.occupations)

    def with_occupation(self, mode: ModeId, n: int) -> "BasisState":
        occ = list(self.occupations)
        occ[_MODE_INDEX[mode]] = n
        return BasisState(self.atom1, self.atom2, tuple(occ))

    def occupation(self, mode: ModeId) -> int:
        return self.occupations[_MODE_INDEX[mode]]

    def label(self) -> str:
        photons = [m.short() for m in MODES if self.occupation(m)]
        tail = "," + "+".join(photons) if photons else ""
        return f"{self.atom1},{self.atom2}{tail}"

    def __repr__(self) -> str:  # compact, used in error messages
        return f"|{self.label()}>"


def _photon_state(atom1: str, atom2: str, mode: ModeId) -> BasisState:
    return BasisState(atom1, atom2).with_occupation(mode, 1)


def initial_state() -> BasisState:
    """Both atoms in g0, all six modes empty."""
    return BasisState("g0", "g0")


def coherent_subspace_states() -> tuple[BasisState, ...]:
    """The 12 single-excitation-sector states reachable by the coherent dynamics.

    Order matters: dark-subspace construction and population tracking rely on
    it.  Index 0 is the initial ket; indices 10 and 11 are |gL,gL> and |gR,gR>.
    """
    c1L, c1R, fL, fR, c2L, c2R = MODES
    return (
        BasisState("g0", "g0"),
        BasisState("e0", "g0"),
        _photon_state("gL", "g0", c1L),
        _photon_state("gR", "g0", c1R),
        _photon_state("gL", "g0", fL),
        _photon_state("gR", "g0", fR),
        _photon_state("gL", "g0", c2L),
        _photon_state("gR", "g0", c2R),
        BasisState("gL", "eL"),
        BasisState("gR", "eR"),
        BasisState("gL", "gL"),
        BasisState("gR", "gR"),
    )


# ---------------------------------------------------------------------------
# transition rules (shared by the closure oracle; matrices are built from the
# elementary operators below, so the two constructions stay independent)
# ---------------------------------------------------------------------------

def _coherent_images(s: BasisState) -> list[BasisState]:
    """States reachable by one application of any coherent coupling, either direction."""
    out: list[BasisState] = []
    # classical drives: atom1 g0<->e0, atom2 gL<->eL and gR<->eR
    if s.atom1 == "g0":
        out.append(s.with_atom1("e0"))
    if s.atom1 == "e0":
        out.append(s.with_atom1("g0"))
    for g, e in (("gL", "eL"), ("gR", "eR")):
        if s.atom2 == g:
            out.append(s.with_atom2(e))
        if s.atom2 == e:
            out.append(s.with_atom2(g))
    # atom1 <-> cavity1 photon exchange
    for pol in ("L", "R"):
        mode = ModeId("cavity1", pol)
        if s.atom1 == "e0" and s.occupation(mode) == 0:
            out.append(s.with_atom1("g" + pol).with_occupation(mode, 1))
        if s.atom1 == "g" + pol and s.occupation(mode) == 1:
            out.append(s.with_atom1("e0").with_occupation(mode, 0))
    # atom2 <-> cavity2 photon exchange
    for pol in ("L", "R"):
        mode = ModeId("cavity2", pol)
        if s.atom2 == "e" + pol and s.occupation(mode) == 0:
            out.append(s.with_atom2("g0").with_occupation(mode, 1))
        if s.atom2 == "g0" and s.occupation(mode) == 1:
            out.append(s.with_atom2("e" + pol).with_occupation(mode, 0))
    # fiber <-> cavity photon hopping
    for pol in ("L", "R"):
        fiber = ModeId("fiber", pol)
        for loc in ("cavity1", "cavity2"):
            cav = ModeId(loc, pol)
            if s.occupation(fiber) == 1 and s.occupation(cav) == 0:
                out.append(s.with_occupation(fiber, 0).with_occupation(cav, 1))
            if s.occupation(cav) == 1 and s.occupation(fiber) == 0:
                out.append(s.with_occupation(cav, 0).with_occupation(fiber, 1))
    return out


def _jump_images(s: BasisState) -> list[BasisState]:
    """States reachable by one photon-loss or spontaneous-emission jump."""
    out: list[BasisState] = []
    for mode in MODES:
        if s.occupation(mode) == 1:
            out.append(s.with_occupation(mode, 0))
    if s.atom1 == ATOM1_EXCITED:
        out.extend(s.with_atom1(g) for g in GROUND_LEVELS)
    if s.atom2 in ATOM2_EXCITED:
        out.extend(s.with_atom2(g) for g in GROUND_LEVELS)
    return out


def closure_oracle() -> frozenset[BasisState]:
    """Independent set-expansion oracle for the simulation basis.

    Expands the initial ket under the coherent couplings (breadth-first), then
    collects the zero-excitation configurations one jump can reach.  Those leak
    states are treated as absorbing: the truncation drops the drive matrix
    elements that would re-excite them, so they are terminal by construction.
    """
    seen = {initial_state()}
    frontier = [initial_state()]
    while frontier:
        nxt = []
        for s in frontier:
            for t in _coherent_images(s):
                if t not in seen:
                    seen.add(t)
                    nxt.append(t)
        frontier = nxt
    absorbing = set()
    for s in seen:
        for t in _jump_images(s):
            if t not in seen:
                if t.excitation() != 0:
                    raise AssertionError(f"jump reached excited out-of-set state {t}")
                absorbing.add(t)
    return frozenset(seen | absorbing)


@dataclass(frozen=True)
class Basis:
    """Ordered basis with index lookup.  Immutable and hashable."""

    states: tuple[BasisState, ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        if len(set(self.states)) != len(self.states):
            raise ValueError("duplicate basis states")
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.states)})

    @property
    def dim(self) -> int:
        return len(self.states)

    def index_of(self, state: BasisState) -> int:
        try:
            return self._index[state]
        except KeyError:
            raise KeyError(f"state {state} not in basis") from None

    def __contains__(self, state: BasisState) -> bool:
        return state in self._index

    def ket(self, state_or_index: BasisState | int) -> np.ndarray:
        idx = (
            state_or_index
            if isinstance(state_or_index, int)
            else self.index_of(state_or_index)
        )
        v = np.zeros(self.dim, dtype=complex)
        v[idx] = 1.0
        return v

    def labels(self) -> tuple[str, ...]:
        return tuple(s.label() for s in self.states)


def enumerate_basis() -> Basis:
    """The 16-state simulation basis.

    The 12 coherent-sector states come first in their canonical order; the
    four absorbing zero-excitation configurations follow in lexicographic
    order so snapshots are reproducible across runs.  Construction is checked
    against the independent closure oracle.
    """
    coherent = coherent_subspace_states()
    absorbing = sorted(closure_oracle() - set(coherent))
    states = coherent + tuple(absorbing)
    if set(states) != set(closure_oracle()):
        raise AssertionError("basis enumeration disagrees with the closure oracle")
    if any(s.excitation() > 1 for s in states):
        raise AssertionError("basis contains a multiply excited state")
    return Basis(states)


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Operator:
    """Dense complex matrix over an ordered basis, with Hermiticity metadata."""

    matrix: np.ndarray
    hermitian: bool = False

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("operator matrix must be square")
        object.__setattr__(self, "matrix", m)
        if self.hermitian and np.max(np.abs(m - m.conj().T)) > 1e-12:
            raise ValueError("hermitian flag set but matrix is not Hermitian")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def dag(self) -> "Operator":
        return Operator(self.matrix.conj().T, hermitian=self.hermitian)


def _operator_from_map(
    basis: Basis, images: Callable[[BasisState], Iterable[tuple[BasisState, complex]]]
) -> np.ndarray:
    """Materialize a first-quantized map on the truncated basis.

    Image components outside the basis are dropped (projector truncation).
    """
    m = np.zeros((basis.dim, basis.dim), dtype=complex)
    for col, s in enumerate(basis.states):
        for t, amp in images(s):
            if t in basis:
                m[basis.index_of(t), col] += amp
    return m


def annihilation(mode: ModeId, basis: Basis) -> Operator:
    """Photon annihilation operator for one cavity/fiber mode.

    With the single-photon truncation every nonzero image stays inside the
    closed basis; this is asserted rather than silently truncated.
    """
    if mode not in _MODE_INDEX:
        raise ValueError(f"unknown mode id {mode!r}")

    def images(s: BasisState):
        if s.occupation(mode) == 1:
            yield s.with_occupation(mode, 0), 1.0

    m = np.zeros((basis.dim, basis.dim), dtype=complex)
    for col, s in enumerate(basis.states):
        for t, amp in images(s):
            if t not in basis:
                raise AssertionError(f"annihilation image {t} escaped the basis")
            m[basis.index_of(t), col] += amp
    return Operator(m)


def atomic_sigma(which_atom: int, upper: str, lower: str, basis: Basis) -> Operator:
    """|upper><lower| on the chosen atom, identity elsewhere, truncated to the basis."""
    levels = {1: ATOM1_LEVELS, 2: ATOM2_LEVELS}.get(which_atom)
    if levels is None:
        raise ValueError(f"which_atom must be 1 or 2, got {which_atom!r}")
    if upper not in levels or lower not in levels:
        raise ValueError(
            f"invalid level pairing ({upper!r}, {lower!r}) for atom {which_atom}"
        )

    def images(s: BasisState):
        if which_atom == 1 and s.atom1 == lower:
            yield s.with_atom1(upper), 1.0
        elif which_atom == 2 and s.atom2 == lower:
            yield s.with_atom2(upper), 1.0

    return Operator(_operator_from_map(basis, images))
