import numpy as np
import pytest

from zenosta.basis import (
    ATOM1_LEVELS,
    ATOM2_LEVELS,
    MODES,
    Basis,
    BasisState,
    ModeId,
    Operator,
    annihilation,
    atomic_sigma,
    closure_oracle,
    coherent_subspace_states,
    initial_state,
)

VAC = (0,) * 6


def test_level_sets():
    assert len(ATOM1_LEVELS) == 4 and ATOM1_LEVELS.count("e0") == 1
    assert len(ATOM2_LEVELS) == 5
    assert set(ATOM2_LEVELS) - {"g0", "gL", "gR"} == {"eL", "eR"}
    assert len(MODES) == 6


def test_basis_size_and_order(basis):
    assert basis.dim == 16
    assert basis.states[:12] == coherent_subspace_states()
    assert basis.states[0] == BasisState("g0", "g0")
    assert basis.states[10] == BasisState("gL", "gL")
    assert basis.states[11] == BasisState("gR", "gR")


def test_absorbing_states(basis):
    expected = {
        BasisState("gL", "g0"),
        BasisState("gR", "g0"),
        BasisState("gL", "gR"),
        BasisState("gR", "gL"),
    }
    assert set(basis.states[12:]) == expected
    # deterministic lexicographic tail
    assert list(basis.states[12:]) == sorted(basis.states[12:])


def test_closure_oracle_matches_enumeration(basis):
    assert set(basis.states) == set(closure_oracle())


def test_single_excitation_truncation(basis):
    assert all(s.excitation() <= 1 for s in basis.states)


def test_index_lookup_inverse(basis):
    for i, s in enumerate(basis.states):
        assert basis.index_of(s) == i
    with pytest.raises(KeyError):
        basis.index_of(BasisState("e0", "eL"))


def test_duplicate_states_rejected(basis):
    with pytest.raises(ValueError, match="duplicate"):
        Basis(basis.states + (basis.states[0],))


def test_basis_state_validation():
    with pytest.raises(ValueError):
        BasisState("gX", "g0")
    with pytest.raises(ValueError):
        BasisState("g0", "e0")  # e0 is not an atom-2 level
    with pytest.raises(ValueError):
        BasisState("g0", "g0", (0, 0, 2, 0, 0, 0))


@pytest.mark.parametrize("mode", MODES)
def test_annihilation_nilpotent(mode, basis):
    a = annihilation(mode, basis).matrix
    assert np.max(np.abs(a @ a)) == 0.0


def test_annihilation_examples(basis):
    states = coherent_subspace_states()
    a = annihilation(ModeId("cavity1", "L"), basis).matrix
    out = a @ basis.ket(states[2])  # single cavity-1 L photon
    assert np.allclose(out, basis.ket(BasisState("gL", "g0")))
    assert np.max(np.abs(a @ basis.ket(initial_state()))) == 0.0
    b = annihilation(ModeId("fiber", "L"), basis).matrix
    assert np.allclose(b @ basis.ket(states[4]), basis.ket(BasisState("gL", "g0")))


def test_annihilation_unknown_mode(basis):
    with pytest.raises(ValueError, match="unknown mode"):
        annihilation(ModeId("waveguide", "L"), basis)


def test_sigma_examples(basis):
    states = coherent_subspace_states()
    s1 = atomic_sigma(1, "e0", "g0", basis).matrix
    assert np.allclose(s1 @ basis.ket(0), basis.ket(states[1]))
    assert np.max(np.abs(s1 @ basis.ket(states[2]))) == 0.0  # atom 1 in gL
    s2 = atomic_sigma(2, "eL", "gL", basis).matrix
    assert np.allclose(s2 @ basis.ket(10), basis.ket(states[8]))


def test_sigma_invalid_arguments(basis):
    with pytest.raises(ValueError, match="which_atom"):
        atomic_sigma(3, "e0", "g0", basis)
    with pytest.raises(ValueError, match="pairing"):
        atomic_sigma(1, "eL", "g0", basis)
    with pytest.raises(ValueError, match="pairing"):
        atomic_sigma(2, "e0", "g0", basis)


@pytest.mark.parametrize("atom,levels", [(1, ATOM1_LEVELS), (2, ATOM2_LEVELS)])
def test_sigma_adjoint_pairs(atom, levels, basis):
    for up in levels:
        for lo in levels:
            if up == lo:
                continue
            lhs = atomic_sigma(atom, up, lo, basis).matrix.conj().T
            rhs = atomic_sigma(atom, lo, up, basis).matrix
            assert np.array_equal(lhs, rhs)


def test_operator_hermitian_flag():
    with pytest.raises(ValueError, match="not Hermitian"):
        Operator(np.array([[0.0, 1.0], [0.0, 0.0]]), hermitian=True)
    op = Operator(np.array([[0.0, 1.0], [1.0, 0.0]]), hermitian=True)
    assert op.dim == 2
    assert np.array_equal(op.dag().matrix, op.matrix)


def test_state_labels(basis):
    assert basis.states[0].label() == "g0,g0"
    assert basis.states[2].label() == "gL,g0,c1L"
    assert len(set(basis.labels())) == 16
