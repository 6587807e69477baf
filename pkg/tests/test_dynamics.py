import numpy as np
import pytest

import zenosta.dynamics as dyn
from zenosta.dynamics import (
    IntegratorConfig,
    IntegratorError,
    LindbladChannel,
    evolve_lindblad,
    evolve_schrodinger,
    fidelity,
    standard_channels,
    target_state,
)
from zenosta.hamiltonians import SystemParams, hamiltonian_matrix_fn
from zenosta.pulses import reference_protocol, effective_hamiltonian_fn, target_state_reduced
from zenosta.experiments import TRACKED_POPULATIONS


def _full_model(basis, params, tf=None, eps=None):
    tf = tf if tf is not None else params.t_f
    eps = eps if eps is not None else params.eps
    protocol = reference_protocol(tf, eps)
    return hamiltonian_matrix_fn(protocol, params, basis)


# ---------------------------------------------------------------------------
# Schrodinger integration
# ---------------------------------------------------------------------------

def test_free_evolution_is_identity():
    dim = 5
    psi0 = np.zeros(dim, complex)
    psi0[2] = 1.0
    res = evolve_schrodinger(
        lambda t: np.zeros((dim, dim), complex), psi0, 3.0, IntegratorConfig(steps=100)
    )
    assert np.array_equal(res.final_state, psi0)
    assert res.max_norm_drift == 0.0


def test_unnormalized_input_rejected():
    with pytest.raises(ValueError, match="normalized"):
        evolve_schrodinger(lambda t: np.zeros((2, 2)), np.array([1.0, 1.0]), 1.0)


def test_norm_drift_failure_reported():
    h = np.diag([0.0, 400.0]).astype(complex)
    psi0 = np.array([1.0, 1.0], complex) / np.sqrt(2)
    with pytest.raises(IntegratorError, match="norm drift"):
        evolve_schrodinger(lambda t: h, psi0, 10.0, IntegratorConfig(steps=20))


def test_headline_full_model_fidelity(basis):
    params = SystemParams()
    res = evolve_schrodinger(
        _full_model(basis, params),
        basis.ket(0),
        params.t_f,
        IntegratorConfig(),
        target=target_state(basis),
        tracked=TRACKED_POPULATIONS,
    )
    assert res.final_fidelity == pytest.approx(0.996, abs=0.005)
    assert res.max_norm_drift <= 1e-9
    for label in TRACKED_POPULATIONS:
        arr = res.populations[label]
        assert np.all(arr >= -1e-12) and np.all(arr <= 1.0 + 1e-8)
        assert res.populations[label][-1] == pytest.approx(1.0 / 3.0, abs=0.01)
    assert res.times[0] == 0.0 and res.times[-1] == pytest.approx(params.t_f)
    assert np.all(np.diff(res.times) > 0)


def test_effective_model_endpoint_populations():
    from zenosta.pulses import epsilon_star

    tf, eps = 90.0, epsilon_star()
    protocol = reference_protocol(tf, eps)
    psi0 = np.array([1.0, 0.0, 0.0], complex)
    res = evolve_schrodinger(
        effective_hamiltonian_fn(protocol),
        psi0,
        tf,
        IntegratorConfig(),
        target=target_state_reduced(),
        tracked={"initial": 0, "symmetric": 2},
    )
    assert res.populations["initial"][-1] == pytest.approx(1.0 / 3.0, abs=1e-4)
    assert res.populations["symmetric"][-1] == pytest.approx(2.0 / 3.0, abs=1e-4)
    assert res.final_fidelity == pytest.approx(1.0, abs=1e-9)


def test_step_halving_convergence(basis):
    params = SystemParams()
    target = target_state(basis)
    fids = []
    for steps in (20000, 40000):
        res = evolve_schrodinger(
            _full_model(basis, params),
            basis.ket(0),
            params.t_f,
            IntegratorConfig(steps=steps, record_stride=steps),
            target=target,
        )
        fids.append(res.final_fidelity)
    assert abs(fids[0] - fids[1]) <= 1e-8


def test_result_without_target_has_no_fidelity(basis):
    params = SystemParams()
    res = evolve_schrodinger(
        _full_model(basis, params), basis.ket(0), 1.0, IntegratorConfig(steps=200)
    )
    assert res.fidelity is None
    with pytest.raises(ValueError):
        res.final_fidelity


# ---------------------------------------------------------------------------
# fidelity
# ---------------------------------------------------------------------------

def test_fidelity_pure_states(basis):
    t = target_state(basis)
    assert fidelity(t, t) == pytest.approx(1.0, abs=1e-15)
    assert fidelity(basis.ket(3), t) == 0.0


def test_fidelity_density_matrices(basis):
    t = target_state(basis)
    rho = np.eye(basis.dim, dtype=complex) / basis.dim
    assert fidelity(rho, t) == pytest.approx(1.0 / 16.0, abs=1e-14)
    pure = np.outer(t, t.conj())
    assert fidelity(pure, t) == pytest.approx(1.0, abs=1e-14)


def test_fidelity_dimension_mismatch(basis):
    with pytest.raises(ValueError, match="mismatch"):
        fidelity(np.zeros(3, complex), target_state(basis))
    with pytest.raises(ValueError, match="mismatch"):
        fidelity(np.zeros((3, 3), complex), target_state(basis))


# ---------------------------------------------------------------------------
# channels
# ---------------------------------------------------------------------------

def test_standard_channel_count_and_rates(basis):
    channels = standard_channels(SystemParams(kappa=0.02, gamma=0.03), basis)
    assert len(channels) == 15
    rates = [ch.rate for ch in channels]
    assert rates[:6] == [0.02] * 6
    assert rates[6:] == pytest.approx([0.01] * 9)  # gamma split over 3 branches

    silent = standard_channels(SystemParams(), basis)
    assert all(ch.rate == 0.0 for ch in silent)
    assert len(silent) == 15


def test_jump_operators_lower_excitation(basis):
    channels = standard_channels(SystemParams(kappa=1.0, gamma=1.0), basis)
    for ch in channels:
        m = ch.operator.matrix
        for col, src in enumerate(basis.states):
            for row in np.nonzero(m[:, col])[0]:
                assert basis.states[row].excitation() == src.excitation() - 1


def test_negative_rate_rejected(basis):
    from zenosta.basis import MODES, annihilation

    with pytest.raises(ValueError):
        LindbladChannel(annihilation(MODES[0], basis), -0.1)


# ---------------------------------------------------------------------------
# Lindblad integration
# ---------------------------------------------------------------------------

def _initial_rho(basis):
    psi0 = basis.ket(0)
    return np.outer(psi0, psi0.conj())


def test_rho0_validation(basis):
    params = SystemParams()
    h = _full_model(basis, params)
    channels = standard_channels(params, basis)
    bad_trace = np.eye(basis.dim, dtype=complex)
    with pytest.raises(ValueError, match="unit trace"):
        evolve_lindblad(h, bad_trace, channels, 1.0)
    non_herm = _initial_rho(basis)
    non_herm[0, 1] = 1.0
    with pytest.raises(ValueError, match="Hermitian"):
        evolve_lindblad(h, non_herm, channels, 1.0)
    indefinite = np.zeros((basis.dim, basis.dim), complex)
    indefinite[0, 0] = 2.0
    indefinite[1, 1] = -1.0
    with pytest.raises(ValueError, match="positive"):
        evolve_lindblad(h, indefinite, channels, 1.0)


def test_closed_system_matches_schrodinger(basis):
    params = SystemParams()
    h = _full_model(basis, params)
    target = target_state(basis)
    res_s = evolve_schrodinger(
        h, basis.ket(0), params.t_f, IntegratorConfig(record_stride=20000), target=target
    )
    res_l = evolve_lindblad(
        h,
        _initial_rho(basis),
        standard_channels(params, basis),
        params.t_f,
        IntegratorConfig(record_stride=20000),
        target=target,
    )
    assert abs(res_l.final_fidelity - res_s.final_fidelity) <= 1e-8
    assert res_l.max_trace_drift <= 1e-8
    assert res_l.max_herm_residual <= 1e-10
    assert res_l.min_eigenvalue >= -1e-8


def test_open_system_reference_points(basis):
    """Regression pins for the decoherence model (published-value checks live
    in the acceptance suite)."""
    params = SystemParams(kappa=0.02, gamma=0.02)
    res = evolve_lindblad(
        _full_model(basis, params),
        _initial_rho(basis),
        standard_channels(params, basis),
        params.t_f,
        IntegratorConfig(record_stride=2000),
        target=target_state(basis),
    )
    assert res.final_fidelity == pytest.approx(0.936821, abs=2e-3)
    assert res.max_trace_drift <= 1e-8
    assert res.min_eigenvalue >= -1e-8

    params2 = SystemParams(kappa=0.0003, gamma=0.001)
    res2 = evolve_lindblad(
        _full_model(basis, params2),
        _initial_rho(basis),
        standard_channels(params2, basis),
        params2.t_f,
        IntegratorConfig(record_stride=20000),
        target=target_state(basis),
    )
    assert res2.final_fidelity == pytest.approx(0.993, abs=0.004)


def test_fast_and_general_dissipator_paths_agree(basis, monkeypatch):
    params = SystemParams(kappa=0.01, gamma=0.015)
    h = _full_model(basis, params)
    channels = standard_channels(params, basis)
    cfg = IntegratorConfig(steps=2000, record_stride=2000)
    fast = evolve_lindblad(h, _initial_rho(basis), channels, params.t_f, cfg)
    monkeypatch.setattr(dyn, "_single_entry_decomposition", lambda cs: None)
    general = evolve_lindblad(h, _initial_rho(basis), channels, params.t_f, cfg)
    assert np.max(np.abs(fast.final_state - general.final_state)) <= 1e-12


def test_lindblad_populations_tracked(basis):
    params = SystemParams(kappa=0.01, gamma=0.01)
    res = evolve_lindblad(
        _full_model(basis, params),
        _initial_rho(basis),
        standard_channels(params, basis),
        params.t_f,
        IntegratorConfig(steps=4000, record_stride=400),
        tracked={s.label(): i for i, s in enumerate(basis.states)},
    )
    total = sum(res.populations[s.label()][-1] for s in basis.states)
    assert total == pytest.approx(1.0, abs=1e-10)
