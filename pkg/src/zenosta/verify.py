"""Named consistency checks runnable from the CLI.

Each check exercises one structural or numerical invariant of the model,
the pulse design or the integrators, and reports pass/fail with a short
quantitative detail string.  ``run_all_checks`` is the engine behind the
``verify`` subcommand; the pytest suite covers the same ground (and more)
for development.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np
from scipy.integrate import solve_ivp

from .basis import (
    ATOM1_LEVELS,
    ATOM2_LEVELS,
    MODES,
    annihilation,
    atomic_sigma,
    closure_oracle,
    coherent_subspace_states,
    enumerate_basis,
)
from .dynamics import (
    evolve_lindblad,
    evolve_schrodinger,
    standard_channels,
    target_state,
)
from .experiments import RunConfig, effective_fidelity, unitary_fidelity, lindblad_fidelity
from .hamiltonians import (
    SystemParams,
    build_H_al,
    dark_subspace,
    distributed_dark_state,
    hamiltonian_matrix_fn,
)
from .pulses import (
    AuxAngles,
    angle_derivatives,
    boundary_commutator_norms,
    closed_form_fidelity,
    coupling_hamiltonian_3,
    epsilon_star,
    invariant_matrix,
    pulses_from_aux,
    reference_angles,
    reference_protocol,
)

SQRT2 = np.sqrt(2.0)


@dataclass
class CheckResult:
    name: str
    status: str  # "pass" | "fail" | "info"
    detail: str

    def as_dict(self) -> dict:
        return {"name": self.name, "status": self.status, "detail": self.detail}


def _result(name: str, ok: bool, detail: str) -> CheckResult:
    return CheckResult(name, "pass" if ok else "fail", detail)


def run_all_checks(cfg: RunConfig) -> list[CheckResult]:
    checks: list[CheckResult] = []
    basis = enumerate_basis()
    params = cfg.system_params()
    protocol = reference_protocol(cfg.tf, cfg.eps)

    # --- basis structure -------------------------------------------------
    oracle = closure_oracle()
    ok = set(basis.states) == set(oracle) and basis.dim == 16
    checks.append(_result("basis-closure", ok, f"{basis.dim} states, oracle match={ok}"))

    ok = set(basis.states[:12]) == set(coherent_subspace_states()) and tuple(
        basis.states[:12]
    ) == coherent_subspace_states()
    checks.append(_result("coherent-block-order", ok, "indices 0-11 in canonical order"))

    worst = 0.0
    for mode in MODES:
        a = annihilation(mode, basis).matrix
        worst = max(worst, float(np.max(np.abs(a @ a))))
    checks.append(_result("annihilation-nilpotent", worst == 0.0, f"max |a^2| = {worst:.1e}"))

    worst = 0.0
    for atom, levels in ((1, ATOM1_LEVELS), (2, ATOM2_LEVELS)):
        for up, lo in permutations(levels, 2):
            d = atomic_sigma(atom, up, lo, basis).matrix.conj().T - atomic_sigma(
                atom, lo, up, basis
            ).matrix
            worst = max(worst, float(np.max(np.abs(d))))
    checks.append(_result("sigma-adjoint-pairs", worst == 0.0, f"max defect = {worst:.1e}"))

    # --- dark subspace ----------------------------------------------------
    worst_dim_ok = True
    worst_resid = 0.0
    worst_pref = 0.0
    for ratio in (0.5, 1.0, 2.0):
        p = SystemParams(g=1.0, v=ratio, t_f=cfg.tf, eps=cfg.eps)
        try:
            zs = dark_subspace(p, basis)
        except RuntimeError:
            worst_dim_ok = False
            continue
        from .hamiltonians import build_H_acf

        h = build_H_acf(p, basis).matrix
        for vec in zs.vectors:
            worst_resid = max(worst_resid, float(np.linalg.norm(h @ vec)))
        h_al = build_H_al(1.0, 0.0, basis).matrix
        proj = zs.projector @ h_al @ zs.projector
        amp = np.vdot(distributed_dark_state(p, basis), proj @ basis.ket(0))
        expected = ratio / np.sqrt(3 * ratio**2 + 2)
        worst_pref = max(worst_pref, abs(amp - expected))
    checks.append(
        _result(
            "coupling-null-space",
            worst_dim_ok and worst_resid <= 1e-10,
            f"dim ok={worst_dim_ok}, max ||H vec|| = {worst_resid:.2e}",
        )
    )
    checks.append(
        _result(
            "dark-projection-prefactor",
            worst_pref <= 1e-12,
            f"max |amp - v/sqrt(3v^2+2g^2)| = {worst_pref:.2e}",
        )
    )

    # --- pulse design ------------------------------------------------------
    angles = reference_angles(cfg.tf, cfg.eps)
    chi = 1.0
    dt_fd = cfg.tf / 1e5
    worst = 0.0
    for t in np.linspace(dt_fd, cfg.tf - dt_fd, 1000):
        i_p = invariant_matrix(angles.nu(t + dt_fd), angles.beta(t + dt_fd), chi)
        i_m = invariant_matrix(angles.nu(t - dt_fd), angles.beta(t - dt_fd), chi)
        di = (i_p - i_m) / (2 * dt_fd)
        h = coupling_hamiltonian_3(protocol.omega1(t), protocol.omega2_prime(t))
        inv = invariant_matrix(angles.nu(t), angles.beta(t), chi)
        resid = np.linalg.norm(1j * di - (h @ inv - inv @ h))
        worst = max(worst, float(resid))
    checks.append(
        _result("invariance-residual", worst <= 1e-6 * chi, f"max residual = {worst:.2e}")
    )

    n0, nf = boundary_commutator_norms(protocol, chi)
    o1_0 = protocol.omega1(0.0)
    ratio_defect = abs(protocol.omega1(cfg.tf) - SQRT2 * protocol.omega2_prime(cfg.tf))
    ok = o1_0 == 0.0 and ratio_defect <= 1e-10 and n0 <= 1e-12 and nf <= 1e-12
    checks.append(
        _result(
            "boundary-conditions",
            ok,
            f"omega1(0)={o1_0:.1e}, ratio defect={ratio_defect:.1e}, "
            f"aligned commutators=({n0:.1e}, {nf:.1e})",
        )
    )

    sol = solve_ivp(
        angle_derivatives(protocol.omega1, protocol.omega2_prime),
        (0.0, cfg.tf),
        [cfg.eps, 0.0],
        method="DOP853",
        rtol=1e-12,
        atol=1e-13,
        dense_output=True,
    )
    rhs = angle_derivatives(protocol.omega1, protocol.omega2_prime)
    integrated = AuxAngles(
        nu=lambda t: sol.sol(t)[0],
        beta=lambda t: sol.sol(t)[1],
        nu_dot=lambda t: rhs(t, sol.sol(t))[0],
        beta_dot=lambda t: rhs(t, sol.sol(t))[1],
        t_f=cfg.tf,
    )
    o1_rec, o2_rec = pulses_from_aux(integrated)
    scale = protocol.peak_amplitude
    worst = 0.0
    for t in np.linspace(0.0, cfg.tf, 201):
        worst = max(
            worst,
            abs(o1_rec(t) - protocol.omega1(t)) / scale,
            abs(o2_rec(t) - protocol.omega2_prime(t)) / scale,
        )
    checks.append(
        _result("pulse-roundtrip", worst <= 1e-7, f"max relative defect = {worst:.2e}")
    )

    h_eps = 1e-5
    star = epsilon_star()
    slope = (closed_form_fidelity(star + h_eps) - closed_form_fidelity(star - h_eps)) / (
        2 * h_eps
    )
    checks.append(
        _result("fidelity-stationary", abs(slope) <= 1e-6, f"|dF/deps| = {abs(slope):.2e}")
    )

    unity_defect = abs(closed_form_fidelity(star) - 1.0)
    checks.append(
        _result("closed-form-unity", unity_defect <= 1e-12, f"|F(eps*)-1| = {unity_defect:.2e}")
    )
    if abs(cfg.eps - star) > 0.01 * star:
        f_cfg = closed_form_fidelity(cfg.eps)
        checks.append(
            CheckResult(
                "closed-form-at-config-eps",
                "info",
                f"closed_form_fidelity({cfg.eps:g}) = {f_cfg:.6f} "
                "(unit fidelity only on the 2n-pi phase branches)",
            )
        )

    # --- dynamics ----------------------------------------------------------
    if not np.isclose(cfg.v_over_g, 1.0, rtol=1e-12, atol=0.0):
        checks.append(
            CheckResult(
                "effective-model-agreement",
                "fail",
                f"precondition failure: three-level reduction requires v = g "
                f"(got v/g = {cfg.v_over_g:g})",
            )
        )
    else:
        res_full = evolve_schrodinger(
            hamiltonian_matrix_fn(protocol, params, basis),
            basis.ket(0),
            cfg.tf,
            cfg.integrator(),
            target=target_state(basis),
            tracked={"initial": 0, "gLgL": 10, "gRgR": 11},
        )
        f_full = res_full.final_fidelity
        f_eff = effective_fidelity(cfg.tf, cfg.eps, cfg.steps)
        checks.append(
            _result(
                "effective-model-agreement",
                abs(f_full - f_eff) <= 0.01,
                f"F_full={f_full:.6f}, F_eff={f_eff:.6f}, gap={abs(f_full - f_eff):.4f}",
            )
        )

        checks.append(
            _result(
                "unitary-conservation",
                res_full.max_norm_drift <= 1e-9,
                f"max norm drift = {res_full.max_norm_drift:.2e}",
            )
        )

        pops = [res_full.populations[k][-1] for k in ("initial", "gLgL", "gRgR")]
        ok = all(abs(p - 1.0 / 3.0) <= 0.01 for p in pops)
        checks.append(
            _result(
                "population-endpoint",
                ok,
                "final populations = " + ", ".join(f"{p:.4f}" for p in pops),
            )
        )

        gaps = []
        for tf_short in (40.0, 30.0, 20.0, 10.0):
            g_full = unitary_fidelity(tf_short, cfg.eps, cfg.v_over_g, cfg.steps)
            g_eff = effective_fidelity(tf_short, cfg.eps, cfg.steps)
            gaps.append(abs(g_full - g_eff))
        ok = all(gaps[i] < gaps[i + 1] for i in range(len(gaps) - 1))
        checks.append(
            _result(
                "zeno-gap-growth",
                ok,
                "gaps at tf=40,30,20,10: " + ", ".join(f"{x:.4f}" for x in gaps),
            )
        )

        f_half = unitary_fidelity(cfg.tf, cfg.eps, cfg.v_over_g, 2 * cfg.steps)
        checks.append(
            _result(
                "step-halving",
                abs(f_full - f_half) <= 1e-8,
                f"|F({cfg.steps}) - F({2 * cfg.steps})| = {abs(f_full - f_half):.2e}",
            )
        )

        psi0 = basis.ket(0)
        res_lb = evolve_lindblad(
            hamiltonian_matrix_fn(protocol, params, basis),
            np.outer(psi0, psi0.conj()),
            standard_channels(params, basis),
            cfg.tf,
            cfg.integrator(record_stride=max(1, cfg.steps // 100)),
            target=target_state(basis),
        )
        ok = (
            res_lb.max_trace_drift <= 1e-8
            and res_lb.max_herm_residual <= 1e-10
            and res_lb.min_eigenvalue >= -1e-8
        )
        checks.append(
            _result(
                "lindblad-conservation",
                ok,
                f"trace drift={res_lb.max_trace_drift:.2e}, "
                f"herm={res_lb.max_herm_residual:.2e}, min eig={res_lb.min_eigenvalue:.2e}",
            )
        )

        f_closed = lindblad_fidelity(cfg.tf, cfg.eps, cfg.v_over_g, 0.0, 0.0, cfg.steps)
        f_unitary = unitary_fidelity(cfg.tf, cfg.eps, cfg.v_over_g, cfg.steps)
        checks.append(
            _result(
                "closed-system-equivalence",
                abs(f_closed - f_unitary) <= 1e-8,
                f"|F_lindblad(0,0) - F_schrodinger| = {abs(f_closed - f_unitary):.2e}",
            )
        )

    return checks


def report(checks: list[CheckResult]) -> dict:
    return {
        "checks": [c.as_dict() for c in checks],
        "passed": all(c.status != "fail" for c in checks),
    }
