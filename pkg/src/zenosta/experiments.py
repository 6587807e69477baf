"""Experiment orchestration: reference runs, parameter sweeps, CSV output.

Every command renders one dataset as a CSV file with '#'-prefixed metadata
lines (full parameter set, integrator settings, grid definitions) followed
by a header row.  Sweeps distribute points over a stateless worker pool and
reassemble them in grid order, so output files are byte-identical for any
worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from multiprocessing import get_context
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .basis import Basis, enumerate_basis
from .dynamics import (
    IntegratorConfig,
    evolve_lindblad,
    evolve_schrodinger,
    standard_channels,
    target_state,
)
from .hamiltonians import SystemParams, hamiltonian_matrix_fn
from .pulses import (
    closed_form_fidelity,
    effective_hamiltonian_fn,
    reference_protocol,
    target_state_reduced,
)

#: basis indices of the populations the evolve command tracks
TRACKED_POPULATIONS = {"pop_g0g0": 0, "pop_gLgL": 10, "pop_gRgR": 11}


@dataclass(frozen=True)
class RunConfig:
    """Defaults reproduce the headline numbers when unmodified."""

    tf: float = 90.0
    eps: float = 0.153
    v_over_g: float = 1.0
    kappa: float = 0.0
    gamma: float = 0.0
    steps: int = 20000
    workers: int = 1

    def system_params(self, **overrides) -> SystemParams:
        values = dict(
            g=1.0,
            v=self.v_over_g,
            kappa=self.kappa,
            gamma=self.gamma,
            t_f=self.tf,
            eps=self.eps,
        )
        values.update(overrides)
        return SystemParams(**values)

    def integrator(self, record_stride: int | None = None) -> IntegratorConfig:
        stride = record_stride if record_stride is not None else max(1, self.steps // 1000)
        return IntegratorConfig(steps=self.steps, record_stride=stride)

    def metadata(self) -> list[tuple[str, str]]:
        return [
            ("generator", f"zenosta {__version__}"),
            ("tf", _fmt(self.tf)),
            ("eps", _fmt(self.eps)),
            ("v_over_g", _fmt(self.v_over_g)),
            ("kappa", _fmt(self.kappa)),
            ("gamma", _fmt(self.gamma)),
            ("integrator", "fixed-step rk4"),
            ("steps", str(self.steps)),
        ]


@dataclass(frozen=True)
class GridAxis:
    """A 1-D sweep grid: linspace(start, stop, count)."""

    name: str
    start: float
    stop: float
    count: int

    def __post_init__(self) -> None:
        if self.count < 2:
            raise ValueError("grid needs at least 2 points")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ValueError("grid bounds must be finite")
        if self.start == self.stop:
            raise ValueError("grid must be monotone (start != stop)")

    def points(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)

    def describe(self) -> str:
        return f"{_fmt(self.start)}:{_fmt(self.stop)}:{self.count}"


@dataclass(frozen=True)
class SweepSpec:
    """Axes (one or two) plus the fixed configuration context."""

    axes: tuple[GridAxis, ...]
    config: RunConfig

    def __post_init__(self) -> None:
        if len(self.axes) not in (1, 2):
            raise ValueError("sweeps are 1-D or 2-D")

    def tasks(self) -> list[tuple[float, ...]]:
        if len(self.axes) == 1:
            return [(x,) for x in self.axes[0].points()]
        return [
            (x, y)
            for x in self.axes[0].points()
            for y in self.axes[1].points()
        ]


# ---------------------------------------------------------------------------
# single-point evaluations (module level so worker processes can import them)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=1)
def _basis() -> Basis:
    return enumerate_basis()


def unitary_fidelity(
    tf: float, eps: float, v_over_g: float, steps: int
) -> float:
    """Full-model closed-system fidelity of the designed protocol."""
    basis = _basis()
    params = SystemParams(g=1.0, v=v_over_g, t_f=tf, eps=eps)
    protocol = reference_protocol(tf, eps)
    res = evolve_schrodinger(
        hamiltonian_matrix_fn(protocol, params, basis),
        basis.ket(0),
        tf,
        IntegratorConfig(steps=steps, record_stride=steps),
        target=target_state(basis),
    )
    return res.final_fidelity


def batched_unitary_fidelities(
    tfs: Sequence[float], epss: Sequence[float], v_over_g: float, steps: int
) -> np.ndarray:
    """Closed-system fidelities for many protocols, integrated in lockstep.

    All trajectories share the step count, so one vectorized RK4 loop evolves
    the whole batch; each row is arithmetically independent of the others,
    which keeps results identical for any batch composition.  Cross-checked
    against the single-trajectory integrator in the test suite.
    """
    from .hamiltonians import _coupling_matrix, _drive_generators
    from .pulses import BETA_F, SQRT2 as _SQRT2, SQRT5 as _SQRT5

    basis = _basis()
    h_acf = _coupling_matrix(basis, 1.0, v_over_g)
    x1, x2 = _drive_generators(basis)
    x2 = x2 / _SQRT2  # drives enter as omega2_prime / sqrt(2)

    tfs = np.asarray(tfs, dtype=float)
    epss = np.asarray(epss, dtype=float)
    n_b = len(tfs)
    amps = _SQRT5 * BETA_F / (tfs * np.tan(epss))
    rates = BETA_F / tfs
    dts = tfs / steps

    psi = np.zeros((n_b, basis.dim), dtype=complex)
    psi[:, 0] = 1.0

    def h_batch(k_half: int) -> np.ndarray:
        # pulse samples on the half-step grid: t = k_half * dt / 2
        phase = rates * (0.5 * k_half * dts)
        o1 = amps * np.sin(phase)
        o2 = amps * np.cos(phase)
        return (
            h_acf[None, :, :]
            + o1[:, None, None] * x1[None, :, :]
            + o2[:, None, None] * x2[None, :, :]
        )

    def apply(h: np.ndarray, v: np.ndarray) -> np.ndarray:
        return -1j * np.einsum("bij,bj->bi", h, v)

    half_dt = (0.5 * dts)[:, None]
    full_dt = dts[:, None]
    h_next = h_batch(0)
    for k in range(steps):
        h1 = h_next
        h2 = h_batch(2 * k + 1)
        h4 = h_batch(2 * k + 2)
        k1 = apply(h1, psi)
        k2 = apply(h2, psi + half_dt * k1)
        k3 = apply(h2, psi + half_dt * k2)
        k4 = apply(h4, psi + full_dt * k3)
        psi = psi + (full_dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        h_next = h4

    drifts = np.abs(np.linalg.norm(psi, axis=1) - 1.0)
    if np.any(drifts > 1e-9):
        raise RuntimeError(
            f"batched norm drift up to {drifts.max():.3e} exceeded 1e-9; increase steps"
        )
    target = target_state(basis)
    return np.abs(psi @ target.conj()) ** 2


def effective_fidelity(tf: float, eps: float, steps: int) -> float:
    """Three-level-model fidelity of the designed protocol (v = g assumed)."""
    protocol = reference_protocol(tf, eps)
    psi0 = np.array([1.0, 0.0, 0.0], dtype=complex)
    res = evolve_schrodinger(
        effective_hamiltonian_fn(protocol),
        psi0,
        tf,
        IntegratorConfig(steps=steps, record_stride=steps),
        target=target_state_reduced(),
    )
    return res.final_fidelity


def lindblad_fidelity(
    tf: float, eps: float, v_over_g: float, kappa: float, gamma: float, steps: int
) -> float:
    """Full-model open-system fidelity of the designed protocol."""
    basis = _basis()
    params = SystemParams(g=1.0, v=v_over_g, kappa=kappa, gamma=gamma, t_f=tf, eps=eps)
    protocol = reference_protocol(tf, eps)
    psi0 = basis.ket(0)
    res = evolve_lindblad(
        hamiltonian_matrix_fn(protocol, params, basis),
        np.outer(psi0, psi0.conj()),
        standard_channels(params, basis),
        tf,
        IntegratorConfig(steps=steps, record_stride=steps),
        target=target_state(basis),
    )
    return res.final_fidelity


def batched_lindblad_fidelities(
    rate_pairs: Sequence[tuple[float, float]],
    tf: float,
    eps: float,
    v_over_g: float,
    steps: int,
) -> np.ndarray:
    """Open-system fidelities for many (kappa, gamma) pairs, integrated in lockstep.

    All points share the drive protocol, so the Hamiltonian is built once per
    RK4 stage and broadcast over the batch.  The commutator uses the exact
    identity rho H = (H rho)^+ for Hermitian rho; every jump operator of this
    model has a single nonzero entry, so the dissipator reduces to an
    elementwise weight plus a diagonal scatter per batch row.  Cross-checked
    against the single-trajectory master-equation integrator in the tests.
    """
    basis = _basis()
    params = SystemParams(g=1.0, v=v_over_g, t_f=tf, eps=eps)
    protocol = reference_protocol(tf, eps)
    h_of_t = hamiltonian_matrix_fn(protocol, params, basis)
    dim = basis.dim
    n_b = len(rate_pairs)

    # per-point dissipator structure from the standard channel set
    w_stack = np.empty((n_b, dim, dim))
    jump_stack = np.empty((n_b, dim, dim))
    for b, (kappa, gamma) in enumerate(rate_pairs):
        p = SystemParams(g=1.0, v=v_over_g, kappa=kappa, gamma=gamma, t_f=tf, eps=eps)
        rows, cols, weights = _scaled_single_entries(standard_channels(p, basis))
        d_diag = np.zeros(dim)
        np.add.at(d_diag, cols, weights)
        w_stack[b] = -0.5 * (d_diag[:, None] + d_diag[None, :])
        jmap = np.zeros((dim, dim))
        np.add.at(jmap, (rows, cols), weights)
        jump_stack[b] = jmap

    diag = np.arange(dim)

    def rhs(hmat: np.ndarray, rho: np.ndarray) -> np.ndarray:
        a = np.matmul(hmat, rho)
        out = -1j * (a - a.conj().transpose(0, 2, 1))
        out += w_stack * rho
        out[:, diag, diag] += np.einsum(
            "bij,bj->bi", jump_stack, rho[:, diag, diag].real
        )
        return out

    rho = np.zeros((n_b, dim, dim), dtype=complex)
    rho[:, 0, 0] = 1.0
    dt = tf / steps
    h_next = h_of_t(0.0)
    for k in range(steps):
        t = k * dt
        h1 = h_next
        h2 = h_of_t(t + 0.5 * dt)
        h4 = h_of_t(t + dt)
        k1 = rhs(h1, rho)
        k2 = rhs(h2, rho + (0.5 * dt) * k1)
        k3 = rhs(h2, rho + (0.5 * dt) * k2)
        k4 = rhs(h4, rho + dt * k3)
        rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        rho = 0.5 * (rho + rho.conj().transpose(0, 2, 1))
        h_next = h4

    drifts = np.abs(np.einsum("bii->b", rho).real - 1.0)
    if np.any(drifts > 1e-8):
        raise RuntimeError(
            f"batched trace drift up to {drifts.max():.3e} exceeded 1e-8; increase steps"
        )
    target = target_state(basis)
    return np.real(np.einsum("i,bij,j->b", target.conj(), rho, target))


def _scaled_single_entries(channels) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    rows, cols, weights = [], [], []
    for ch in channels:
        nz = np.argwhere(np.abs(ch.operator.matrix) > 0)
        if len(nz) == 0:
            continue
        if len(nz) != 1:
            raise ValueError("batched path requires single-entry jump operators")
        i, j = nz[0]
        rows.append(int(i))
        cols.append(int(j))
        weights.append(ch.rate * abs(ch.operator.matrix[i, j]) ** 2)
    return np.array(rows, int), np.array(cols, int), np.array(weights)


#: batch width is fixed (not worker-derived) so chunking never changes results
_BATCH_WIDTH = 56


def _batch_task(args: tuple) -> np.ndarray:
    return batched_unitary_fidelities(*args)


def _lb_batch_task(args: tuple) -> np.ndarray:
    return batched_lindblad_fidelities(*args)


def _chunked_pool_map(fn, tasks, workers: int) -> list[np.ndarray]:
    if workers <= 1 or len(tasks) == 1:
        return [fn(t) for t in tasks]
    with get_context("fork").Pool(workers) as pool:
        return pool.map(fn, tasks)


def run_unitary_points(
    pairs: Sequence[tuple[float, float]], v_over_g: float, steps: int, workers: int
) -> list[float]:
    """Fidelities for a list of (tf, eps) protocols via the batched integrator."""
    chunks = [pairs[i : i + _BATCH_WIDTH] for i in range(0, len(pairs), _BATCH_WIDTH)]
    tasks = [
        (tuple(tf for tf, _ in c), tuple(e for _, e in c), v_over_g, steps)
        for c in chunks
    ]
    parts = _chunked_pool_map(_batch_task, tasks, workers)
    return [float(x) for x in np.concatenate(parts)]


def run_lindblad_points(
    rate_pairs: Sequence[tuple[float, float]],
    tf: float,
    eps: float,
    v_over_g: float,
    steps: int,
    workers: int,
) -> list[float]:
    """Open-system fidelities for a list of (kappa, gamma) sweep points."""
    chunks = [
        tuple(rate_pairs[i : i + _BATCH_WIDTH])
        for i in range(0, len(rate_pairs), _BATCH_WIDTH)
    ]
    tasks = [(c, tf, eps, v_over_g, steps) for c in chunks]
    parts = _chunked_pool_map(_lb_batch_task, tasks, workers)
    return [float(x) for x in np.concatenate(parts)]


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{x:.12g}"


def write_csv(
    path: str | Path,
    metadata: Iterable[tuple[str, str]],
    header: Sequence[str],
    rows: Iterable[Sequence[float]],
) -> Path:
    path = Path(path)
    lines = [f"# {key} = {value}" for key, value in metadata]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(float(x)) for x in row))
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as err:
        raise OSError(f"cannot write CSV to {path}: {err}") from err
    return path


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

DEFAULT_GRID_TF = GridAxis("tf", 10.0, 150.0, 71)
DEFAULT_GRID_EPS = GridAxis("eps", 0.05, 0.5, 91)
DEFAULT_GRID_DELTA = GridAxis("delta", -0.1, 0.1, 21)
DEFAULT_GRID_RATE = GridAxis("rate", 0.0, 0.02, 21)


def cmd_pulses(cfg: RunConfig, out: str | Path) -> Path:
    """Designed drive pair sampled on 1000 points over [0, t_f]."""
    protocol = reference_protocol(cfg.tf, cfg.eps)
    ts = np.linspace(0.0, cfg.tf, 1000)
    rows = [(t, protocol.omega1(t), protocol.omega2_prime(t)) for t in ts]
    meta = cfg.metadata() + [("command", "pulses")]
    return write_csv(out, meta, ["t_g", "omega1_over_g", "omega2_prime_over_g"], rows)


def cmd_evolve(cfg: RunConfig, out: str | Path) -> Path:
    """Tracked populations and fidelity along the full-model unitary evolution."""
    basis = _basis()
    params = cfg.system_params()
    protocol = reference_protocol(cfg.tf, cfg.eps)
    res = evolve_schrodinger(
        hamiltonian_matrix_fn(protocol, params, basis),
        basis.ket(0),
        cfg.tf,
        cfg.integrator(),
        target=target_state(basis),
        tracked=TRACKED_POPULATIONS,
    )
    labels = list(TRACKED_POPULATIONS)
    rows = [
        (res.times[k], *(res.populations[lbl][k] for lbl in labels), res.fidelity[k])
        for k in range(len(res.times))
    ]
    meta = cfg.metadata() + [("command", "evolve")]
    return write_csv(out, meta, ["t_g", *labels, "fidelity"], rows)


def sweep_tf(cfg: RunConfig, grid: GridAxis) -> list[tuple[float, float]]:
    pairs = [(tf, cfg.eps) for tf in grid.points()]
    fids = run_unitary_points(pairs, cfg.v_over_g, cfg.steps, cfg.workers)
    return list(zip(grid.points(), fids))


def cmd_sweep_tf(cfg: RunConfig, out: str | Path, grid: GridAxis | None = None) -> Path:
    grid = grid or DEFAULT_GRID_TF
    rows = sweep_tf(cfg, grid)
    meta = cfg.metadata() + [("command", "sweep-tf"), ("grid_tf", grid.describe())]
    return write_csv(out, meta, ["tf_g", "fidelity"], rows)


def sweep_eps(cfg: RunConfig, grid: GridAxis) -> list[tuple[float, float, float]]:
    pairs = [(cfg.tf, e) for e in grid.points()]
    sims = run_unitary_points(pairs, cfg.v_over_g, cfg.steps, cfg.workers)
    return [
        (e, f, closed_form_fidelity(e)) for e, f in zip(grid.points(), sims)
    ]


def cmd_sweep_eps(cfg: RunConfig, out: str | Path, grid: GridAxis | None = None) -> Path:
    grid = grid or DEFAULT_GRID_EPS
    rows = sweep_eps(cfg, grid)
    meta = cfg.metadata() + [("command", "sweep-eps"), ("grid_eps", grid.describe())]
    return write_csv(out, meta, ["eps", "fidelity", "fidelity_closed_form"], rows)


def sweep_delta(
    cfg: RunConfig, grid_tf: GridAxis, grid_eps: GridAxis
) -> list[tuple[float, float, float]]:
    """Fidelity under relative deviations of duration and invariant angle.

    Deviations corrupt the protocol construction: the drive pair is rebuilt
    with the actual values tf(1 + d_tf), eps(1 + d_eps), evolution runs for
    the actual (corrupted) duration, and fidelity is judged against the
    ideal target.
    """
    spec = SweepSpec((grid_tf, grid_eps), cfg)
    pairs = [
        (cfg.tf * (1 + rt), cfg.eps * (1 + re)) for rt, re in spec.tasks()
    ]
    fids = run_unitary_points(pairs, cfg.v_over_g, cfg.steps, cfg.workers)
    return [(rt, re, f) for (rt, re), f in zip(spec.tasks(), fids)]


def cmd_sweep_delta(
    cfg: RunConfig,
    out: str | Path,
    grid_tf: GridAxis | None = None,
    grid_eps: GridAxis | None = None,
) -> Path:
    grid_tf = grid_tf or DEFAULT_GRID_DELTA
    grid_eps = grid_eps or DEFAULT_GRID_DELTA
    rows = sweep_delta(cfg, grid_tf, grid_eps)
    meta = cfg.metadata() + [
        ("command", "sweep-delta"),
        ("grid_dtf_rel", grid_tf.describe()),
        ("grid_deps_rel", grid_eps.describe()),
        (
            "deviation_semantics",
            "protocol rebuilt with actual tf/eps; evolved for actual duration; "
            "fidelity vs ideal target",
        ),
    ]
    return write_csv(out, meta, ["dtf_rel", "deps_rel", "fidelity"], rows)


def sweep_decoherence(
    cfg: RunConfig, grid_kappa: GridAxis, grid_gamma: GridAxis
) -> list[tuple[float, float, float]]:
    spec = SweepSpec((grid_kappa, grid_gamma), cfg)
    fids = run_lindblad_points(
        spec.tasks(), cfg.tf, cfg.eps, cfg.v_over_g, cfg.steps, cfg.workers
    )
    return [(k, g, f) for (k, g), f in zip(spec.tasks(), fids)]


def cmd_sweep_decoherence(
    cfg: RunConfig,
    out: str | Path,
    grid_kappa: GridAxis | None = None,
    grid_gamma: GridAxis | None = None,
) -> Path:
    grid_kappa = grid_kappa or DEFAULT_GRID_RATE
    grid_gamma = grid_gamma or DEFAULT_GRID_RATE
    rows = sweep_decoherence(cfg, grid_kappa, grid_gamma)
    meta = cfg.metadata() + [
        ("command", "sweep-decoherence"),
        ("grid_kappa_over_g", grid_kappa.describe()),
        ("grid_gamma_over_g", grid_gamma.describe()),
    ]
    return write_csv(out, meta, ["kappa_over_g", "gamma_over_g", "fidelity"], rows)
