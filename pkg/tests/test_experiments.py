import numpy as np
import pytest

from zenosta.cli import load_config_file, main, parse_grid
from zenosta.experiments import (
    GridAxis,
    RunConfig,
    SweepSpec,
    batched_unitary_fidelities,
    cmd_evolve,
    cmd_pulses,
    cmd_sweep_decoherence,
    cmd_sweep_eps,
    cmd_sweep_tf,
    unitary_fidelity,
    write_csv,
)


def read_csv(path):
    meta, header, rows = {}, None, []
    for line in path.read_text().splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].partition("=")
            meta[key.strip()] = value.strip()
        elif header is None:
            header = line.split(",")
        else:
            rows.append([float(x) for x in line.split(",")])
    return meta, header, np.array(rows)


# ---------------------------------------------------------------------------
# grids, config, CSV plumbing
# ---------------------------------------------------------------------------

def test_grid_axis_validation():
    with pytest.raises(ValueError):
        GridAxis("x", 0.0, 1.0, 1)
    with pytest.raises(ValueError):
        GridAxis("x", 0.0, 0.0, 5)
    with pytest.raises(ValueError):
        GridAxis("x", 0.0, float("inf"), 5)
    axis = GridAxis("x", 0.0, 1.0, 5)
    assert np.allclose(axis.points(), [0.0, 0.25, 0.5, 0.75, 1.0])


def test_sweep_spec_dimensions():
    cfg = RunConfig()
    with pytest.raises(ValueError):
        SweepSpec((), cfg)
    spec = SweepSpec((GridAxis("a", 0, 1, 2), GridAxis("b", 0, 1, 3)), cfg)
    assert len(spec.tasks()) == 6


def test_parse_grid():
    axis = parse_grid("0.1:0.9:5")
    assert (axis.start, axis.stop, axis.count) == (0.1, 0.9, 5)
    with pytest.raises(ValueError):
        parse_grid("1:2")


def test_config_file_parsing(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text(
        "# comment line\n"
        "tf = 50\n"
        "eps=0.2   # trailing comment\n"
        "steps = 4000\n"
        "grid = 0:1:3, 0:2:5\n"
    )
    values = load_config_file(cfg_file)
    assert values["tf"] == 50.0
    assert values["eps"] == 0.2
    assert values["steps"] == 4000
    assert [g.count for g in values["grid"]] == [3, 5]

    bad = tmp_path / "bad.cfg"
    bad.write_text("unknown_key = 1\n")
    with pytest.raises(ValueError, match="unknown config key"):
        load_config_file(bad)


def test_write_csv_format(tmp_path):
    path = tmp_path / "t.csv"
    write_csv(path, [("alpha", "1"), ("beta", "two")], ["x", "y"], [(1.0, 1 / 3)])
    text = path.read_text()
    lines = text.splitlines()
    assert lines[0] == "# alpha = 1"
    assert lines[1] == "# beta = two"
    assert lines[2] == "x,y"
    assert lines[3] == "1,0.333333333333"  # 12 significant digits


def test_write_csv_unwritable_path(tmp_path):
    target = tmp_path / "now_a_file"
    target.write_text("")
    with pytest.raises(OSError):
        write_csv(target / "x.csv", [], ["a"], [(1.0,)])


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def test_cmd_pulses(tmp_path):
    path = cmd_pulses(RunConfig(), tmp_path / "pulses.csv")
    meta, header, rows = read_csv(path)
    assert header == ["t_g", "omega1_over_g", "omega2_prime_over_g"]
    assert rows.shape == (1000, 3)
    assert rows[0, 0] == 0.0 and rows[0, 1] == 0.0
    assert rows[-1, 1] / rows[-1, 2] == pytest.approx(np.sqrt(2.0), abs=1e-9)
    peak = rows[:, 2].max()
    assert round(peak, 3) == 0.154
    assert meta["command"] == "pulses"
    assert float(meta["tf"]) == 90.0


def test_cmd_evolve(tmp_path):
    path = cmd_evolve(RunConfig(), tmp_path / "evolve.csv")
    _, header, rows = read_csv(path)
    assert header == ["t_g", "pop_g0g0", "pop_gLgL", "pop_gRgR", "fidelity"]
    assert rows[0, 1] == pytest.approx(1.0)  # all population starts in g0,g0
    assert rows[0, 4] == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert rows[-1, 4] == pytest.approx(0.996, abs=0.005)
    late = rows[rows[:, 0] > 80.0]
    for col in (1, 2, 3):
        assert np.all(np.abs(late[:, col] - 1.0 / 3.0) <= 0.01)


def test_cmd_sweep_tf_examples(tmp_path):
    cfg = RunConfig(steps=4000)
    path = cmd_sweep_tf(cfg, tmp_path / "tf.csv", GridAxis("tf", 10.0, 90.0, 5))
    _, header, rows = read_csv(path)
    assert header == ["tf_g", "fidelity"]
    f10 = rows[0, 1]
    f90 = rows[-1, 1]
    assert f10 < 0.9
    assert f90 == pytest.approx(0.996, abs=0.005)
    f300 = unitary_fidelity(300.0, cfg.eps, 1.0, cfg.steps)
    assert f300 >= f90


def test_cmd_sweep_eps_closed_form_column(tmp_path):
    from zenosta.pulses import closed_form_fidelity

    cfg = RunConfig(steps=2000)
    path = cmd_sweep_eps(cfg, tmp_path / "eps.csv", GridAxis("eps", 0.053, 0.253, 5))
    _, header, rows = read_csv(path)
    assert header == ["eps", "fidelity", "fidelity_closed_form"]
    for eps, _, closed in rows:
        assert closed == pytest.approx(closed_form_fidelity(eps), abs=1e-12)
    near_optimum = rows[np.argmin(np.abs(rows[:, 0] - 0.153))]
    assert near_optimum[0] == pytest.approx(0.153)
    assert near_optimum[1] >= 0.99


def test_cmd_sweep_decoherence_smoke(tmp_path):
    cfg = RunConfig(steps=2000)
    path = cmd_sweep_decoherence(
        cfg,
        tmp_path / "dec.csv",
        GridAxis("kappa", 0.0, 0.02, 2),
        GridAxis("gamma", 0.0, 0.02, 2),
    )
    _, header, rows = read_csv(path)
    assert header == ["kappa_over_g", "gamma_over_g", "fidelity"]
    assert rows.shape == (4, 3)
    assert rows[0, 2] > rows[-1, 2]  # dissipation lowers fidelity


def test_batched_matches_single_trajectory():
    pairs = [(90.0, 0.153), (60.0, 0.2)]
    batched = batched_unitary_fidelities(*zip(*pairs), 1.0, 2000)
    for (tf, eps), fb in zip(pairs, batched):
        assert fb == pytest.approx(unitary_fidelity(tf, eps, 1.0, 2000), abs=1e-12)


def test_batched_lindblad_matches_single_trajectory():
    from zenosta.experiments import batched_lindblad_fidelities, lindblad_fidelity

    rates = [(0.0, 0.0), (0.02, 0.02), (0.0003, 0.001)]
    batched = batched_lindblad_fidelities(rates, 90.0, 0.153, 1.0, 2000)
    for (k, g), fb in zip(rates, batched):
        assert fb == pytest.approx(lindblad_fidelity(90.0, 0.153, 1.0, k, g, 2000), abs=1e-12)
    # row independence: composition cannot change a point's value
    alone = batched_lindblad_fidelities([rates[1]], 90.0, 0.153, 1.0, 1000)[0]
    assert alone == batched_lindblad_fidelities(rates, 90.0, 0.153, 1.0, 1000)[1]


def test_batch_composition_does_not_change_results():
    pairs = [(90.0, 0.153), (60.0, 0.2), (75.0, 0.18)]
    full = batched_unitary_fidelities(*zip(*pairs), 1.0, 1000)
    for k, (tf, eps) in enumerate(pairs):
        alone = batched_unitary_fidelities([tf], [eps], 1.0, 1000)[0]
        assert alone == full[k]  # bitwise: rows are independent


# ---------------------------------------------------------------------------
# determinism and the CLI
# ---------------------------------------------------------------------------

def test_sweep_output_independent_of_workers(tmp_path):
    grid = ["--grid", "80:100:3", "--steps", "2000"]
    out1 = tmp_path / "w1.csv"
    out3 = tmp_path / "w3.csv"
    assert main(["sweep-tf", *grid, "--workers", "1", "--out", str(out1)]) == 0
    assert main(["sweep-tf", *grid, "--workers", "3", "--out", str(out3)]) == 0
    assert out1.read_bytes() == out3.read_bytes()


def test_repeated_run_byte_identical(tmp_path):
    args = ["pulses", "--tf", "42", "--eps", "0.2"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main([*args, "--out", str(a)]) == 0
    assert main([*args, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_cli_precedence(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("tf = 50\neps = 0.2\n")
    out = tmp_path / "p.csv"
    rc = main(
        ["pulses", "--config", str(cfg_file), "--tf", "60", "--out", str(out)]
    )
    assert rc == 0
    meta, _, _ = read_csv(out)
    assert float(meta["tf"]) == 60.0  # flag beats file
    assert float(meta["eps"]) == 0.2  # file beats default


def test_cli_error_paths(tmp_path):
    assert main(["sweep-tf", "--grid", "nonsense"]) == 2
    assert main(["pulses", "--config", str(tmp_path / "missing.cfg")]) == 2
    assert main(["pulses", "--tf", "-5", "--out", str(tmp_path / "x.csv")]) == 2
