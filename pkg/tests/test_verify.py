import json

import pytest

from zenosta.cli import main
from zenosta.experiments import RunConfig
from zenosta.verify import report, run_all_checks


@pytest.fixture(scope="module")
def default_checks():
    return run_all_checks(RunConfig(steps=4000))


def test_default_config_all_checks_pass(default_checks):
    failed = [c.name for c in default_checks if c.status == "fail"]
    assert failed == [], f"failing checks: {failed}"
    assert report(default_checks)["passed"]


def test_expected_check_names_present(default_checks):
    names = {c.name for c in default_checks}
    assert {
        "basis-closure",
        "coherent-block-order",
        "annihilation-nilpotent",
        "sigma-adjoint-pairs",
        "coupling-null-space",
        "dark-projection-prefactor",
        "invariance-residual",
        "boundary-conditions",
        "pulse-roundtrip",
        "fidelity-stationary",
        "closed-form-unity",
        "effective-model-agreement",
        "unitary-conservation",
        "population-endpoint",
        "zeno-gap-growth",
        "step-halving",
        "lindblad-conservation",
        "closed-system-equivalence",
    } <= names


def test_mismatched_couplings_reported_as_precondition_failure():
    checks = run_all_checks(RunConfig(steps=2000, v_over_g=2.0))
    agreement = [c for c in checks if c.name == "effective-model-agreement"]
    assert len(agreement) == 1
    assert agreement[0].status == "fail"
    assert "precondition" in agreement[0].detail
    assert not report(checks)["passed"]


def test_off_branch_eps_is_informational_not_failure():
    checks = run_all_checks(RunConfig(steps=2000, eps=0.5))
    info = [c for c in checks if c.name == "closed-form-at-config-eps"]
    assert len(info) == 1 and info[0].status == "info"
    # the mathematical unity property at the optimal angle still holds
    unity = [c for c in checks if c.name == "closed-form-unity"]
    assert unity[0].status == "pass"


def test_verify_cli_reports_json(capsys):
    rc = main(["verify", "--steps", "2000"])
    out = capsys.readouterr().out
    payload = json.loads(out)
    assert rc == 0
    assert payload["passed"] is True
    assert any(c["name"] == "basis-closure" for c in payload["checks"])

    rc = main(["verify", "--steps", "2000", "--v-over-g", "2"])
    payload = json.loads(capsys.readouterr().out)
    assert rc == 1
    assert payload["passed"] is False
