import pytest

from zenosta import SystemParams, dark_subspace, enumerate_basis
from zenosta.pulses import reference_protocol


@pytest.fixture(scope="session")
def basis():
    return enumerate_basis()


@pytest.fixture(scope="session")
def params():
    return SystemParams()


@pytest.fixture(scope="session")
def zeno(params, basis):
    return dark_subspace(params, basis)


@pytest.fixture(scope="session")
def protocol(params):
    return reference_protocol(params.t_f, params.eps)
