import pytest

from tools.grp import modular_torus, perturbed_torus, schottky
from tools.twist import TwistFamily


@pytest.fixture(autouse=True)
def cache_dir(tmp_path, monkeypatch):
    path = tmp_path / "cache"
    monkeypatch.setenv("FUCHS_CACHE_DIR", str(path))
    return path


@pytest.fixture
def torus():
    return modular_torus()


@pytest.fixture
def perturbed():
    return perturbed_torus(0.1)


@pytest.fixture
def schottky_rep():
    return schottky(2.0, 2.0, 3.0)


@pytest.fixture
def family(torus):
    return TwistFamily.for_rep(torus)
