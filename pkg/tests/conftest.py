import numpy as np
import pytest

from saptvqe.cli import bundled_job
from saptvqe.integrals import build_integrals, parse_dimer_xyz


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def water_xyz():
    return bundled_job("water_dimer_r0.2397.xyz").read_text()


@pytest.fixture(scope="session")
def water(water_xyz):
    return parse_dimer_xyz(water_xyz)


@pytest.fixture(scope="session")
def water_ints(water):
    return build_integrals(water)


@pytest.fixture(scope="session")
def h2_dimer():
    text = """
    H 0.0 0.0 0.0
    H 0.0 0.0 0.74
    --
    H 0.3 0.2 2.9
    H 0.3 0.2 3.64
    """
    return parse_dimer_xyz(text, "6-31g")


@pytest.fixture(scope="session")
def h2_dimer_ints(h2_dimer):
    return build_integrals(h2_dimer)

