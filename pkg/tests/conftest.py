import numpy as np
import pytest

from bbgky_lab.config import config_from_dict, default_config_dict, make_system


@pytest.fixture(scope="session")
def config3():
    return config_from_dict(default_config_dict(n_max=3, seed=42))


@pytest.fixture(scope="session")
def system(config3):
    return make_system(config3)


@pytest.fixture(scope="session")
def free_system(config3):
    from bbgky_lab.dynamics import System
    return System(config3.d, config3.kinetic, None, hbar=config3.hbar)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


def random_labeled(rng, d, labels, hermitian=True):
    from bbgky_lab.operators import ParticleOperator
    dim = d ** len(labels)
    raw = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    if hermitian:
        raw = (raw + raw.conj().T) / 2
    return ParticleOperator(tuple(labels), raw, d)
