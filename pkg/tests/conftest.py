import numpy as np
import pytest

from cpscores import example_model
from cpscores.simulate import random_model


@pytest.fixture(scope="session")
def model():
    """The bundled five-factor example model."""
    return example_model()


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture()
def small_model(rng):
    return random_model(rng, n_xi=2, n_eta=2)


def spd_matrix(rng, k):
    b = rng.standard_normal((k, k + 3))
    return b @ b.T + 0.1 * np.eye(k)
