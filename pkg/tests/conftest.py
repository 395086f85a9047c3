import numpy as np
import pytest

from sfqramp.model import CircuitParams, diagonalize_model


@pytest.fixture(scope="session")
def model():
    """Reference fluxonium model at the default circuit parameters."""
    return diagonalize_model(CircuitParams(), check_convergence=False)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)


def random_hermitian(rng, dim):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (m + m.conj().T) / 2.0
