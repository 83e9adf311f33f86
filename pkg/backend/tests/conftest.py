# backend/tests/conftest.py
import numpy as np
import pytest

from app.models.operators import OperatorMatrix, StateVector
from app.models.statistics import Space


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def random_state(rng):
    def make(space: Space, K: int) -> StateVector:
        dim = space.dimension(K)
        v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        return StateVector(space=space, K=K, amplitudes=v / np.linalg.norm(v))

    return make


@pytest.fixture
def random_hermitian(rng):
    def make(space: Space, K: int) -> OperatorMatrix:
        dim = space.dimension(K)
        a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        return OperatorMatrix(space=space, K=K, entries=(a + a.conj().T) / 2)

    return make
