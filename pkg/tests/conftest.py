import numpy as np
import pytest

from clearnet import scenarios


@pytest.fixture
def reference_L():
    return scenarios.REFERENCE_L.copy()


@pytest.fixture
def reference_problem():
    return scenarios.reference_problem()


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def chain_L():
    """Bank 1 owes 2 to society and 2 to bank 2, bank 2 owes 1 to society."""
    return np.array([
        [0.0, 0.0, 0.0],
        [2.0, 0.0, 2.0],
        [1.0, 0.0, 0.0],
    ])


@pytest.fixture
def random_network(rng):
    """Factory of regular random networks: every bank owes something to society."""

    def factory(n=5, density=0.6):
        L = rng.uniform(0.5, 5.0, size=(n + 1, n + 1)) * (rng.uniform(size=(n + 1, n + 1)) < density)
        np.fill_diagonal(L, 0.0)
        L[0] = 0.0
        L[1:, 0] = rng.uniform(0.5, 3.0, size=n)
        x = np.concatenate(([0.0], rng.uniform(0.0, 6.0, size=n)))
        return x, L

    return factory
