import numpy as np
import pytest

from kmspectral.spectral import GridSpec


@pytest.fixture
def grid():
    """Default torus at reduced resolution; every ensemble member is resolved."""
    return GridSpec(n_points=256)


@pytest.fixture
def grid512():
    return GridSpec(n_points=512)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
