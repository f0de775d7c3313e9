import numpy as np
import pytest

from compactlab.estimates import random_band_limited
from compactlab.spectral import Grid


@pytest.fixture(scope="session")
def grid512():
    return Grid(10.0, 512)


@pytest.fixture(scope="session")
def grid1024():
    return Grid(10.0, 1024)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240809)


@pytest.fixture()
def random_fields(grid512, rng):
    def make(n=1, **kw):
        fields = [random_band_limited(grid512, rng, **kw) for _ in range(n)]
        return fields[0] if n == 1 else fields
    return make
