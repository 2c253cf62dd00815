import numpy as np
import pytest

from vcone import canonical_geometry, chsh, hidden_influence_s


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def s_expr():
    return hidden_influence_s()


@pytest.fixture(scope="session")
def chsh_expr():
    return chsh()


@pytest.fixture(scope="session")
def g2():
    return canonical_geometry(2)
