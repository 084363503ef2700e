import numpy as np
import pytest

from spongedim import fixtures


@pytest.fixture
def d3():
    return fixtures.sponge_d3()


@pytest.fixture
def d4():
    return fixtures.sponge_d4()


@pytest.fixture
def no_repeat():
    return fixtures.no_repeat_sft()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
