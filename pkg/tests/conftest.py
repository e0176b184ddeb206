import numpy as np
import pytest
from hypothesis import settings

from tetratv.qarith import RootData

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def r3():
    return RootData(3)


@pytest.fixture
def r5():
    return RootData(5)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
