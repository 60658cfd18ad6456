import numpy as np
import pytest

from util import SEED


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(SEED)
