import numpy as np
import pytest

from afl.acceptance import random_map, seed  # noqa: F401  (shared with the acceptance suite)


@pytest.fixture
def rng():
    return np.random.default_rng(seed())
