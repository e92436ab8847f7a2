import os

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("suite", deadline=None, max_examples=30, derandomize=True)
settings.load_profile("suite")

SEED = int(os.environ.get("PROJECT_SEED", "20260810"))


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)
