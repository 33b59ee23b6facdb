import os

import pytest


@pytest.fixture(scope="session")
def rng_seed():
    """Base seed for the randomized suites; override with PREPRO_SEED."""
    return int(os.environ.get("PREPRO_SEED", "20260818"))
