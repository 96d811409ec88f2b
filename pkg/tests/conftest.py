import os
import random

import pytest

from vacmc.kripke import load_fixture

SEED = int(os.environ.get("VACMC_SEED", "20250810"))


@pytest.fixture
def rng():
    return random.Random(SEED)


@pytest.fixture(scope="session")
def fx():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = load_fixture(name)
        return cache[name]

    return get
