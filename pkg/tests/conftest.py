import numpy as np
import pytest

from mramsim import Environment, characterize, create_chip, get_profile

SMALL_CAPACITY = 2048


@pytest.fixture
def c1_small():
    return get_profile("C1", capacity_words=SMALL_CAPACITY)


@pytest.fixture
def chip(c1_small):
    return create_chip(c1_small, seed=0)


@pytest.fixture(scope="session")
def c1_small_map():
    """A full 50-round characterization of a small C1 chip, shared read-only."""
    profile = get_profile("C1", capacity_words=SMALL_CAPACITY)
    chip = create_chip(profile, seed=0)
    return characterize(chip, 5.0, 50, 0x0000, Environment())


def random_words(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.integers(0, 1 << 16, size=n, dtype=np.uint16)
