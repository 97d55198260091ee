import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cyqt.channel import MessageState  # noqa: E402


def random_triple(rng):
    return tuple(MessageState.random(rng) for _ in range(3))


def random_state(rng, n):
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return v / np.linalg.norm(v)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def triple(rng):
    return random_triple(rng)
