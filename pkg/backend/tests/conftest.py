import os

import numpy as np
import pytest

from config.settings import SAMPLE_DATA_DIR
from simulator.statevector import StateVector


def random_state(width: int, rng: np.random.Generator) -> StateVector:
    amps = rng.normal(size=1 << width) + 1j * rng.normal(size=1 << width)
    return StateVector(amps / np.linalg.norm(amps))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def sample_path():
    def resolve(name: str) -> str:
        return os.path.join(SAMPLE_DATA_DIR, name)
    return resolve
