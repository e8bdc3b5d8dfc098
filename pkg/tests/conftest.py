import numpy as np
import pytest
from pathlib import Path

REPO = Path(__file__).resolve().parents[1]
DATA = REPO / "data"
CONFIGS = REPO / "configs"


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def configs_dir():
    return CONFIGS


def random_smooth_series(rng, length):
    """Random smooth test signal: a few tones plus a linear trend."""
    t = np.arange(length, dtype=np.float64)
    x = rng.uniform(-0.5, 0.5) * t / length
    for _ in range(rng.integers(2, 5)):
        period = rng.uniform(8, length / 2)
        x = x + rng.uniform(0.3, 2.0) * np.sin(2 * np.pi * t / period + rng.uniform(0, 2 * np.pi))
    return x
