import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def zscore(samples, target):
    s = np.asarray(samples, dtype=float)
    return (s.mean() - target) / (s.std(ddof=1) / np.sqrt(s.size))
