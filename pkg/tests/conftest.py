import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "ci", derandomize=True, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ci")

SEED = 1729


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


@pytest.fixture(scope="session")
def haar16():
    from framethresh.transforms import WaveletBasis
    return WaveletBasis(16, "haar")


@pytest.fixture(scope="session")
def haar64():
    from framethresh.transforms import WaveletBasis
    return WaveletBasis(64, "haar")
