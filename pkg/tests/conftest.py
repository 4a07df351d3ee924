import numpy as np
import pytest

from sppal.medium import build_medium


@pytest.fixture(scope="session")
def std_air():
    """Reference ambient state used throughout: 20 degC, 70 % RH, 101.325 kPa."""
    return build_medium()


@pytest.fixture(scope="session")
def lossless_air():
    return build_medium().lossless()


@pytest.fixture(autouse=True)
def _seed_numpy():
    np.random.seed(12345)
