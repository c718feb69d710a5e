import numpy as np
import pytest

from heisenberg_neumann.verification import calibrate


@pytest.fixture(scope="session")
def ctx():
    """Calibrated n = 1 kernel context, shared across the whole run."""
    return calibrate(1)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
