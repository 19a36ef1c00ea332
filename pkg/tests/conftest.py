import numpy as np
import pytest

from rectm.kernels import biquadratic_kernel, uniform_kernel
from rectm.smoothing import Sample


@pytest.fixture(scope="session")
def biquad():
    return biquadratic_kernel()


@pytest.fixture(scope="session")
def unif():
    return uniform_kernel()


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def make_sample(x, y) -> Sample:
    return Sample(np.asarray(x, dtype=float), np.asarray(y, dtype=float))


@pytest.fixture(scope="session")
def sample_at_point():
    """All covariates at a single point: kernel weights become equal."""

    def _make(y_values, x0=0.5):
        y = np.asarray(y_values, dtype=float)
        return Sample(np.full(y.shape[0], x0), y)

    return _make
