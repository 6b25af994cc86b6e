import numpy as np
import pytest

from dsk.hyp2f1 import SpectralParam


def family(n, factors=(0.3, 0.9, "i")):
    """SpectralParams lambda = f * rho (f real) or lambda = i."""
    rho = (n - 1) / 2
    return [SpectralParam(n, 1j if f == "i" else f * rho) for f in factors]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
