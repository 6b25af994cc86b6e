import cmath
import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dsk.special import (
    EULER_GAMMA,
    PoleError,
    digamma,
    digamma_sequence,
    gamma_fn,
    pochhammer,
    rgamma,
)

POINTS = [0.5, 1.0, 2.5, 7.25, -0.5, -3.7, 0.3 + 1j, 1 - 2j, -2.5 + 0.5j, 0.05, 1e-3, 12 + 5j]


@pytest.mark.parametrize("z", POINTS)
def test_gamma_matches_mpmath(z):
    ref = complex(mpmath.gamma(mpmath.mpc(z)))
    assert abs(gamma_fn(z) - ref) <= 1e-13 * abs(ref)


@pytest.mark.parametrize("z", POINTS)
def test_digamma_matches_mpmath(z):
    ref = complex(mpmath.digamma(mpmath.mpc(z)))
    assert abs(digamma(z) - ref) <= 1e-13 * max(1.0, abs(ref))


def test_gamma_examples():
    assert gamma_fn(1) == pytest.approx(1, abs=1e-15)
    assert abs(gamma_fn(0.5) - math.sqrt(math.pi)) <= 1e-15
    assert abs(digamma(1) + EULER_GAMMA) <= 1e-15


@pytest.mark.parametrize("z", [0, -1, -2, -7])
def test_poles_rejected(z):
    with pytest.raises(PoleError) as err:
        gamma_fn(z)
    assert err.value.pole == z
    with pytest.raises(PoleError):
        digamma(z)
    assert rgamma(z) == 0


@pytest.mark.parametrize("d,k,want", [(3.3, 0, 1), (2, 3, 24), (-1, 3, 0), (0.5 + 1j, 2, (0.5 + 1j) * (1.5 + 1j))])
def test_pochhammer(d, k, want):
    assert pochhammer(d, k) == pytest.approx(want)


def test_digamma_sequence_recurrence():
    seq = digamma_sequence(0.3 + 0.2j, 6)
    for k in range(6):
        assert abs(seq[k] - digamma(0.3 + 0.2j + k)) < 1e-13


@settings(max_examples=60, deadline=None)
@given(st.floats(0.05, 20), st.floats(-10, 10))
def test_functional_equations(x, y):
    z = complex(x, y)
    assert abs(gamma_fn(z + 1) - z * gamma_fn(z)) <= 1e-12 * abs(z * gamma_fn(z))
    assert abs(digamma(z + 1) - digamma(z) - 1 / z) <= 1e-12 * max(1.0, abs(digamma(z)))
    # reflection
    w = 0.5 - z if abs(x - 0.5) > 0.01 else z
    lhs = gamma_fn(w) * gamma_fn(1 - w)
    assert abs(lhs - cmath.pi / cmath.sin(cmath.pi * w)) <= 1e-11 * abs(lhs)
