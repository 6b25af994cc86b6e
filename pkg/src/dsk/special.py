"""Gamma, reciprocal gamma, digamma and Pochhammer symbols for complex arguments.

Gamma uses the Lanczos approximation (g=7, 9 coefficients) with the
reflection formula for Re z < 1/2.  Digamma shifts the argument upward with
the recurrence and finishes with the Stirling-type asymptotic series.
"""

import cmath
import math

import numpy as np

_LANCZOS_G = 7
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

# B_{2k} / (2k) for k = 1..7
_DIGAMMA_ASYMPTOTIC = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)

EULER_GAMMA = 0.57721566490153286061


class PoleError(ValueError):
    """Raised when gamma or digamma is evaluated at a nonpositive integer."""

    def __init__(self, z):
        super().__init__(f"pole of the gamma function at z = {z}")
        self.pole = z


def _pole_index(z, tol=1e-14):
    """Return the integer k >= 0 if z == -k (within tol), else None."""
    z = complex(z)
    if abs(z.imag) > tol or z.real > 0.5:
        return None
    k = round(-z.real)
    if abs(z.real + k) <= tol * max(1.0, k):
        return int(k)
    return None


def _lanczos(z):
    # valid for Re z >= 1/2
    z = z - 1
    x = _LANCZOS_COEF[0]
    for i in range(1, _LANCZOS_G + 2):
        x += _LANCZOS_COEF[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2 * math.pi) * t ** (z + 0.5) * cmath.exp(-t) * x


def gamma_fn(z):
    """Gamma function of a complex scalar.

    Raises PoleError at 0, -1, -2, ...
    """
    z = complex(z)
    if _pole_index(z) is not None:
        raise PoleError(z)
    if z.real < 0.5:
        return math.pi / (cmath.sin(math.pi * z) * _lanczos(1 - z))
    return _lanczos(z)


def rgamma(z):
    """1/Gamma(z); exactly zero at the poles of Gamma."""
    if _pole_index(z) is not None:
        return 0j
    return 1.0 / gamma_fn(z)


def digamma(z):
    """Logarithmic derivative of Gamma for a complex scalar."""
    z = complex(z)
    if _pole_index(z) is not None:
        raise PoleError(z)
    if z.real < 0.5:
        return digamma(1 - z) - math.pi / cmath.tan(math.pi * z)
    acc = 0j
    while abs(z) < 10.0 or z.real < 10.0:
        acc -= 1.0 / z
        z += 1
    inv2 = 1.0 / (z * z)
    series = 0j
    power = inv2
    for c in _DIGAMMA_ASYMPTOTIC:
        series += c * power
        power *= inv2
    return acc + cmath.log(z) - 0.5 / z - series


def pochhammer(d, k):
    """Rising factorial (d)_k = d (d+1) ... (d+k-1); (d)_0 = 1."""
    if k < 0:
        raise ValueError("k must be a nonnegative integer")
    out = 1.0 + 0j if isinstance(d, complex) else 1.0
    for j in range(k):
        out *= d + j
    return out


def digamma_sequence(z, count):
    """psi(z), psi(z+1), ..., psi(z+count-1) via the upward recurrence."""
    out = np.empty(count, dtype=complex)
    if count == 0:
        return out
    out[0] = digamma(z)
    for k in range(1, count):
        out[k] = out[k - 1] + 1.0 / (z + k - 1)
    return out
