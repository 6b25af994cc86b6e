import math
import warnings

import mpmath
import numpy as np
import pytest

from dsk import sphere
from dsk.hyp2f1 import SpectralParam, hyp2f1_family

from conftest import family


def north(n, x0, tilt=0.0):
    p = np.zeros(n + 1)
    p[0] = x0
    p[1] = math.sqrt(1 - x0**2) * math.cos(tilt)
    p[2] = math.sqrt(1 - x0**2) * math.sin(tilt)
    return p


def test_reflection():
    p = np.array([0.6, 0.8, 0.0])
    assert np.array_equal(sphere.reflect_sigma(sphere.reflect_sigma(p)), p)
    eq = np.array([0.0, 0.6, 0.8])
    assert np.array_equal(sphere.reflect_sigma(eq), eq)
    assert sphere.reflect_sigma(p)[0] < 0
    z = sphere.to_crown(p)
    assert z[0] == 0.6j


def test_vol_sphere():
    assert sphere.vol_sphere(2) == pytest.approx(4 * math.pi)
    assert sphere.vol_sphere(3) == pytest.approx(2 * math.pi**2)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
@pytest.mark.parametrize("u", [-1.0, -0.3, 0.45, 0.99])
def test_gegenbauer_matches_mpmath(alpha, u):
    vals = sphere.gegenbauer(40, alpha, u)
    for k in (0, 1, 7, 40):
        ref = float(mpmath.gegenbauer(k, alpha, u))
        assert abs(vals[k] - ref) <= 1e-12 * max(1, abs(ref))


def test_zeroth_term():
    sp = SpectralParam(2, 0.3)
    assert sphere.spectral_coefficients(sp, 0)[0] == pytest.approx(1 / (4 * math.pi * 0.16))
    assert sphere.green_kernel_spectral(sp, 0.2, 0) == pytest.approx(1 / (4 * math.pi * 0.16))


@pytest.mark.parametrize("sp", family(2, (0.3, 0.9, "i")) + family(3, (0.3, "i")), ids=str)
def test_spectral_denominators_positive(sp):
    k = np.arange(200)
    assert np.all(((k + sp.rho) ** 2 - sp.lam**2).real > 0)
    assert np.all(sphere.spectral_coefficients(sp, 199) > 0)


@pytest.mark.parametrize("u", [-0.9, -0.2, 0.4, 0.9])
def test_resummed_matches_long_series(u):
    # n = 2: the series converges; a long partial sum is an independent check
    sp = SpectralParam(2, 0.3)
    exact = sphere.green_kernel(sp, u).value
    assert abs(sphere.green_kernel_spectral(sp, u, 4096) - exact) < 1e-3 * abs(exact)


@pytest.mark.parametrize("sp", family(2, (0.3, 0.9, "i")) + family(3, (0.3, "i")), ids=str)
def test_resummed_is_proportional_to_psi(sp):
    for u in (-0.95, -0.4, 0.2, 0.8, 0.99):
        g = sphere.green_kernel(sp, u)
        psi = hyp2f1_family(sp, (1 + u) / 2).real
        assert g.value / psi == pytest.approx(sphere.expected_ratio(sp), rel=1e-10)
        assert g.tail < 1e-9 * abs(g.value)


@pytest.mark.parametrize("lam", [0.3, 1j])
@pytest.mark.parametrize("u", np.linspace(-0.99, 0.99, 12))
def test_truncation_error_envelope_n2(u, lam):
    # |P_k(cos t)| <= sqrt(2 / (pi k sin t)) and c_k ~ 1/(2 pi k) give |tail| <~ 0.25 / sqrt(K sin t);
    # the error itself oscillates in K, so only the envelope decreases
    sp = SpectralParam(2, lam)
    sin_t = math.sqrt(1 - u**2)
    for K in (16, 64, 256, 1024, 4096):
        assert sphere.green_kernel(sp, u, K).tail <= 0.4 / math.sqrt(K * sin_t)


def test_truncation_error_alternating_at_antipode():
    sp = SpectralParam(2, 0.3)
    for K in (16, 64, 256, 1024):
        next_term = sphere.spectral_coefficients(sp, K + 1)[-1]
        assert sphere.green_kernel(sp, -1.0, K).tail <= next_term


def test_truncation_error_not_monotone():
    # a documented counterexample to strict decrease along a ratio-4 ladder
    sp = SpectralParam(2, 0.3)
    t16, t64 = (sphere.green_kernel(sp, 0.7, K).tail for K in (16, 64))
    assert t64 > t16


def test_green_kernel_errors():
    sp = SpectralParam(2, 0.3)
    with pytest.raises(ValueError):
        sphere.green_kernel(sp, 1.0)
    with pytest.raises(ValueError):
        sphere.green_kernel(sp, -1.5)
    with pytest.raises(ValueError):
        sphere.green_kernel(sp, 0.2, sphere.K_MAX + 1)
    with pytest.raises(ValueError):
        sphere.green_kernel_spectral(sp, 0.2, -1)


def test_choose_K():
    sp = SpectralParam(2, 0.3)
    K = sphere.choose_K(sp, -0.5, target=1e-6)
    assert K is not None and sphere.green_kernel(sp, -0.5, K).tail <= 1e-6
    assert sphere.choose_K(sp, 0.99, target=1e-14, k_max=64) is None


def test_phi_sigma():
    sp = SpectralParam(2, 0.3)
    x = north(2, 0.999)
    val = sphere.phi_sigma(sp, x, x)
    assert np.isfinite(val.value)
    with pytest.raises(ValueError):
        sphere.phi_sigma(sp, np.array([0.0, 1.0, 0.0]), x)
    with pytest.raises(ValueError):
        sphere.phi_sigma(sp, np.array([0.5, 0.5, 0.5]), x)
    # symmetric in the two points
    y = north(2, 0.6, 1.0)
    assert sphere.phi_sigma(sp, x, y).value == sphere.phi_sigma(sp, y, x).value


def test_phi_sigma_matches_ratio_times_psi():
    sp = SpectralParam(2, 0.3)
    x = y = north(2, 0.6)
    u = float(np.dot(x, sphere.reflect_sigma(y)))
    psi = hyp2f1_family(sp, (1 + u) / 2).real
    assert sphere.phi_sigma(sp, x, y).value == pytest.approx(sphere.expected_ratio(sp) * psi, rel=1e-10)


def test_rp_gram_examples(rng):
    sp = SpectralParam(2, 1j)
    two = [north(2, 0.9, 0.0), north(2, 0.3, math.pi)]
    assert sphere.rp_gram_check(sp, two).verdict
    one = sphere.rp_gram_check(sp, two[:1])
    assert one.min_eigenvalue > 0
    pts = sphere.random_sphere_plus(2, rng, 20)
    rep = sphere.rp_gram_check(sp, pts)
    assert rep.verdict and rep.tail < 1e-8
    with pytest.warns(UserWarning):
        sphere.rp_gram_check(sp, [two[0], two[0]])


@pytest.mark.parametrize("sp", family(2, (0.3, "i")) + family(3, (0.3, "i")), ids=str)
def test_proportionality(sp, rng):
    xs = sphere.random_sphere_plus(sp.n, rng, 20)
    ys = sphere.random_sphere_plus(sp.n, rng, 20)
    rep = sphere.proportionality_check(sp, list(zip(xs, ys)))
    assert rep.max_deviation <= 1e-5 and rep.max_tail <= 1e-8
    assert rep.ratio > 0
    assert rep.ratio == pytest.approx(sphere.expected_ratio(sp), rel=1e-10)


def test_proportionality_trivial_cases():
    sp = SpectralParam(2, 0.3)
    pair = (north(2, 0.7), north(2, 0.5, 0.4))
    rep = sphere.proportionality_check(sp, [pair, pair, pair])
    assert rep.max_deviation == 0
    with pytest.raises(ValueError):
        sphere.proportionality_check(sp, [pair])


def test_small_K_reports_large_tail(rng):
    sp = SpectralParam(3, 0.3)
    pts = sphere.random_sphere_plus(3, rng, 6)
    rep = sphere.rp_gram_check(sp, pts, K=4)
    assert rep.tail > 1e-8
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        sphere.green_kernel(sp, 0.3)
