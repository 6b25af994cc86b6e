import math

import mpmath
import numpy as np
import pytest

from dsk import geometry as geo
from dsk import kernels as ker
from dsk.hyp2f1 import SpectralParam, hyp2f1_family

from conftest import family


def ie0(n):
    return 1j * geo.basis(n, 0, complex)


def test_kernel_argument_examples():
    n = 3
    assert ker.kernel_argument(ie0(n), ie0(n)) == 0
    w = geo.boost_a(n, 1.0) @ ie0(n)
    assert ker.kernel_argument(ie0(n), w) == pytest.approx((1 - math.cosh(1)) / 2)


def test_real_arguments_avoid_the_cut():
    # [z, y] real for z in Xi and real y lies in (-1, 1), so the argument lies in (0, 1)
    for n in (2, 3):
        for eps in (1e-6, 0.1, 1.0, 1.5):
            arg = ker.kernel_argument(geo.crown_approach_point(n, eps), geo.basis(n, n))
            assert abs(arg.imag) < 1e-16 and 0 < arg.real < 1


def test_psi_examples():
    sp = SpectralParam(3, 1j)
    n = sp.n
    a1 = geo.boost_a(n, 1.0) @ ie0(n)
    assert ker.psi_lambda(sp, ie0(n), ie0(n)) == 1
    assert abs(ker.psi_lambda(sp, a1, a1) - 1) < 1e-15
    ref = complex(mpmath.hyp2f1(1 + 1j, 1 - 1j, 1.5, (1 - math.cosh(1)) / 2))
    assert abs(ker.psi_lambda(sp, ie0(n), a1) - ref) < 1e-14
    assert ker.psi_tilde_lambda(sp, -ie0(n), -ie0(n)) == 1


def test_crown_point_validation():
    n = 2
    p = ker.CrownPoint(ie0(n), "Xi")
    assert p.conj().side == "XiBar"
    with pytest.raises(ValueError):
        ker.CrownPoint(-ie0(n), "Xi")
    with pytest.raises(ValueError):
        ker.CrownPoint(np.array([0, 0, 2.0]), "boundary")
    with pytest.raises(ValueError):
        ker.CrownPoint(ie0(n), "boundary")
    with pytest.raises(ValueError):
        ker.CrownPoint(ie0(n), "elsewhere")
    with pytest.raises(ValueError):
        ker.psi_lambda(SpectralParam(2, 0.3), ker.CrownPoint(-ie0(n), "XiBar"), p)


@pytest.mark.parametrize("sp", family(2) + family(3), ids=str)
def test_symmetry_identities(sp, rng):
    zs = geo.random_crown(sp.n, rng, 20)
    ws = geo.random_crown(sp.n, rng, 20)
    for z, w in zip(zs, ws):
        defects = ker.symmetry_defects(sp, z, w)
        assert set(defects) == {"conj_formula", "conj_tilde", "swap_tilde", "hermitian"}
        assert max(defects.values()) <= 1e-12 * max(1, abs(ker.psi_lambda(sp, z, w)))


@pytest.mark.parametrize("sp", family(2) + family(3), ids=str)
def test_g_invariance(sp, rng):
    zs = geo.random_crown(sp.n, rng, 10)
    ws = geo.random_crown(sp.n, rng, 10)
    for z, w in zip(zs, ws):
        g = geo.random_group_element(sp.n, rng)
        before = ker.psi_lambda(sp, z, w)
        assert abs(ker.psi_lambda(sp, g @ z, g @ w) - before) <= 1e-10 * max(1, abs(before))


def test_gram_examples(rng):
    sp = SpectralParam(2, 0.3)
    p = ker.CrownPoint(ie0(2), "Xi")
    rep = ker.gram_check(sp, [p, p])
    assert np.allclose(ker.gram_matrix(sp, np.array([p.point, p.point])), [[1, 1], [1, 1]])
    assert abs(rep.min_eigenvalue) < 1e-15 and rep.verdict
    rep = ker.gram_check(sp, list(geo.random_hyperbolic(2, rng, 10)))
    assert rep.verdict and rep.hermitian_defect <= 1e-12
    assert set(rep.as_dict()) >= {"size", "min_eigenvalue", "trace", "verdict"}


def test_gram_rejects_bad_sides():
    sp = SpectralParam(2, 0.3)
    xi = ker.CrownPoint(ie0(2), "Xi")
    with pytest.raises(ValueError):
        ker.gram_check(sp, [xi, xi.conj()])
    with pytest.raises(ValueError):
        ker.gram_check(sp, [xi, xi], which="psi_tilde")
    with pytest.raises(ValueError):
        ker.gram_check(sp, [xi])


@pytest.mark.parametrize("lam_factor", [0.3, 0.9, "i", "2i"])
@pytest.mark.parametrize("n", [2, 3])
def test_gram_positive(n, lam_factor, rng):
    lam = {"i": 1j, "2i": 2j}.get(lam_factor, None)
    sp = SpectralParam(n, lam if lam is not None else lam_factor * (n - 1) / 2)
    sets = [geo.random_hyperbolic(n, rng, 40), geo.random_crown(n, rng, 40),
            np.concatenate([geo.random_sphere_plus(n, rng, 20), geo.random_crown(n, rng, 20)])]
    for pts in sets:
        assert ker.gram_check(sp, pts).verdict
        assert ker.gram_check(sp, np.conj(pts), "psi_tilde").verdict


def test_phi_lambda_closed():
    sp = SpectralParam(2, 0.3)
    assert ker.phi_lambda_closed(sp, ie0(2)) == 1
    for s in (0.3, 1.0, 2.5):
        x = geo.boost_a(2, s) @ ie0(2)
        val = ker.phi_lambda_closed(sp, x)
        assert val == pytest.approx(hyp2f1_family(sp, (1 - math.cosh(s)) / 2), rel=1e-15)
        assert abs(val.imag) < 1e-15


def test_iwasawa_a_value(rng):
    n = 3
    assert ker.iwasawa_a_value(np.eye(n + 1)) == 1
    assert ker.iwasawa_a_value(geo.boost_a(n, 0.7)) == pytest.approx(math.exp(0.7))
    assert ker.iwasawa_a_value(geo.random_rotation(n, rng)) == pytest.approx(1)


@pytest.mark.parametrize("n", [2, 3])
def test_spherical_function_trivial(n, rng):
    sp = SpectralParam(n, 0.3 * (n - 1) / 2)
    assert ker.spherical_function_integral(sp, np.eye(n + 1)) == pytest.approx(1, abs=1e-14)
    k = geo.random_rotation(n, rng)
    assert ker.spherical_function_integral(sp, k) == pytest.approx(1, abs=1e-13)


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("s", [0.25, 0.5, 1.0, 2.0])
def test_spherical_function_matches_closed(n, s):
    for sp in family(n, (0.3, "i")):
        g = geo.boost_a(n, s)
        closed = ker.phi_lambda_closed(sp, g @ ie0(n))
        integral = ker.spherical_function_integral(sp, g, 64)
        assert abs(integral - closed) <= 1e-6 * abs(closed)


def test_sphere_rule_weights():
    for n, order in ((2, 16), (3, 8)):
        nodes, w = ker.sphere_rule(n, order)
        assert abs(w.sum() - 1) < 1e-14
        assert np.allclose(np.linalg.norm(nodes, axis=1), 1)
    with pytest.raises(NotImplementedError):
        ker.sphere_rule(4, 8)


def test_continuity_extension():
    sp = SpectralParam(3, 0.5)
    n = sp.n
    rep = ker.continuity_extension_check(sp, -geo.basis(n, n))
    assert rep.limit == 1 and rep.final_error < 1e-6
    y = geo.de_sitter_chart(1.0, geo.sphere_direction(3, (math.pi / 2, 0.3)))
    rep = ker.continuity_extension_check(sp, y)
    assert rep.limit == pytest.approx(hyp2f1_family(sp, 0.5))
    assert rep.final_error < 1e-3 * abs(rep.limit) and rep.rate > 0.9
    y = geo.de_sitter_chart(0.0, geo.sphere_direction(3, (math.acos(0.999), 0.0)))
    rep = ker.continuity_extension_check(sp, y)
    assert np.isfinite(abs(rep.limit)) and abs(rep.limit) > 10
    with pytest.raises(ValueError):
        ker.continuity_extension_check(sp, geo.basis(n, n))
