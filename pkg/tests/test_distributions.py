import math

import mpmath
import numpy as np
import pytest

from dsk import distributions as dist
from dsk import geometry as geo
from dsk.hyp2f1 import BoundarySide, SpectralParam, cut_jump, hyp2f1_boundary, hyp2f1_family

from conftest import family

OFFCUT_2 = ((0.2, 2.0), (0.3, 0.4))
CUT_2 = ((0.5, 0.48), (0.3, 0.3))
OFFCUT_3 = ((0.2, 2.0, 0.0), (0.3, 0.4, None))
SHORT = tuple(0.1 * 2.0**-k for k in range(6))


def bump(spec):
    return dist.bump_test_function(*spec)


def chart_point(n, s, *angles):
    return geo.de_sitter_chart(np.array([s]), geo.sphere_direction(n, tuple(np.array([a]) for a in angles)))[0]


# ---------------------------------------------------------------- test functions


def test_bump_vanishes_outside_and_peaks_at_center():
    tf = bump(OFFCUT_2)
    assert tf(0.2, 2.0) == pytest.approx(math.exp(-1))
    assert tf(0.5, 2.0) == 0 and tf(0.2, 2.41) == 0
    assert np.allclose(tf.box, ((-0.1, 0.5), (1.6, 2.4)), atol=1e-15)


def test_bump_is_smooth_at_the_edge():
    tf = bump(OFFCUT_2)
    s = 0.2 + 0.3 * (1 - np.geomspace(1e-1, 1e-3, 5))
    vals = tf(s, 2.0)
    # exp(-1/(1 - r^2)) vanishes faster than any power of the distance to the edge
    dist_edge = 1 - (s - 0.2) / 0.3
    ratio = vals / dist_edge**4
    assert np.all(np.diff(ratio) < 0) and ratio[-1] < 1e-200
    assert np.all(np.diff(vals) < 0)


@pytest.mark.parametrize("radii", [(None, 0.3), (0.3, -0.1), (0.3,)])
def test_bump_rejects_bad_radii(radii):
    with pytest.raises(ValueError):
        dist.bump_test_function((0.0, 0.0), radii)


def test_free_angle_is_periodic():
    tf = bump(OFFCUT_3)
    assert tf.box[2] == (-math.pi, math.pi)
    assert tf.periodic == (False, True)
    assert tf(0.2, 2.0, -3.0) == tf(0.2, 2.0, 1.0)


def test_test_function_rejects_n4():
    with pytest.raises(NotImplementedError):
        dist.TestFunction(lambda *a: 0, ((0, 1),) * 4, 4)


@pytest.mark.parametrize("spec,crosses", [(OFFCUT_2, False), (CUT_2, True), (OFFCUT_3, False)])
def test_crosses_cut(spec, crosses):
    assert bump(spec).crosses_cut() is crosses


# ---------------------------------------------------------------- quadrature grid


@pytest.mark.parametrize("box,n", [
    (((-0.1, 0.5), (1.6, 2.4)), 2),
    (((0.3, 0.9), (-0.4, 0.4)), 2),
    (((-0.1, 0.5), (1.6, 2.4), (-math.pi, math.pi)), 3),
    (((0.0, 1.0), (0.2, 0.7), (0.0, 1.0)), 3),
])
@pytest.mark.parametrize("cut", [False, True])
def test_grid_integrates_the_invariant_measure(box, n, cut):
    periodic = (False,) if n == 2 else (False, box[2] == (-math.pi, math.pi))
    tf = dist.TestFunction(lambda s, *a: np.ones_like(s), box, n, periodic=periodic)
    grid = dist.build_grid(tf, cut=cut)
    assert grid.integrate(np.ones(grid.size)).real == pytest.approx(dist.box_measure(box, n), rel=1e-12)


def test_grid_points_lie_on_de_sitter():
    grid = dist.build_grid(bump(CUT_2))
    assert np.max(np.abs(geo.minkowski_norm2(grid.points) - 1)) < 1e-12


# ---------------------------------------------------------------- pointwise values


@pytest.mark.parametrize("sp", family(2) + family(3), ids=str)
def test_pointwise_at_minus_en_is_one(sp):
    y = -geo.basis(sp.n, sp.n)
    assert dist.psi_bv_pointwise(sp, y) == pytest.approx(1, abs=1e-15)
    assert dist.psi_bv_pointwise(sp, y, "psi_tilde") == pytest.approx(1, abs=1e-15)


def gamma_plus_point(n, x):
    """y in Gamma^+(e_n) with (1 + y_n)/2 = x."""
    yn = 2 * x - 1
    y = np.zeros(n + 1)
    y[0] = math.sqrt(yn**2 - 1)
    y[n] = yn
    return y


def test_pointwise_on_gamma_plus_example():
    sp = SpectralParam(3, 0.5)
    y = gamma_plus_point(3, 1.5)
    want = hyp2f1_boundary(sp, 1.5, BoundarySide.MINUS_I0)
    assert dist.psi_bv_pointwise(sp, y) == want
    assert dist.psi_bv_pointwise(sp, y, "psi_tilde") == pytest.approx(np.conj(want), abs=1e-15)
    ref = complex(mpmath.hyp2f1(1.5, 0.5, 1.5, mpmath.mpc(1.5, -1e-30)))
    assert abs(want - ref) < 1e-13


@pytest.mark.parametrize("sp", family(2) + family(3), ids=str)
@pytest.mark.parametrize("x", [1.2, 1.7, 3.0])
def test_jump_structure(sp, x):
    y = gamma_plus_point(sp.n, x)
    jump = cut_jump(sp, x)
    future = dist.psi_bv_pointwise(sp, y) - dist.psi_bv_pointwise(sp, y, "psi_tilde")
    ypast = y.copy()
    ypast[0] = -ypast[0]
    pastdiff = dist.psi_bv_pointwise(sp, ypast) - dist.psi_bv_pointwise(sp, ypast, "psi_tilde")
    assert abs(future + jump) < 1e-12 * max(1, abs(jump))
    assert abs(pastdiff - jump) < 1e-12 * max(1, abs(jump))


@pytest.mark.parametrize("sp", family(2) + family(3), ids=str)
def test_pointwise_spacelike_is_the_real_formula(sp, rng):
    for _ in range(5):
        s = rng.uniform(-1, 1)
        angles = rng.uniform(0.5, 2.5, sp.n - 1)
        y = chart_point(sp.n, s, *angles)
        if y[-1] >= 1:
            continue
        got = dist.psi_bv_pointwise(sp, y)
        assert got == dist.psi_bv_pointwise(sp, y, "psi_tilde")
        assert abs(got - hyp2f1_family(sp, (1 + y[-1]) / 2)) < 1e-13


def test_pointwise_rejects_the_lightcone():
    sp = SpectralParam(2, 0.2)
    with pytest.raises(ValueError, match="lightcone"):
        dist.psi_bv_pointwise(sp, geo.basis(2, 2))


def test_pointwise_near_the_cone_uses_w():
    sp = SpectralParam(3, 0.5)
    w = 1e-12
    v = dist.psi_bv_from_w(sp, np.array([w]), np.array([0.0]))[0]
    # n = 3, lam = 1/2: F ~ Gamma(c) Gamma(a+b-c) / (Gamma(a) Gamma(b)) w^{c-a-b} with c-a-b = -1/2
    c = math.gamma(1.5) * math.gamma(0.5) / (math.gamma(1.5) * math.gamma(0.5))
    assert abs(v * math.sqrt(w) - c) < 1e-5


@pytest.mark.parametrize("which", ["psi", "Psi^lambda", "xi", "psi_tilde", "XiBar"])
def test_which_aliases(which):
    assert dist._which(which) in ("psi", "psi_tilde")


def test_unknown_distribution_name():
    with pytest.raises(ValueError):
        dist._which("phi")


# ---------------------------------------------------------------- pairings


@pytest.mark.parametrize("sp", family(2, (0.6, "i")), ids=str)
@pytest.mark.parametrize("spec,tol", [(OFFCUT_2, 1e-12), (CUT_2, 1e-6)])
def test_limit_matches_pointwise(sp, spec, tol):
    tf = bump(spec)
    grid = dist.build_grid(tf)
    for side, which in (("Xi", "psi"), ("XiBar", "psi_tilde")):
        lim = dist.pair_limit(sp, tf, side, grid=grid)
        point = dist.pair_pointwise(sp, tf, which, grid=grid)
        assert lim.converged
        assert abs(lim.value - point) <= tol * max(1, abs(point))


def test_real_bump_gives_conjugate_pairings():
    # the bump is real, so the XiBar pairing is the conjugate of the Xi pairing
    sp = SpectralParam(2, 0.3)
    tf = bump(CUT_2)
    grid = dist.build_grid(tf)
    a = dist.pair_pointwise(sp, tf, "psi", grid=grid)
    b = dist.pair_pointwise(sp, tf, "psi_tilde", grid=grid)
    assert abs(a.imag) > 1e-4
    assert abs(a - np.conj(b)) < 1e-14


def test_offcut_pairing_is_real():
    sp = SpectralParam(2, 0.3)
    tf = bump(OFFCUT_2)
    assert abs(dist.pair_pointwise(sp, tf).imag) < 1e-15


@pytest.mark.parametrize("ladder", [(0.1,), (0.1, 0.2), (0.1, 0.05, 0.02), (2.0, 1.0), (0.1, -0.05)])
def test_eps_ladder_validation(ladder):
    with pytest.raises(ValueError):
        dist.pair_limit(SpectralParam(2, 0.3), bump(OFFCUT_2), eps_ladder=ladder)


def test_pair_unknown_route():
    with pytest.raises(ValueError):
        dist.pair(SpectralParam(2, 0.3), bump(OFFCUT_2), route="sideways")


def test_pointwise_rejects_cut_for_n4():
    tf = bump(CUT_2)
    sp = SpectralParam(4, 0.5)
    with pytest.raises(ValueError, match="n >= 4"):
        dist.pair_pointwise(sp, tf)


# ---------------------------------------------------------------- Laplace-Beltrami and KG


@pytest.mark.parametrize("n", [2, 3])
def test_laplacian_of_constant_is_zero(n):
    s = np.linspace(-1, 1, 5)
    angles = (np.full(5, 1.0),) if n == 2 else (np.full(5, 1.0), np.full(5, 0.5))
    out = dist.laplace_beltrami_apply(lambda s, *a: np.ones_like(s), n, s, angles)
    assert np.max(np.abs(out)) < 1e-9


@pytest.mark.parametrize("n", [2, 3])
def test_laplacian_of_coordinate(n, rng):
    # Delta y_n = -n y_n
    def yn(s, *angles):
        return geo.de_sitter_chart(s, geo.sphere_direction(n, angles))[..., -1]

    s = rng.uniform(-1, 1, 6)
    angles = tuple(rng.uniform(0.4, 2.5, 6) for _ in range(n - 1))
    out = dist.laplace_beltrami_apply(yn, n, s, angles)
    assert np.max(np.abs(out + n * yn(s, *angles))) < 1e-7


@pytest.mark.parametrize("sp", family(2) + family(3), ids=str)
def test_pointwise_kg_on_analytic_region(sp):
    # y_n < 1 everywhere here, so Delta F((1+y_n)/2) = (rho^2 - lam^2) F
    def f(s, *angles):
        y = geo.de_sitter_chart(s, geo.sphere_direction(sp.n, angles))
        return hyp2f1_family(sp, (1 + y[..., -1]) / 2)

    s = np.array([0.1, 0.3])
    angles = (np.array([2.0, 1.5]),) if sp.n == 2 else (np.array([2.0, 1.5]), np.array([0.3, 1.0]))
    lap = dist.laplace_beltrami_apply(f, sp.n, s, angles, step=0.01)
    assert np.max(np.abs(lap - sp.mass2 * f(s, *angles))) < 1e-6


def test_fd_step_floor():
    with pytest.raises(ValueError):
        dist.laplace_beltrami_apply(lambda s, a: s, 2, np.zeros(1), (np.zeros(1),), step=1e-7)


def test_weak_kg_with_zero_test_function():
    sp = SpectralParam(2, 0.3)
    zero = dist.TestFunction(lambda s, a: np.zeros_like(s), ((-0.1, 0.5), (1.6, 2.4)), 2)
    rep = dist.weak_kg_check(sp, zero, route="pointwise")
    assert rep.residual == 0 and rep.theta_phi == 0


def test_weak_kg_offcut_pointwise():
    sp = SpectralParam(2, 0.3)
    rep = dist.weak_kg_check(sp, bump(OFFCUT_2), route="pointwise")
    assert rep.residual < 1e-6


def test_weak_kg_rejects_dimension_mismatch():
    with pytest.raises(ValueError):
        dist.weak_kg_check(SpectralParam(3, 0.5), bump(OFFCUT_2))


def test_observed_orders():
    steps = [0.02, 0.01, 0.005]
    res = [16e-8, 1e-8, 1e-8 / 16]
    assert np.allclose(dist.observed_orders(steps, res), 4)


# ---------------------------------------------------------------- H-invariance


def test_identity_is_exactly_invariant():
    assert dist.h_invariance_check(SpectralParam(2, 0.3), bump(OFFCUT_2), np.eye(3)) == 0


@pytest.mark.parametrize("g", [geo.boost(2, 0.3, axis=2), geo.rotation(2, 1, 2, 0.4), 2 * np.eye(3)])
def test_h_membership_rejected(g):
    with pytest.raises(ValueError, match="fixing e_n"):
        dist.h_invariance_check(SpectralParam(2, 0.3), bump(OFFCUT_2), g)


def test_boost_invariance_pointwise():
    sp = SpectralParam(2, 0.3)
    err = dist.h_invariance_check(sp, bump(OFFCUT_2), geo.boost(2, 0.2, axis=1), route="pointwise")
    assert err < 1e-8


def test_compose_with_moves_the_bump():
    tf = bump(OFFCUT_2)
    g = geo.boost(2, 0.2, axis=1)
    moved = dist.compose_with(tf, g)
    # phi o g at g^{-1} y equals phi at y
    y = chart_point(2, 0.2, 2.0)
    back = geo.group_inverse(g) @ y
    s, omega = geo.de_sitter_chart_inverse(back)
    (alpha,) = geo.sphere_angles(omega)
    assert moved(s, alpha) == pytest.approx(tf(0.2, 2.0), rel=1e-12)
