"""Boundary-value distributions Psi^lambda, tilde Psi^lambda on dS^n.

Test functions live in the chart y = (sinh s, cosh s * omega(angles)) with
angles (alpha,) for n = 2 and (beta, gamma) for n = 3 (see
:func:`dsk.geometry.sphere_direction`).  The lightcone of e_n is
{y_n = 1} = {cosh s * omega_n = 1}, where the kernels are singular.

Two independent pairing routes:

* :func:`pair_limit` integrates against Psi_lambda(z_eps, .) with z_eps the
  crown approach point, then extrapolates eps -> 0+.
* :func:`pair_pointwise` integrates against the piecewise closed form of
  :func:`psi_bv_pointwise` (locally integrable for n = 2, 3 only).
"""

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import geometry as geo
from .hyp2f1 import BoundarySide, hyp2f1_family, hyp2f1_from_w
from .quadrature import composite, cut_adapted_rule, graded_breaks, richardson

EPS_LADDER = tuple(0.1 * 2.0**-k for k in range(9))
MIN_STEP = 1e-6
FD_STEP = 0.005
CHUNK = 100_000


# ---------------------------------------------------------------- test functions


@dataclass(frozen=True)
class TestFunction:
    """Smooth function in chart coordinates, zero outside ``box``.

    ``box`` is ((s_lo, s_hi), (a1_lo, a1_hi), ...); ``periodic`` flags angle
    coordinates whose box spans a full period.
    """

    __test__ = False  # not a pytest class

    evaluator: Callable
    box: tuple
    n: int
    smoothness: str = "C_inf"
    periodic: tuple = ()

    def __post_init__(self):
        if self.n not in (2, 3):
            raise NotImplementedError("chart test functions are implemented for n = 2, 3")
        if len(self.box) != self.n:
            raise ValueError("box needs one interval for s and one per angle")
        object.__setattr__(self, "box", tuple(tuple(map(float, b)) for b in self.box))
        if not self.periodic:
            object.__setattr__(self, "periodic", (False,) * (self.n - 1))
        if self.n == 3:
            lo, hi = self.box[1]
            if lo < 0 or hi > math.pi:
                raise ValueError("beta range must lie in [0, pi]")

    def __call__(self, s, *angles):
        return np.asarray(self.evaluator(np.asarray(s, float), *(np.asarray(a, float) for a in angles)))

    def max_yn(self, samples=201):
        """Largest y_n over the support box (sampled)."""
        s = np.linspace(*self.box[0], samples)
        cosh = np.cosh(s)
        if self.n == 2:
            lo, hi = self.box[1]
            a = np.linspace(lo, hi, samples)
            # cos alpha is largest at the point of the interval closest to 0
            best = 1.0 if lo <= 0 <= hi else max(np.cos(lo), np.cos(hi))
            return float(np.max(cosh) * max(best, np.max(np.cos(a))))
        lo, hi = self.box[1]
        best = 1.0 if lo <= 0 else np.cos(lo)
        return float(np.max(cosh) * best)

    def crosses_cut(self):
        """True if the support box reaches the lightcone y_n = 1 of e_n."""
        return self.max_yn() >= 1 - 1e-12


def bump_test_function(center, radii, amplitude=1.0):
    """amplitude * exp(-1/(1 - r^2)) with r^2 = sum ((q - c)/R)^2 over chart coordinates.

    ``center`` = (s0, *angles0); a radius of None leaves that angle
    unconstrained over its full range (the bump is then independent of it).
    """
    center = tuple(float(c) for c in center)
    n = len(center)
    if len(radii) != n:
        raise ValueError("one radius per chart coordinate")
    free = tuple(r is None for r in radii)
    if free[0]:
        raise ValueError("the s radius must be finite")
    if any(r is not None and r <= 0 for r in radii):
        raise ValueError("radii must be positive")
    box = []
    for k, (c, r) in enumerate(zip(center, radii)):
        if r is None:
            box.append((0.0, math.pi) if (n == 3 and k == 1) else (-math.pi, math.pi))
        else:
            box.append((c - r, c + r))
    bound = [(c, r) for c, r in zip(center, radii)]

    def evaluator(s, *angles):
        coords = (s, *angles)
        r2 = np.zeros(np.broadcast(*coords).shape)
        for q, (c, r) in zip(coords, bound):
            if r is not None:
                r2 = r2 + ((q - c) / r) ** 2
        out = np.zeros_like(r2)
        inside = r2 < 1
        out[inside] = amplitude * np.exp(-1.0 / (1.0 - r2[inside]))
        return out

    periodic = tuple(f and not (n == 3 and k == 1) for k, f in enumerate(free) if k > 0)
    return TestFunction(evaluator, tuple(box), n, periodic=periodic)


# ---------------------------------------------------------------- quadrature grid


@dataclass
class QuadratureGrid:
    s: np.ndarray
    angles: tuple
    weights: np.ndarray  # include cosh^{n-1} s and the angular density
    points: np.ndarray  # (N, n+1) coordinates on dS^n
    config: dict = field(default_factory=dict)

    @property
    def size(self):
        return self.weights.size

    def integrate(self, values):
        return complex(np.sum(self.weights * values))


def box_measure(box, n):
    """Invariant measure of a chart box."""
    (s0, s1), *ang = box
    if n == 2:
        return (math.sinh(s1) - math.sinh(s0)) * (ang[0][1] - ang[0][0])
    if n == 3:
        # int cosh^2 = (s + sinh s cosh s)/2
        rad = ((s1 + math.sinh(s1) * math.cosh(s1)) - (s0 + math.sinh(s0) * math.cosh(s0))) / 2
        return rad * (math.cos(ang[0][0]) - math.cos(ang[0][1])) * (ang[1][1] - ang[1][0])
    raise NotImplementedError


def _cut_angle(s):
    """Angle from e_n at which the lightcone y_n = 1 crosses the slice s."""
    c = 1.0 / np.cosh(s)
    return np.arccos(np.clip(c, -1, 1))


def _s_rule(lo, hi, order, panel, ratio, levels, grade_zero):
    if grade_zero and lo < 0 < hi:
        x1, w1 = _graded_end(lo, 0.0, order, panel, ratio, levels)
        x2, w2 = _graded_end(0.0, hi, order, panel, ratio, levels)
        return np.concatenate([x1, x2]), np.concatenate([w1, w2])
    if grade_zero and (lo == 0 or hi == 0):
        return _graded_end(lo, hi, order, panel, ratio, levels)
    pieces = max(1, int(math.ceil((hi - lo) / panel)))
    return composite(np.linspace(lo, hi, pieces + 1), order)


def _graded_end(lo, hi, order, panel, ratio, levels):
    at = "left" if lo == 0 else "right"
    pieces = max(1, int(math.ceil((hi - lo) / panel)))
    grid = np.linspace(lo, hi, pieces + 1)
    xs, ws = [], []
    for j, (u, v) in enumerate(zip(grid[:-1], grid[1:])):
        if (at == "left" and j == 0) or (at == "right" and j == pieces - 1):
            br = graded_breaks(u, v, at, ratio, levels)
        else:
            br = np.array([u, v])
        x, w = composite(br, order)
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


def _angle_rule(lo, hi, periodic, order, panel, singular, ratio, levels):
    if periodic:
        m = order
        x = lo + (hi - lo) * np.arange(m) / m
        return x, np.full(m, (hi - lo) / m)
    if singular:
        return cut_adapted_rule(lo, hi, singular, order, panel, ratio, levels)
    pieces = max(1, int(math.ceil((hi - lo) / panel)))
    return composite(np.linspace(lo, hi, pieces + 1), order)


def build_grid(tf, order=None, panel=0.05, ratio=0.25, levels=24, cut=None):
    """Tensor-product rule on the support box of ``tf``.

    When the box meets the lightcone of e_n (or ``cut`` is True) the angle
    from e_n is split at the cut and graded geometrically toward it, and s is
    split at 0 and graded toward the cone vertex.
    """
    n = tf.n
    if order is None:
        order = 16 if n == 2 else 12
    cut = tf.crosses_cut() if cut is None else cut
    (s_lo, s_hi), *ang = tf.box
    s_nodes, s_w = _s_rule(s_lo, s_hi, order, panel, ratio, levels, cut)
    blocks = []
    for s, ws in zip(s_nodes, s_w):
        theta = float(_cut_angle(s)) if cut else None
        if n == 2:
            sing = [] if theta is None else ([-theta, theta] if theta > 0 else [0.0])
            a, wa = _angle_rule(*ang[0], tf.periodic[0], order, panel, sing, ratio, levels)
            w = ws * wa * np.cosh(s)
            blocks.append((np.full(a.shape, s), (a,), w))
        else:
            sing = [theta] if theta is not None else []
            b, wb = _angle_rule(*ang[0], False, order, panel, sing, ratio, levels)
            g, wg = _angle_rule(*ang[1], tf.periodic[1], order, panel, [], ratio, levels)
            bb, gg = np.meshgrid(b, g, indexing="ij")
            w = ws * np.outer(wb * np.sin(b), wg).ravel() * np.cosh(s) ** 2
            blocks.append((np.full(bb.size, s), (bb.ravel(), gg.ravel()), w))
    s_all = np.concatenate([b[0] for b in blocks])
    angles = tuple(np.concatenate([b[1][k] for b in blocks]) for k in range(n - 1))
    weights = np.concatenate([b[2] for b in blocks])
    omega = geo.sphere_direction(n, angles)
    pts = geo.de_sitter_chart(s_all, omega)
    cfg = {"order": order, "panel": panel, "ratio": ratio, "levels": levels, "cut": cut}
    return QuadratureGrid(s_all, angles, weights, pts, cfg)


# ---------------------------------------------------------------- pointwise values


def _which(which):
    key = str(which).lower().replace("^", "").replace("lambda", "").replace("_", "")
    if key in ("psi", "xi"):
        return "psi"
    if key in ("psitilde", "tildepsi", "xibar"):
        return "psi_tilde"
    raise ValueError(f"unknown distribution {which!r}")


def psi_bv_from_w(sp, w, y0, which="psi"):
    """Psi^lambda from w = 1 - (1 + y_n)/2 = (1 - y_n)/2 and the time coordinate y_0.

    Callers that know y_n - 1 without cancellation pass it here directly.
    """
    which = _which(which)
    w = np.asarray(w, dtype=float)
    y0 = np.broadcast_to(np.asarray(y0, dtype=float), w.shape)
    out = np.empty(w.shape, dtype=complex)
    space = w > 0
    if space.any():
        out[space] = hyp2f1_from_w(sp, w[space])
    first = BoundarySide.MINUS_I0 if which == "psi" else BoundarySide.PLUS_I0
    future = ~space & (y0 > 0)
    past = ~space & ~future
    if future.any():
        out[future] = hyp2f1_from_w(sp, w[future], first)
    if past.any():
        out[past] = hyp2f1_from_w(sp, w[past], first.opposite)
    return out


def psi_bv_pointwise(sp, y, which="psi", tol=geo.TOL_CONE):
    """Psi^lambda(y) or tilde Psi^lambda(y) for y off the lightcone of e_n.

    Spacelike to e_n (y_n < 1): 2F1((1 + y_n)/2).  On Gamma^+(e_n) (y_n > 1,
    y_0 > 0) Psi^lambda takes the -i0 boundary value and tilde Psi^lambda the
    +i0 one; on Gamma^-(e_n) the sides swap.
    """
    which = _which(which)
    y = np.asarray(y, dtype=float)
    scalar = y.ndim == 1
    y = np.atleast_2d(y)
    yn = y[:, -1]
    interval = 2 - 2 * yn  # [y - e_n, y - e_n]
    if np.any(np.abs(interval) <= tol):
        raise ValueError("y lies on the lightcone of e_n (singular support)")
    out = psi_bv_from_w(sp, (1 - yn) / 2, y[:, 0], which)
    return complex(out[0]) if scalar else out


# ---------------------------------------------------------------- pairings


@dataclass
class LimitPairing:
    value: complex
    residual: float
    eps: np.ndarray
    values: np.ndarray
    tol: float = 1e-6

    @property
    def converged(self):
        return self.residual <= self.tol * (1 + abs(self.value))


def _grid_for(tf, grid, grid_opts):
    if grid is not None:
        return grid
    return build_grid(tf, **(grid_opts or {}))


def _chunked(fn, arr):
    if len(arr) <= CHUNK:
        return fn(arr)
    return np.concatenate([fn(arr[k : k + CHUNK]) for k in range(0, len(arr), CHUNK)])


def crown_kernel_on_grid(sp, grid, eps, side="Xi"):
    """Psi_lambda(z_eps, y) (Xi) or tilde Psi_lambda(z_eps, y) (XiBar) at grid nodes."""
    side = geo.CrownSide.parse(side)
    y = grid.points
    arg = (1 + math.cos(eps) * y[:, -1] - 1j * side.sign * math.sin(eps) * y[:, 0]) / 2
    return _chunked(lambda z: hyp2f1_family(sp, z), arg)


def pair_at_eps(sp, tf, eps, side="Xi", grid=None, grid_opts=None):
    grid = _grid_for(tf, grid, grid_opts)
    phi = np.conj(tf(grid.s, *grid.angles))
    return grid.integrate(phi * crown_kernel_on_grid(sp, grid, eps, side))


def _check_ladder(eps):
    eps = np.asarray(eps, dtype=float)
    if eps.ndim != 1 or eps.size < 2:
        raise ValueError("need at least two eps values")
    if np.any(eps <= 0) or np.any(eps >= math.pi / 2) or np.any(np.diff(eps) >= 0):
        raise ValueError("eps ladder must decrease within (0, pi/2)")
    ratios = eps[:-1] / eps[1:]
    if np.max(np.abs(ratios - ratios[0])) > 1e-9 * ratios[0]:
        raise ValueError("eps ladder must be geometric")
    return eps, float(ratios[0])


def pair_limit(sp, tf, side="Xi", eps_ladder=EPS_LADDER, grid=None, grid_opts=None, tol=1e-6):
    """lim_{eps -> 0+} of int conj(phi(y)) kernel(z_eps, y) dmu(y).

    Richardson extrapolation in eps on a geometric ladder; the returned
    residual is the last accepted change in the extrapolation table.
    """
    eps, ratio = _check_ladder(eps_ladder)
    grid = _grid_for(tf, grid, grid_opts)
    phi = np.conj(tf(grid.s, *grid.angles))
    mask = phi != 0
    sub = QuadratureGrid(grid.s[mask], tuple(a[mask] for a in grid.angles), grid.weights[mask], grid.points[mask])
    vals = np.array(
        [sub.integrate(phi[mask] * crown_kernel_on_grid(sp, sub, e, side)) for e in eps]
    )
    ex = richardson(vals, ratio=ratio)
    return LimitPairing(ex.value, ex.residual, eps, vals, tol)


def pair_pointwise(sp, tf, which="psi", grid=None, grid_opts=None):
    """int conj(phi) Psi^lambda dmu using the closed-form boundary values."""
    which = _which(which)
    if sp.n >= 4 and tf.crosses_cut():
        raise ValueError("pointwise values are not locally integrable across the cut for n >= 4")
    grid = _grid_for(tf, grid, grid_opts)
    phi = np.conj(tf(grid.s, *grid.angles))
    # a node landing exactly on the cone carries negligible weight of an integrable singularity
    keep = (phi != 0) & (grid.points[:, -1] != 1)
    vals = _chunked(lambda y: psi_bv_pointwise(sp, y, which, tol=0.0), grid.points[keep])
    return complex(np.sum(grid.weights[keep] * phi[keep] * vals))


def pair(sp, tf, which="psi", route="limit", grid=None, grid_opts=None, eps_ladder=EPS_LADDER):
    which = _which(which)
    if route == "limit":
        side = "Xi" if which == "psi" else "XiBar"
        return pair_limit(sp, tf, side, eps_ladder, grid, grid_opts).value
    if route == "pointwise":
        return pair_pointwise(sp, tf, which, grid, grid_opts)
    raise ValueError(f"unknown route {route!r}")


# ---------------------------------------------------------------- Laplace-Beltrami


def _d1(f, h):
    return (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h)


def _d2(f, f0, h):
    return (-f(2 * h) + 16 * f(h) - 30 * f0 + 16 * f(-h) - f(-2 * h)) / (12 * h * h)


def laplace_beltrami_apply(f, n, s, angles, step=FD_STEP):
    """Delta f = -cosh^{1-n} d_s(cosh^{n-1} d_s f) + cosh^{-2} Delta_{S^{n-1}} f.

    Fourth-order central differences with step ``step`` in every chart
    coordinate.  Delta y_n = -n y_n and Delta 2F1((1+y_n)/2) = (rho^2 - lam^2) 2F1.
    """
    if not step >= MIN_STEP:
        raise ValueError(f"finite-difference step must be >= {MIN_STEP}")
    s = np.asarray(s, dtype=float)
    angles = tuple(np.asarray(a, dtype=float) for a in angles)
    f0 = np.asarray(f(s, *angles))

    def along(k):
        def shifted(d):
            coords = [s, *angles]
            coords[k] = coords[k] + d
            return np.asarray(f(*coords))

        return shifted

    fs = along(0)
    radial = -_d2(fs, f0, step) - (n - 1) * np.tanh(s) * _d1(fs, step)
    if n == 2:
        sphere = _d2(along(1), f0, step)
    elif n == 3:
        beta = angles[0]
        fb = along(1)
        sphere = _d2(fb, f0, step) + _d1(fb, step) / np.tan(beta) + _d2(along(2), f0, step) / np.sin(beta) ** 2
    else:
        raise NotImplementedError("chart Laplacian implemented for n = 2, 3")
    return radial + sphere / np.cosh(s) ** 2


def laplacian_test_function(tf, step=FD_STEP):
    """The test function Delta phi on the same support box."""

    def evaluator(s, *angles):
        return laplace_beltrami_apply(tf, tf.n, s, angles, step)

    return TestFunction(evaluator, tf.box, tf.n, tf.smoothness, tf.periodic)


@dataclass
class KGReport:
    residual: float
    theta_phi: complex
    theta_lap_phi: complex
    mass2: float
    step: float


def weak_kg_check(sp, tf, which="psi", route="limit", step=FD_STEP, grid=None, grid_opts=None,
                  eps_ladder=EPS_LADDER):
    """|Theta(Delta phi) - (rho^2 - lam^2) Theta(phi)| / (1 + |Theta(phi)|)."""
    if tf.n != sp.n:
        raise ValueError("test function and spectral parameter disagree on n")
    grid = _grid_for(tf, grid, grid_opts)
    lap = laplacian_test_function(tf, step)
    t_phi = pair(sp, tf, which, route, grid, eps_ladder=eps_ladder)
    t_lap = pair(sp, lap, which, route, grid, eps_ladder=eps_ladder)
    res = abs(t_lap - sp.mass2 * t_phi) / (1 + abs(t_phi))
    return KGReport(float(res), t_phi, t_lap, sp.mass2, step)


def observed_orders(steps, residuals):
    """log(r_k / r_{k+1}) / log(h_k / h_{k+1}) along a refinement ladder."""
    steps = np.asarray(steps, float)
    res = np.asarray(residuals, float)
    return np.log(res[:-1] / res[1:]) / np.log(steps[:-1] / steps[1:])


# ---------------------------------------------------------------- H-invariance


def _chart_coords(n, y):
    s, omega = geo.de_sitter_chart_inverse(y)
    return (s, *geo.sphere_angles(omega))


def compose_with(tf, g, samples=400, pad=1e-3):
    """phi o g in the chart, with support box g^{-1}(box) found from the box boundary."""
    g = np.asarray(g, dtype=float)
    n = tf.n
    ginv = geo.group_inverse(g)

    def evaluator(s, *angles):
        shape = np.broadcast(s, *angles).shape
        s_b = np.broadcast_to(s, shape)
        a_b = [np.broadcast_to(a, shape) for a in angles]
        y = geo.de_sitter_chart(s_b, geo.sphere_direction(n, a_b))
        coords = _chart_coords(n, y @ g.T)
        return tf(*coords)

    # image of the box boundary under g^{-1}
    edges = []
    t = np.linspace(0, 1, samples)
    ranges = tf.box
    for k in range(n):
        for end in (0, 1):
            others = [j for j in range(n) if j != k]
            mesh = np.meshgrid(*([t] * (n - 1)), indexing="ij")
            coords = [None] * n
            coords[k] = np.full(mesh[0].size, ranges[k][end])
            for j, m in zip(others, mesh):
                coords[j] = ranges[j][0] + (ranges[j][1] - ranges[j][0]) * m.ravel()
            edges.append(coords)
    pts = []
    for coords in edges:
        y = geo.de_sitter_chart(coords[0], geo.sphere_direction(n, coords[1:]))
        pts.append(y @ ginv.T)
    pts = np.concatenate(pts)
    image = _chart_coords(n, pts)
    box = []
    for k, c in enumerate(image):
        lo, hi = float(np.min(c)), float(np.max(c))
        width = hi - lo
        box.append((lo - pad * max(width, 1), hi + pad * max(width, 1)))
    if n == 3:
        box[1] = (max(box[1][0], 0.0), min(box[1][1], math.pi))
    return TestFunction(evaluator, tuple(box), n, tf.smoothness)


def check_in_H(g, tol=geo.TOL_GROUP):
    g = np.asarray(g, dtype=float)
    n = g.shape[0] - 1
    en = geo.basis(n, n)
    if not geo.is_group_element(g, tol) or np.max(np.abs(g @ en - en)) > tol:
        raise ValueError("h must be an element of G fixing e_n")
    return g


def h_invariance_check(sp, tf, h, which="psi", route="limit", grid_opts=None, eps_ladder=EPS_LADDER):
    """|Theta(phi o h) - Theta(phi)| / (1 + |Theta(phi)|)."""
    h = check_in_H(h)
    if np.max(np.abs(h - np.eye(h.shape[0]))) == 0:
        return 0.0
    moved = compose_with(tf, h)
    base = pair(sp, tf, which, route, grid_opts=grid_opts, eps_ladder=eps_ladder)
    other = pair(sp, moved, which, route, grid_opts=grid_opts, eps_ladder=eps_ladder)
    return float(abs(other - base) / (1 + abs(base)))
