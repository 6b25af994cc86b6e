"""Minkowski space R^{1,n}, de Sitter points, SO(1,n)_e elements and charts.

Vectors are plain numpy arrays of length n+1 with the time component first.
The bilinear form is [z, w] = -z_0 w_0 + z_1 w_1 + ... + z_n w_n, extended
complex-bilinearly (no conjugation).
"""

from enum import Enum

import numpy as np

TOL_MANIFOLD = 1e-10
TOL_GROUP = 1e-10
TOL_CONE = 1e-12


class ConeClass(Enum):
    FUTURE = "future"
    PAST = "past"
    SPACELIKE = "spacelike"
    LIGHTLIKE = "lightlike"
    COINCIDENT = "coincident"


class CrownSide(Enum):
    XI = "Xi"
    XI_BAR = "XiBar"

    @property
    def sign(self):
        return 1 if self is CrownSide.XI else -1

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).lower().replace("_", "")
        if key in ("xi", "+", "plus"):
            return cls.XI
        if key in ("xibar", "-", "minus"):
            return cls.XI_BAR
        raise ValueError(f"unknown crown side {value!r}")


def metric(n):
    return np.diag([-1.0] + [1.0] * n)


def basis(n, j, dtype=float):
    e = np.zeros(n + 1, dtype=dtype)
    e[j] = 1
    return e


def bilinear_form(z, w):
    """[z, w] over the last axis; broadcasts over leading axes."""
    z = np.asarray(z)
    w = np.asarray(w)
    if z.shape[-1] != w.shape[-1]:
        raise ValueError(f"dimension mismatch: {z.shape[-1]} vs {w.shape[-1]}")
    return -z[..., 0] * w[..., 0] + np.sum(z[..., 1:] * w[..., 1:], axis=-1)


def minkowski_norm2(x):
    return bilinear_form(x, x)


def on_de_sitter(x, tol=TOL_MANIFOLD):
    x = np.asarray(x)
    return bool(np.all(np.isreal(x))) and abs(minkowski_norm2(np.real(x)) - 1) <= tol


def on_complex_de_sitter(z, tol=TOL_MANIFOLD):
    return abs(minkowski_norm2(np.asarray(z, dtype=complex)) - 1) <= tol


def classify_interval(x, y, tol_manifold=TOL_MANIFOLD, tol_cone=TOL_CONE):
    """Causal relation of y relative to x, both on dS^n."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    for p in (x, y):
        if abs(minkowski_norm2(p) - 1) > tol_manifold:
            raise ValueError("point is not on dS^n")
    d = y - x
    scale = 1.0 + float(np.sum(d * d))
    if np.sqrt(np.sum(d * d)) <= tol_cone * 10:
        return ConeClass.COINCIDENT
    q = minkowski_norm2(d)
    if q > tol_cone * scale:
        return ConeClass.SPACELIKE
    if q < -tol_cone * scale:
        return ConeClass.FUTURE if d[0] > 0 else ConeClass.PAST
    return ConeClass.LIGHTLIKE


# ---------------------------------------------------------------- group


def boost(n, t, axis=None):
    """Boost mixing coordinate 0 with ``axis`` (default n) by rapidity t."""
    axis = n if axis is None else axis
    g = np.eye(n + 1)
    c, s = np.cosh(t), np.sinh(t)
    g[0, 0] = g[axis, axis] = c
    g[0, axis] = g[axis, 0] = s
    return g


def boost_a(n, t):
    """The A-subgroup element a_t."""
    return boost(n, t)


def rotation(n, i, j, theta):
    """Rotation by theta in the spatial (i, j) plane, 1 <= i, j <= n."""
    g = np.eye(n + 1)
    c, s = np.cos(theta), np.sin(theta)
    g[i, i] = g[j, j] = c
    g[i, j] = -s
    g[j, i] = s
    return g


def random_rotation(n, rng, axes=None):
    """Haar-random SO(m) acting on the listed spatial axes (default 1..n)."""
    axes = list(range(1, n + 1)) if axes is None else list(axes)
    m = len(axes)
    g = np.eye(n + 1)
    if m < 2:
        return g
    q, r = np.linalg.qr(rng.normal(size=(m, m)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    g[np.ix_(axes, axes)] = q
    return g


def random_group_element(n, rng, max_rapidity=1.0):
    """Rotation x boost x rotation with a random rapidity."""
    t = rng.uniform(-max_rapidity, max_rapidity)
    return random_rotation(n, rng) @ boost(n, t, axis=1) @ random_rotation(n, rng)


def random_H_element(n, rapidity, rng=None):
    """An element of H = Stab(e_n): a (0, j)-boost, j < n, times a rotation of 1..n-1.

    With ``rng`` None the rotation is trivial and the boost is along axis 1.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if rng is None:
        return boost(n, rapidity, axis=1)
    axis = int(rng.integers(1, n)) if n > 2 else 1
    return boost(n, rapidity, axis=axis) @ random_rotation(n, rng, axes=range(1, n))


def group_inverse(g):
    n = g.shape[0] - 1
    eta = metric(n)
    return eta @ g.T @ eta


def is_group_element(g, tol=TOL_GROUP):
    """Membership test for SO(1,n)_e."""
    g = np.asarray(g, dtype=float)
    n = g.shape[0] - 1
    eta = metric(n)
    if np.max(np.abs(g.T @ eta @ g - eta)) > tol:
        return False
    return abs(np.linalg.det(g) - 1) <= 1e-8 and g[0, 0] >= 1 - tol


def h_generator(n):
    """Generator of the (0, n)-boost, so that expm(t*h) = a_t."""
    h = np.zeros((n + 1, n + 1))
    h[0, n] = h[n, 0] = 1
    return h


def h_boost_generator_exp(n, t):
    """exp(i t h) in closed form: cos t on the (0, n) block, i sin t off-diagonal."""
    g = np.eye(n + 1, dtype=complex)
    g[0, 0] = g[n, n] = np.cos(t)
    g[0, n] = g[n, 0] = 1j * np.sin(t)
    return g


def crown_approach_point(n, eps, side=CrownSide.XI):
    """(+-i sin eps, 0, ..., 0, cos eps), tending to e_n as eps -> 0+.

    The Xi-side point lies in S^n_+ and the XiBar-side point in S^n_-.
    Equals exp(+-i eps h) e_n.
    """
    eps = float(eps)
    if not 0 < eps < np.pi / 2:
        raise ValueError("eps must lie in (0, pi/2)")
    side = CrownSide.parse(side)
    z = np.zeros(n + 1, dtype=complex)
    z[0] = side.sign * 1j * np.sin(eps)
    z[n] = np.cos(eps)
    return z


def dual_cone_contains(eta, cone_samples, tol=TOL_CONE):
    """Euclidean dual-cone membership: eta . xi >= 0 for every sampled xi."""
    samples = np.atleast_2d(np.asarray(cone_samples, dtype=float))
    if samples.size == 0:
        raise ValueError("cone sample set is empty")
    dots = samples @ np.asarray(eta, dtype=float)
    scale = np.linalg.norm(samples, axis=1) * max(np.linalg.norm(eta), 1.0)
    return bool(np.all(dots >= -tol * scale))


# ---------------------------------------------------------------- charts


def sphere_direction(n, angles):
    """Unit vector in R^n from chart angles.

    n = 2: angles = (alpha,), omega = (sin alpha, cos alpha).
    n = 3: angles = (beta, gamma), omega = (sin b cos g, sin b sin g, cos b).
    The last component is the e_n direction in both cases.
    """
    if n == 2:
        (alpha,) = angles
        alpha = np.asarray(alpha, dtype=float)
        return np.stack([np.sin(alpha), np.cos(alpha)], axis=-1)
    if n == 3:
        beta, gamma = (np.asarray(a, dtype=float) for a in angles)
        return np.stack(
            [np.sin(beta) * np.cos(gamma), np.sin(beta) * np.sin(gamma), np.cos(beta)], axis=-1
        )
    raise NotImplementedError("angular charts are implemented for n = 2, 3")


def sphere_angles(omega):
    """Inverse of :func:`sphere_direction`."""
    omega = np.asarray(omega, dtype=float)
    n = omega.shape[-1]
    if n == 2:
        return (np.arctan2(omega[..., 0], omega[..., 1]),)
    if n == 3:
        beta = np.arctan2(np.hypot(omega[..., 0], omega[..., 1]), omega[..., 2])
        gamma = np.arctan2(omega[..., 1], omega[..., 0])
        return beta, gamma
    raise NotImplementedError("angular charts are implemented for n = 2, 3")


def de_sitter_chart(s, omega, tol=TOL_MANIFOLD):
    """x = (sinh s, cosh s * omega) for unit omega in R^n."""
    s = np.asarray(s, dtype=float)
    omega = np.asarray(omega, dtype=float)
    if np.any(np.abs(np.linalg.norm(omega, axis=-1) - 1) > tol):
        raise ValueError("omega must be a unit vector")
    return np.concatenate([np.sinh(s)[..., None], np.cosh(s)[..., None] * omega], axis=-1)


def de_sitter_chart_inverse(x):
    """(s, omega) with x = (sinh s, cosh s * omega)."""
    x = np.asarray(x, dtype=float)
    s = np.arcsinh(x[..., 0])
    omega = x[..., 1:] / np.cosh(s)[..., None]
    return s, omega


def chart_measure_weight(s, n):
    """Density cosh^{n-1} s of the invariant measure in the (s, omega) chart."""
    return np.cosh(s) ** (n - 1)


def angular_measure_weight(n, angles):
    """Density of the round measure on S^{n-1} in chart angles."""
    if n == 2:
        return np.ones_like(np.asarray(angles[0], dtype=float))
    if n == 3:
        return np.sin(np.asarray(angles[0], dtype=float))
    raise NotImplementedError


def lightcone_chart(p):
    """Chart near e_n used for covectors: p = (y_0, ..., y_{n-1}) -> y on dS^n.

    y_n = sqrt(1 + y_0^2 - |y'|^2) > 0.  The lightcone of e_n is the cone
    p_0^2 = |p'|^2, and e_n + v (v null, v_n = 0) maps to p = v.
    """
    p = np.asarray(p, dtype=float)
    yn2 = 1 + p[..., 0] ** 2 - np.sum(p[..., 1:] ** 2, axis=-1)
    if np.any(yn2 <= 0):
        raise ValueError("point outside the chart domain y_n > 0")
    return np.concatenate([p, np.sqrt(yn2)[..., None]], axis=-1)


# ---------------------------------------------------------------- samplers


def random_sphere_plus(n, rng, size, min_height=0.05):
    """Points (i x0, x) of S^n_+ with x0 >= min_height, as complex vectors."""
    pts = []
    while len(pts) < size:
        v = rng.normal(size=n + 1)
        v /= np.linalg.norm(v)
        v[0] = abs(v[0])
        if v[0] >= min_height:
            pts.append(v)
    real = np.array(pts)
    out = real.astype(complex)
    out[:, 0] = 1j * real[:, 0]
    return out


def random_hyperbolic(n, rng, size, max_radius=1.5):
    """Points i (cosh r, sinh r omega) of H^n."""
    r = rng.uniform(0, max_radius, size=size)
    omega = rng.normal(size=(size, n))
    omega /= np.linalg.norm(omega, axis=1, keepdims=True)
    y = np.concatenate([np.cosh(r)[:, None], np.sinh(r)[:, None] * omega], axis=1)
    return 1j * y


def random_crown(n, rng, size, max_rapidity=1.0, min_height=0.05):
    """g . p for random g in G and p in S^n_+; lies in the crown Xi."""
    base = random_sphere_plus(n, rng, size, min_height=min_height)
    out = np.empty_like(base)
    for k in range(size):
        out[k] = random_group_element(n, rng, max_rapidity) @ base[k]
    return out
