"""Resolvent kernel of the sphere Laplacian, the reflection sigma, and the
reflection-positivity cross-check against Psi_lambda.

Sphere points are real arrays (x_0, x_1, ..., x_n) on S^n.  In the crown they
are realised as (i x_0, x_1, ..., x_n); :func:`to_crown` does the conversion.

The kernel of (-Box + rho^2 - lam^2)^{-1} is

    G(u) = sum_k Z_k(u) / ((k + rho)^2 - lam^2),
    Z_k(u) = (2k + n - 1) / ((n - 1) vol(S^n)) * C_k^rho(u),

with u the cosine of the geodesic distance.  The terms decay only
algebraically, so :func:`green_kernel` sums the series in closed form:
splitting (2k + n - 1) / ((k+rho)^2 - lam^2) into partial fractions and
writing 1/(k + alpha) as a Laplace integral turns the sum into the
Gegenbauer generating function,

    G(u) = 1/((n-1) vol) int_0^inf (e^{-(rho-lam)t} + e^{-(rho+lam)t})
                                   (1 - 2u e^{-t} + e^{-2t})^{-rho} dt.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import geometry as geo
from .hyp2f1 import hyp2f1_family
from .kernels import GramReport, TOL_PSD

TOL_QUAD = 1e-12
K_MAX = 5000
TAIL_TARGET = 1e-8


@dataclass
class GreenValue:
    value: float
    tail: float  # bound on |value - exact kernel|
    K: int | None  # truncation order, None for the resummed kernel


@dataclass
class ProportionalityReport:
    ratio: float
    max_deviation: float
    ratios: np.ndarray
    skipped: list
    max_tail: float


def vol_sphere(n):
    """Surface area of the unit sphere S^n in R^{n+1}."""
    return 2 * math.pi ** ((n + 1) / 2) / math.gamma((n + 1) / 2)


def reflect_sigma(p):
    """sigma(x_0, x) = (-x_0, x)."""
    q = np.array(p, dtype=float, copy=True)
    q[..., 0] = -q[..., 0]
    return q


def to_crown(p):
    """(x_0, x) on S^n -> (i x_0, x) in dS^n_C."""
    p = np.asarray(p, dtype=float)
    z = p.astype(complex)
    z[..., 0] = 1j * p[..., 0]
    return z


def _check_sphere(p, tol=geo.TOL_MANIFOLD):
    p = np.asarray(p, dtype=float)
    if np.any(np.abs(np.sum(p * p, axis=-1) - 1) > tol):
        raise ValueError("point is not on the unit sphere")
    return p


def gegenbauer(k_max, alpha, u):
    """C_0^alpha(u), ..., C_{k_max}^alpha(u) by the three-term recurrence."""
    u = float(u)
    out = np.empty(k_max + 1)
    out[0] = 1.0
    if k_max >= 1:
        out[1] = 2 * alpha * u
    for k in range(1, k_max):
        out[k + 1] = (2 * (k + alpha) * u * out[k] - (k + 2 * alpha - 1) * out[k - 1]) / (k + 1)
    return out


def _check_spectral(sp):
    if sp.mass2 <= 0:
        raise ValueError("rho^2 - lambda^2 must be positive")


def spectral_coefficients(sp, k_max):
    """(2k + n - 1) / ((n - 1) vol(S^n) ((k + rho)^2 - lam^2)), k = 0..k_max."""
    _check_spectral(sp)
    k = np.arange(k_max + 1)
    den = ((k + sp.rho) ** 2 - sp.lam**2).real
    if np.any(den <= 0):
        raise ValueError("nonpositive spectral denominator")
    return (2 * k + sp.n - 1) / ((sp.n - 1) * vol_sphere(sp.n) * den)


def green_kernel_spectral(sp, u, K):
    """Truncated sum over k <= K (no tail information)."""
    if K < 0:
        raise ValueError("K must be >= 0")
    u = _check_u(u)
    return float(spectral_coefficients(sp, K) @ gegenbauer(K, sp.rho, u))


def _check_u(u):
    u = float(u)
    if u >= 1:
        raise ValueError("green kernel is singular on the diagonal (cos theta = 1)")
    if u < -1 - 1e-12:
        raise ValueError("cos theta must lie in [-1, 1)")
    return max(u, -1.0)


def _resummed(sp, u):
    rho = sp.rho
    alphas = (sp.rho - sp.lam, sp.rho + sp.lam)

    def bracket(t):
        r = math.exp(-t)
        # (1 - r)^2 + 2 (1 - u) r avoids cancellation for u near 1
        return (-math.expm1(-t)) ** 2 + 2 * (1 - u) * r

    def weight(t):
        return sum((np.exp(-a * t)).real for a in alphas)

    # bracket -> 1 as t -> inf; integrate weight * (bracket^-rho - 1) and add
    # the exact integral of weight, so the remainder decays one order faster
    def integrand(t):
        return weight(t) * (bracket(t) ** (-rho) - 1.0)

    width = math.sqrt(2 * (1 - u))
    points = sorted({min(width, 1.0), 1.0, 4.0})
    total, err = 0.0, 0.0
    edges = [0.0, *points, 40.0, np.inf]
    with warnings.catch_warnings():
        # a roundoff notice only means TOL_QUAD was not met; err still bounds the result
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for lo, hi in zip(edges[:-1], edges[1:]):
            val, e = integrate.quad(integrand, lo, hi, epsabs=0, epsrel=TOL_QUAD, limit=200)
            total += val
            err += e
    exact = sum((1 / a).real for a in alphas)
    norm = (sp.n - 1) * vol_sphere(sp.n)
    return (total + exact) / norm, err / norm


def green_kernel(sp, u, K=None):
    """Kernel of (-Box + rho^2 - lam^2)^{-1} on S^n at cos theta = u.

    With ``K`` None the series is summed exactly (quadrature of the
    generating-function integral) and ``tail`` is the quadrature error
    estimate.  With an integer ``K`` the series is truncated at k = K and
    ``tail`` is the measured truncation error against the resummed value.
    """
    _check_spectral(sp)
    u = _check_u(u)
    exact, err = _resummed(sp, u)
    if K is None:
        return GreenValue(exact, max(err, 1e-16 * abs(exact)), None)
    if K > K_MAX:
        raise ValueError(f"K exceeds the hard cap {K_MAX}")
    partial = green_kernel_spectral(sp, u, K)
    return GreenValue(partial, abs(partial - exact) + err, int(K))


def choose_K(sp, u, target=TAIL_TARGET, k_max=K_MAX):
    """Smallest K on a doubling ladder whose truncation error is below ``target``.

    Returns None when even ``k_max`` terms do not suffice.
    """
    K = 8
    while K <= k_max:
        if green_kernel(sp, u, K).tail <= target:
            return K
        K *= 2
    return None


def phi_sigma(sp, x, y, K=None):
    """Phi_lambda(x, sigma y) for x, y in S^n_+ as a :class:`GreenValue`."""
    x = _check_sphere(x)
    y = _check_sphere(y)
    if x[0] <= 0 or y[0] <= 0:
        raise ValueError("points must lie in S^n_+ (x_0 > 0)")
    u = float(np.dot(x, reflect_sigma(y)))
    return green_kernel(sp, min(u, 1.0), K)


def phi_sigma_matrix(sp, points, K=None):
    points = [_check_sphere(p) for p in points]
    m = len(points)
    out = np.empty((m, m))
    tail = 0.0
    for j in range(m):
        for k in range(j, m):
            g = phi_sigma(sp, points[j], points[k], K)
            out[j, k] = out[k, j] = g.value
            tail = max(tail, g.tail)
    return out, tail


def rp_gram_check(sp, points, K=None, tol=TOL_PSD):
    """Eigenvalue floor of the matrix Phi_lambda(x_j, sigma x_k) on S^n_+."""
    pts = np.array([_check_sphere(p) for p in points])
    if len(pts) < 1:
        raise ValueError("need at least one point")
    for j in range(len(pts)):
        for k in range(j):
            if np.max(np.abs(pts[j] - pts[k])) < 1e-12:
                warnings.warn("duplicate points give a singular Gram matrix", stacklevel=2)
    m, tail = phi_sigma_matrix(sp, pts, K)
    eig = np.linalg.eigvalsh(m)
    return GramReport(len(pts), float(eig[0]), float(np.trace(m)), 0.0, tol, tail)


def proportionality_check(sp, pairs, K=None, min_kernel=1e-12):
    """Ratio Phi_lambda(x, sigma y) / Psi_lambda(x, y) over pairs in S^n_+.

    Pairs where |Psi_lambda| < ``min_kernel`` are skipped and listed.
    """
    if len(pairs) < 2:
        raise ValueError("need at least two pairs")
    ratios, skipped, tail = [], [], 0.0
    for idx, (x, y) in enumerate(pairs):
        g = phi_sigma(sp, x, y, K)
        tail = max(tail, g.tail)
        u = float(np.dot(np.asarray(x, float), reflect_sigma(y)))
        psi = complex(hyp2f1_family(sp, (1 + u) / 2))
        if abs(psi) < min_kernel:
            skipped.append(idx)
            continue
        ratios.append(g.value / psi.real)
    ratios = np.array(ratios)
    if len(ratios) == 0:
        raise ValueError("every pair was skipped")
    mean = float(np.mean(ratios))
    dev = float(np.max(np.abs(ratios - mean)) / abs(mean))
    return ProportionalityReport(mean, dev, ratios, skipped, tail)


def expected_ratio(sp):
    """Gamma(rho+lam) Gamma(rho-lam) / ((4 pi)^{n/2} Gamma(n/2)), the constant
    implied by the short-distance singularity of both kernels.  Reported only."""
    from .special import gamma_fn

    a, b, c = sp.abc
    return (gamma_fn(a) * gamma_fn(b) / ((4 * math.pi) ** (sp.n / 2) * math.gamma(c))).real


def random_sphere_plus(n, rng, size, min_height=0.05):
    """Real points of S^n_+ with x_0 >= min_height."""
    z = geo.random_sphere_plus(n, rng, size, min_height)
    out = z.real.copy()
    out[:, 0] = z[:, 0].imag
    return out
