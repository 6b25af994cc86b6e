"""The crown kernels Psi_lambda, tilde Psi_lambda and the spherical function."""

from dataclasses import dataclass

import numpy as np

from . import geometry as geo
from .hyp2f1 import hyp2f1_family
from .quadrature import gauss_legendre

TOL_PSD = 1e-10


class InvariantBreach(RuntimeError):
    """A guaranteed property (argument off the cut, positive a-value) failed."""


@dataclass(frozen=True)
class CrownPoint:
    """A point of dS^n_C together with the domain it is taken from."""

    point: np.ndarray
    side: str  # "Xi", "XiBar" or "boundary"

    def __post_init__(self):
        z = np.asarray(self.point, dtype=complex)
        object.__setattr__(self, "point", z)
        if self.side not in ("Xi", "XiBar", "boundary"):
            raise ValueError(f"unknown side {self.side!r}")
        if not geo.on_complex_de_sitter(z):
            raise ValueError("point is not on dS^n_C")
        if self.side == "boundary" and np.any(np.abs(z.imag) > geo.TOL_MANIFOLD):
            raise ValueError("boundary points must be real")
        # sphere-realised points: imaginary time coordinate, real space part
        if np.all(np.abs(z[1:].imag) <= geo.TOL_MANIFOLD) and abs(z[0].real) <= geo.TOL_MANIFOLD:
            t = z[0].imag
            if (self.side == "Xi" and t < 0) or (self.side == "XiBar" and t > 0):
                raise ValueError("sphere point lies in the other crown")

    @property
    def n(self):
        return self.point.shape[0] - 1

    def conj(self):
        flip = {"Xi": "XiBar", "XiBar": "Xi", "boundary": "boundary"}
        return CrownPoint(np.conj(self.point), flip[self.side])


@dataclass
class GramReport:
    size: int
    min_eigenvalue: float
    trace: float
    hermitian_defect: float
    tol: float = TOL_PSD
    tail: float | None = None  # truncation bound when entries are approximate

    @property
    def verdict(self):
        return self.min_eigenvalue >= -self.tol * self.trace

    def as_dict(self):
        return {
            "size": self.size,
            "min_eigenvalue": self.min_eigenvalue,
            "trace": self.trace,
            "hermitian_defect": self.hermitian_defect,
            "tolerance": self.tol,
            "verdict": self.verdict,
            "tail": self.tail,
        }


def _points(obj):
    if isinstance(obj, CrownPoint):
        return obj.point
    return np.asarray(obj, dtype=complex)


def kernel_argument(z, w):
    """(1 + [z, conj(w)]) / 2, broadcasting over leading axes."""
    return (1 + geo.bilinear_form(_points(z), np.conj(_points(w)))) / 2


def _check_sides(z, w, allowed):
    for p in (z, w):
        if isinstance(p, CrownPoint) and p.side not in allowed:
            raise ValueError(f"point from {p.side} is not valid for this kernel")


def psi_lambda(sp, z, w):
    """Psi_lambda(z, w) = 2F1(rho+lam, rho-lam; n/2; (1 + [z, conj w]) / 2) on Xi x Xi.

    One argument may be a real point of dS^n (continuous extension); the
    argument must then stay off [1, inf), i.e. [z, y] in (-1, 1) for real values.
    """
    _check_sides(z, w, ("Xi", "boundary"))
    return _evaluate(sp, kernel_argument(z, w))


def psi_tilde_lambda(sp, z, w):
    """The same hypergeometric formula on XiBar x XiBar."""
    _check_sides(z, w, ("XiBar", "boundary"))
    return _evaluate(sp, kernel_argument(z, w))


def _evaluate(sp, arg):
    arg = np.asarray(arg, dtype=complex)
    on_cut = (np.abs(arg.imag) <= 1e-14 * np.maximum(1, np.abs(arg))) & (arg.real >= 1)
    if np.any(on_cut):
        raise InvariantBreach("kernel argument on [1, inf) for crown-interior points")
    out = hyp2f1_family(sp, arg.ravel()).reshape(arg.shape)
    return complex(out) if out.ndim == 0 else out


def symmetry_defects(sp, z, w):
    """Defects of the conjugation identities for z, w in Xi.

    conj_formula: conj Psi(z, w) against the formula at (conj z, conj w)
    conj_tilde:   Psi(z, w) against conj tilde Psi(conj z, conj w)
    swap_tilde:   Psi(z, w) against tilde Psi(conj w, conj z)
    hermitian:    Psi(z, w) against conj Psi(w, z)
    """
    z, w = _points(z), _points(w)
    zb, wb = np.conj(z), np.conj(w)
    psi = psi_lambda(sp, z, w)
    return {
        "conj_formula": abs(np.conj(psi) - _evaluate(sp, kernel_argument(zb, wb))),
        "conj_tilde": abs(psi - np.conj(psi_tilde_lambda(sp, zb, wb))),
        "swap_tilde": abs(psi - psi_tilde_lambda(sp, wb, zb)),
        "hermitian": abs(psi - np.conj(psi_lambda(sp, w, z))),
    }


def gram_matrix(sp, points, which="psi"):
    pts = np.array([_points(p) for p in points]) if not isinstance(points, np.ndarray) else points
    args = (1 + geo.bilinear_form(pts[:, None, :], np.conj(pts)[None, :, :])) / 2
    return _evaluate(sp, args)


def gram_check(sp, points, which="psi", tol=TOL_PSD):
    """Eigenvalue floor of the Hermitian matrix kernel(z_j, z_k)."""
    if len(points) < 2:
        raise ValueError("need at least two points")
    sides = {p.side for p in points if isinstance(p, CrownPoint)}
    if len(sides) > 1:
        raise ValueError(f"mixed crown sides: {sorted(sides)}")
    expected = "Xi" if which == "psi" else "XiBar"
    if sides and sides != {expected}:
        raise ValueError(f"{which} needs points from {expected}")
    pts = np.array([_points(p) for p in points])
    m = gram_matrix(sp, pts)
    defect = float(np.max(np.abs(m - m.conj().T)))
    eig = np.linalg.eigvalsh((m + m.conj().T) / 2)
    return GramReport(len(points), float(eig[0]), float(np.trace(m).real), defect, tol)


# ---------------------------------------------------------------- spherical function


def phi_lambda_closed(sp, x):
    """phi_lambda(x) = Psi_lambda(x, i e_0) for x in H^n."""
    x = _points(x)
    ie0 = geo.basis(sp.n, 0, complex) * 1j
    return psi_lambda(sp, x, ie0)


def iwasawa_a_value(g):
    """exp(t) for g = k a_t n, read off as the time component of g (e_0 + e_n)."""
    g = np.asarray(g, dtype=float)
    n = g.shape[0] - 1
    value = g[0, 0] + g[0, n]
    if value <= 0:
        raise InvariantBreach("nonpositive Iwasawa a-value")
    return float(value)


def sphere_rule(n, order):
    """Normalised quadrature on S^{n-1}: nodes (m, n) and weights summing to 1."""
    if n == 2:
        # periodic integrand: the trapezoid rule converges geometrically
        x = 2 * np.pi * np.arange(order) / order
        nodes = np.stack([np.sin(x), np.cos(x)], axis=1)
        return nodes, np.full(order, 1.0 / order)
    if n == 3:
        u, wu = gauss_legendre(order, -1.0, 1.0)
        phi = 2 * np.pi * np.arange(2 * order) / (2 * order)
        wphi = np.full(phi.shape, 2 * np.pi / (2 * order))
        uu, pp = np.meshgrid(u, phi, indexing="ij")
        r = np.sqrt(1 - uu**2)
        nodes = np.stack([r * np.cos(pp), r * np.sin(pp), uu], axis=-1).reshape(-1, 3)
        w = np.outer(wu, wphi).ravel()
        return nodes, w / w.sum()
    raise NotImplementedError("sphere quadrature implemented for n = 2, 3")


def spherical_function_integral(sp, g, order=64):
    """Integral over v in S^{n-1} of ((g^{-1}(1, v))_0)^(-lam - rho), normalised measure."""
    ginv = geo.group_inverse(np.asarray(g, dtype=float))
    nodes, w = sphere_rule(sp.n, order)
    lift = np.concatenate([np.ones((nodes.shape[0], 1)), nodes], axis=1)
    a = lift @ ginv[0]
    if np.any(a <= 0):
        raise InvariantBreach("nonpositive a-value inside the sphere integral")
    return complex(np.sum(w * a ** (-(sp.lam + sp.rho))))


# ---------------------------------------------------------------- boundary extension


@dataclass
class ContinuityReport:
    eps: np.ndarray
    values: np.ndarray
    limit: complex
    increments: np.ndarray

    @property
    def final_error(self):
        return float(abs(self.values[-1] - self.limit))

    @property
    def rate(self):
        """Observed order of |value(eps) - limit| in eps."""
        err = np.abs(self.values - self.limit)
        good = err > 0
        if good.sum() < 2:
            return float("inf")
        slope = np.polyfit(np.log(self.eps[good]), np.log(err[good]), 1)[0]
        return float(slope)


def continuity_extension_check(sp, y, eps=None):
    """Follow z_eps = g exp(i eps h) e_n -> y = g e_n and evaluate Psi_lambda(z_eps, e_n).

    Requires y_n < 1, where the limit argument (1 + y_n)/2 is off the cut.
    """
    y = np.asarray(y, dtype=float)
    n = y.shape[0] - 1
    if y[n] >= 1 - 1e-12:
        raise ValueError("y_n >= 1: y lies on the singular set of Psi(., e_n)")
    s, omega = geo.de_sitter_chart_inverse(y)
    g = _rotation_to(n, omega) @ geo.boost_a(n, float(s))
    eps = np.asarray(eps if eps is not None else 0.1 * 2.0 ** -np.arange(12), dtype=float)
    en = geo.basis(n, n, complex)
    vals = np.array(
        [psi_lambda(sp, g @ geo.crown_approach_point(n, e), en) for e in eps], dtype=complex
    )
    limit = complex(hyp2f1_family(sp, (1 + y[n]) / 2))
    return ContinuityReport(eps, vals, limit, np.abs(np.diff(vals)))


def _rotation_to(n, omega):
    """A rotation of coordinates 1..n mapping the e_n direction to omega."""
    omega = np.asarray(omega, dtype=float)
    en = np.zeros(n)
    en[-1] = 1
    g = np.eye(n + 1)
    v = omega - en
    if np.linalg.norm(v) < 1e-15:
        return g
    if np.linalg.norm(omega + en) < 1e-15:
        # half-turn in the (1, n) plane
        g[1, 1] = g[n, n] = -1
        return g
    # two reflections: the first sends e_n to omega, the second fixes omega
    r1 = np.eye(n) - 2 * np.outer(v, v) / (v @ v)
    u = np.zeros(n)
    u[0] = 1.0
    u = u - (u @ omega) * omega
    if np.linalg.norm(u) < 1e-12:
        u = np.zeros(n)
        u[1 % n] = 1.0
        u = u - (u @ omega) * omega
    u /= np.linalg.norm(u)
    r2 = np.eye(n) - 2 * np.outer(u, u)
    g[1:, 1:] = r2 @ r1
    return g
