"""Gauss hypergeometric function 2F1 on C minus [1, inf) and on both edges of the cut.

Off the cut, evaluation is dispatched by region:

* ``|z| <= 0.7``: the defining power series;
* ``|1 - z| < 0.5``: the ``1 - z`` connection formula (logarithmic variant
  when ``c - a - b`` is an integer);
* ``|z| >= 1.4``: the ``1/z`` connection formula;
* ``Re z < 0.5`` with ``|z/(z-1)| <= 0.75``: the Pfaff transformation;
* everything else (the annulus near ``exp(+-i pi/3)``, and degenerate
  parameters for which a connection formula loses its meaning) by Taylor
  re-expansion of the hypergeometric ODE along a path that avoids the cut.

The boundary values ``F(x +- i0)`` for ``x > 1`` reuse the same connection
code with the branch of ``(1-z)^mu``, ``log(1-z)`` and ``(-z)^mu`` fixed
explicitly by the side of approach.
"""

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .special import digamma_sequence, gamma_fn, rgamma

TOL_SERIES = 1e-15
MAX_TERMS = 10000
SERIES_RADIUS = 0.7
ONE_MINUS_RADIUS = 0.5
INVERSE_RADIUS = 1.4
PFAFF_RADIUS = 0.75
TOL_CUT = 1e-14
TOL_MATCH = 1e-10
# the 1 - z series converges like |1 - x|^k, so hand over to 1/z well before 2
BOUNDARY_SWITCH = 1.5
# below this distance from an integer, connection coefficients cancel badly
_NEAR_INTEGER = 1e-4


class CutError(ValueError):
    """The argument lies on the branch cut [1, inf) and no side was given."""


class ConvergenceError(RuntimeError):
    """A series did not reach its tolerance within MAX_TERMS terms."""

    def __init__(self, msg, terms=None, tail=None):
        super().__init__(msg)
        self.terms = terms
        self.tail = tail


class BoundarySide(Enum):
    PLUS_I0 = "plus_i0"
    MINUS_I0 = "minus_i0"

    @property
    def sign(self):
        return 1 if self is BoundarySide.PLUS_I0 else -1

    @property
    def opposite(self):
        return BoundarySide.MINUS_I0 if self is BoundarySide.PLUS_I0 else BoundarySide.PLUS_I0

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        if value in (+1, "+", "plus", "plus_i0"):
            return cls.PLUS_I0
        if value in (-1, "-", "minus", "minus_i0"):
            return cls.MINUS_I0
        raise ValueError(f"unknown boundary side {value!r}")


@dataclass(frozen=True)
class SpectralParam:
    """Dimension ``n`` and spectral parameter ``lam`` with ``rho = (n-1)/2``.

    Admissible values are ``lam`` in ``i[0, inf)`` or real in ``(0, rho)``.
    """

    n: int
    lam: complex

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n}")
        lam = complex(self.lam)
        object.__setattr__(self, "lam", lam)
        rho = (self.n - 1) / 2
        imaginary = lam.real == 0 and lam.imag >= 0
        real = lam.imag == 0 and 0 < lam.real < rho
        if not (imaginary or real):
            raise ValueError(
                f"lambda = {lam} is not admissible: need lambda in i[0,inf) or (0, rho) "
                f"with rho = {rho}"
            )

    @property
    def rho(self):
        return (self.n - 1) / 2

    @property
    def abc(self):
        """Hypergeometric parameters (rho + lam, rho - lam, n/2)."""
        return self.rho + self.lam, self.rho - self.lam, self.n / 2

    @property
    def mass2(self):
        """Klein-Gordon eigenvalue rho^2 - lam^2 (always real and positive)."""
        return (self.rho**2 - self.lam**2).real

    def __str__(self):
        lam = self.lam
        text = f"{lam.real:g}" if lam.imag == 0 else f"{lam.imag:g}i"
        return f"n={self.n}, lambda={text}"


def _nonpositive_int(x, tol=1e-14):
    x = complex(x)
    if abs(x.imag) > tol or x.real > 0.5:
        return None
    k = round(-x.real)
    return int(k) if abs(x.real + k) <= tol * max(1, k) else None


def _int_distance(x):
    x = complex(x)
    return math.hypot(x.real - round(x.real), x.imag)


def _check_c(c):
    if _nonpositive_int(c) is not None:
        raise ValueError(f"c = {c} is a nonpositive integer")


# ---------------------------------------------------------------- series


def _series(a, b, c, z, tol=TOL_SERIES, max_terms=MAX_TERMS):
    """Vectorised partial sums of sum_k (a)_k (b)_k / ((c)_k k!) z^k."""
    z = np.asarray(z, dtype=complex)
    total = np.ones_like(z)
    if z.size == 0:
        return total
    term = np.ones_like(z)
    zmax = float(np.max(np.abs(z)))
    for k in range(max_terms):
        ratio = (a + k) * (b + k) / ((c + k) * (k + 1))
        term = term * ratio * z
        total = total + term
        nxt = abs((a + k + 1) * (b + k + 1) / ((c + k + 1) * (k + 2))) * zmax
        if nxt < 1:
            tail = np.abs(term) * nxt / (1 - nxt)
            if np.all(tail <= tol * np.abs(total)) or np.all(tail < 1e-300):
                return total
        if ratio == 0:
            return total
    raise ConvergenceError(
        f"2F1 series did not converge in {max_terms} terms (|z| up to {zmax:.4g})",
        terms=max_terms,
        tail=float(np.max(np.abs(term))),
    )


def _series_derivative(a, b, c, z):
    return (a * b / c) * _series(a + 1, b + 1, c + 1, z)


def hyp2f1_series(a, b, c, z, radius=SERIES_RADIUS):
    """Direct power-series evaluation, restricted to ``|z| <= radius``."""
    _check_c(c)
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) > radius):
        raise ValueError(f"|z| exceeds the series radius {radius}")
    out = _series(a, b, c, z)
    return out if out.ndim else complex(out)


# ---------------------------------------------------------------- connections


def _power_connection(a, b, c, w, w_pow):
    """1 - z connection for non-integer c - a - b.

    ``w = 1 - z`` and ``w_pow = (1 - z)^(c - a - b)`` on the branch wanted.
    """
    s = c - a - b
    g1 = gamma_fn(c) * gamma_fn(s) * rgamma(c - a) * rgamma(c - b)
    g2 = gamma_fn(c) * gamma_fn(-s) * rgamma(a) * rgamma(b)
    out = np.zeros_like(w)
    if g1 != 0:
        out = out + g1 * _series(a, b, 1 - s, w)
    if g2 != 0:
        out = out + g2 * w_pow * _series(c - a, c - b, 1 + s, w)
    return out


def _log_connection(a, b, c, m, w, log_w, tol=TOL_SERIES, max_terms=MAX_TERMS):
    """1 - z connection when c = a + b - m, m a nonnegative integer.

    ``log_w`` is log(1 - z) on the wanted branch; powers of ``w`` are integral.
    """
    gc = gamma_fn(c)
    out = np.zeros_like(w)
    head = gamma_fn(m) * gc * rgamma(a) * rgamma(b) if m > 0 else 0
    if head != 0:
        acc = np.zeros_like(w)
        coef = 1.0 + 0j
        for k in range(m):
            if k:
                coef *= (a - m + k - 1) * (b - m + k - 1) / (k * (1 - m + k - 1))
            acc = acc + coef * w ** (k - m)
        out = out + head * acc
    lead = -((-1) ** m) * gc * rgamma(a - m) * rgamma(b - m)
    if lead == 0:
        return out
    count = 64
    psi_a = digamma_sequence(a, count)
    psi_b = digamma_sequence(b, count)
    psi_1 = digamma_sequence(1, count)
    psi_m = digamma_sequence(m + 1, count)
    coef = 1.0 / math.factorial(m) + 0j
    term_w = np.ones_like(w)
    total = np.zeros_like(w)
    wmax = float(np.max(np.abs(w))) if w.size else 0.0
    for k in range(max_terms):
        if k >= count:
            grow = 2 * count
            psi_a = np.concatenate([psi_a, digamma_sequence(a + count, grow - count)])
            psi_b = np.concatenate([psi_b, digamma_sequence(b + count, grow - count)])
            psi_1 = np.concatenate([psi_1, digamma_sequence(1 + count, grow - count)])
            psi_m = np.concatenate([psi_m, digamma_sequence(m + 1 + count, grow - count)])
            count = grow
        bracket = log_w - psi_1[k] - psi_m[k] + psi_a[k] + psi_b[k]
        term = coef * term_w * bracket
        total = total + term
        ratio = abs((a + k) * (b + k) / ((k + 1) * (k + 1 + m))) * wmax
        if ratio < 1 and k > 2:
            tail = np.abs(term) * ratio / (1 - ratio) * 2
            if np.all(tail <= tol * np.abs(total)) or np.all(tail < 1e-300):
                return out + lead * total
        coef *= (a + k) * (b + k) / ((k + 1) * (k + 1 + m))
        term_w = term_w * w
    raise ConvergenceError("logarithmic connection series did not converge", terms=max_terms)


def _one_minus(a, b, c, w, side=None):
    """F(a,b;c;1-w) through the 1 - z connection.

    With ``side`` None the principal branch of (1-z) is used; otherwise ``w``
    is real negative (z = x > 1) and the branch follows z = x + side*i0.
    """
    s = c - a - b
    k = round(s.real) if abs(s.imag) < 1e-14 else None
    if k is not None and abs(s.real - k) < 1e-12:
        m = int(k)
        if m > 0:
            # Euler: F(a,b;c;z) = (1-z)^m F(c-a, c-b; c; z), integer power
            return w**m * _one_minus(c - a, c - b, c, w, side)
        if side is None:
            log_w = np.log(w)
        else:
            log_w = np.log(np.abs(w)) - 1j * np.pi * side.sign
        return _log_connection(a, b, c, -m, w, log_w)
    if side is None:
        w_pow = w**s
    else:
        w_pow = np.abs(w) ** s * cmath.exp(-1j * math.pi * side.sign * s)
    return _power_connection(a, b, c, w, w_pow)


def _inverse(a, b, c, z, side=None):
    """1/z connection for non-integer a - b."""
    g1 = gamma_fn(c) * gamma_fn(b - a) * rgamma(b) * rgamma(c - a)
    g2 = gamma_fn(c) * gamma_fn(a - b) * rgamma(a) * rgamma(c - b)
    inv = 1.0 / z
    if side is None:
        mz = -z
        pa, pb = mz ** (-a), mz ** (-b)
    else:
        x = np.abs(z)
        pa = x ** (-a) * cmath.exp(1j * math.pi * side.sign * a)
        pb = x ** (-b) * cmath.exp(1j * math.pi * side.sign * b)
    out = np.zeros_like(z)
    if g1 != 0:
        out = out + g1 * pa * _series(a, a - c + 1, a - b + 1, inv)
    if g2 != 0:
        out = out + g2 * pb * _series(b, b - c + 1, b - a + 1, inv)
    return out


def _pfaff(a, b, c, z):
    return (1 - z) ** (-a) * _series(a, c - b, c, z / (z - 1))


# ---------------------------------------------------------------- ODE route


def _taylor_step(a, b, c, z0, f, df, h, tol=1e-17, max_terms=400):
    """Advance (F, F') from z0 to z0 + h by re-expanding the ODE at z0."""
    p0 = z0 * (1 - z0)
    p1 = 1 - 2 * z0
    q0 = c - (a + b + 1) * z0
    q1 = -(a + b + 1)
    ab = a * b
    u_prev, u_cur = f, df  # u_0, u_1
    val = u_prev + u_cur * h
    dval = u_cur
    hk = h  # h^k for the current u_k, k = 1
    scale = abs(f) + abs(df * h)
    small = 0
    for k in range(0, max_terms):
        # coefficient u_{k+2}
        u_next = -(
            (p1 * k * (k + 1) + q0 * (k + 1)) * u_cur
            + (-k * (k - 1) + q1 * k - ab) * u_prev
        ) / (p0 * (k + 2) * (k + 1))
        dval += (k + 2) * u_next * hk
        hk *= h
        contrib = u_next * hk
        val += contrib
        scale = max(scale, abs(contrib))
        if abs(contrib) <= tol * scale:
            small += 1
            if small >= 3:
                return val, dval
        else:
            small = 0
        u_prev, u_cur = u_cur, u_next
    raise ConvergenceError("Taylor re-expansion did not converge")


def _taylor_continue(a, b, c, z, side=None):
    """Continue F along a path from the series disc to ``z``.

    For points on the cut pass ``side``; the path then stays in the open
    half-plane of that side and only touches the axis at the end.
    """
    z = complex(z)
    if side is not None:
        upper = side is BoundarySide.PLUS_I0
    else:
        upper = z.imag >= 0
    start = 0.5j if upper else -0.5j
    f = complex(_series(a, b, c, np.array([start]))[0])
    df = complex(_series_derivative(a, b, c, np.array([start]))[0])
    here = start
    for _ in range(10000):
        gap = z - here
        if abs(gap) < 1e-15:
            return f
        radius = min(abs(here), abs(here - 1))
        step = min(abs(gap), 0.5 * radius)
        h = gap / abs(gap) * step
        f, df = _taylor_step(a, b, c, here, f, df, h)
        here = z if step == abs(gap) else here + h
        if here == z:
            return f
    raise ConvergenceError("Taylor path did not reach the target")


# ---------------------------------------------------------------- dispatch


def _on_cut(z):
    return (np.abs(z.imag) <= TOL_CUT * np.maximum(1, np.abs(z))) & (z.real >= 1 - TOL_CUT)


def hyp2f1_continued(a, b, c, z):
    """2F1(a, b; c; z) on C minus [1, inf), vectorised over ``z``.

    Raises CutError for arguments on (or within TOL_CUT of) the cut; use
    :func:`hyp2f1_boundary` there.
    """
    _check_c(c)
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    if np.any(_on_cut(z)):
        raise CutError("argument on the branch cut [1, inf); a boundary side is required")
    out = np.empty_like(z)
    if _nonpositive_int(a) is not None or _nonpositive_int(b) is not None:
        out[:] = _series(a, b, c, z)
        return complex(out[0]) if scalar else out
    r = np.abs(z)
    todo = np.ones(z.shape, dtype=bool)

    m = todo & (r <= SERIES_RADIUS)
    if m.any():
        out[m] = _series(a, b, c, z[m])
        todo &= ~m

    s = c - a - b
    s_ok = _int_distance(s) < 1e-12 or _int_distance(s) > _NEAR_INTEGER
    m = todo & (np.abs(1 - z) < ONE_MINUS_RADIUS)
    if m.any() and s_ok:
        out[m] = _one_minus(a, b, c, 1 - z[m])
        todo &= ~m

    if _int_distance(a - b) > _NEAR_INTEGER:
        m = todo & (r >= INVERSE_RADIUS)
        if m.any():
            out[m] = _inverse(a, b, c, z[m])
            todo &= ~m

    with np.errstate(divide="ignore", invalid="ignore"):
        w = z / (z - 1)
    m = todo & (z.real < 0.5) & (np.abs(w) <= PFAFF_RADIUS)
    if m.any():
        out[m] = _pfaff(a, b, c, z[m])
        todo &= ~m

    for idx in np.flatnonzero(todo):
        out[idx] = _taylor_continue(a, b, c, z[idx])
    return complex(out[0]) if scalar else out


hyp2f1 = hyp2f1_continued


def hyp2f1_boundary_abc(a, b, c, x, side, switch=BOUNDARY_SWITCH):
    """Boundary value F(x + side*i0) for real x > 1.

    ``switch`` is where the 1 - z connection hands over to the 1/z one; it
    must lie in (1, 2].
    """
    if not 1 < switch <= 2:
        raise ValueError("switch must lie in (1, 2]")
    _check_c(c)
    side = BoundarySide.parse(side)
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    if np.any(x <= 1):
        raise ValueError("boundary values are defined for x > 1 only")
    out = np.empty(x.shape, dtype=complex)
    near = x < switch
    if near.any():
        w = (1 - x[near]).astype(complex)
        out[near] = _one_minus(a, b, c, w, side)
    far = ~near
    if far.any():
        if _int_distance(a - b) > _NEAR_INTEGER:
            out[far] = _inverse(a, b, c, x[far].astype(complex), side)
        else:
            for idx in np.flatnonzero(far):
                out[idx] = _taylor_continue(a, b, c, x[idx], side)
    return complex(out[0]) if scalar else out


def hyp2f1_boundary(sp, x, side, switch=BOUNDARY_SWITCH):
    """Boundary value 2F1(rho+lam, rho-lam; n/2; x +- i0) for x > 1.

    Below ``switch`` (default 1.5, at most 2) this is the two-term connection formula (odd n, with factor
    exp(-+ i pi (2-n)/2) (x-1)^((2-n)/2)) or the finite sum plus logarithmic
    series with bracket ``-ln(x-1) +- i pi`` (even n).  Beyond it the 1/z
    connection with (-z)^mu = x^mu exp(-+ i pi mu) is used.
    """
    a, b, c = sp.abc
    return hyp2f1_boundary_abc(a, b, c, x, side, switch)


def hyp2f1_ode(a, b, c, z, side=None):
    """Reference evaluation by Taylor re-expansion only (no connection formulas)."""
    return _taylor_continue(a, b, c, z, None if side is None else BoundarySide.parse(side))


def near_one_coefficient(sp):
    """Leading singular behaviour of F at z = 1.

    Returns ("log", C) with F ~ C * (-ln(1-z)) for n = 2, and ("power", C)
    with F ~ C * (1-z)^((2-n)/2) for n >= 3.
    """
    a, b, c = sp.abc
    if sp.n == 2:
        return "log", rgamma(a) * rgamma(b)
    return "power", gamma_fn(c) * gamma_fn(c - 1) * rgamma(a) * rgamma(b)


def near_one_profile(sp, z):
    """The profile -ln(1-z) (n = 2) or (1-z)^((2-n)/2) (n >= 3)."""
    z = np.asarray(z, dtype=complex)
    if sp.n == 2:
        return -np.log(1 - z)
    return (1 - z) ** ((2 - sp.n) / 2)


def cut_jump(sp, x):
    """F(x + i0) - F(x - i0)."""
    return hyp2f1_boundary(sp, x, BoundarySide.PLUS_I0) - hyp2f1_boundary(
        sp, x, BoundarySide.MINUS_I0
    )


def hyp2f1_family(sp, z):
    """2F1(rho+lam, rho-lam; n/2; z) off the cut."""
    a, b, c = sp.abc
    return hyp2f1_continued(a, b, c, z)


def hyp2f1_from_w(sp, w, side=None):
    """2F1(rho+lam, rho-lam; n/2; 1 - w) for real w, given w = 1 - z directly.

    w > 0 is off the cut; w < 0 needs ``side`` and returns the boundary value
    at x = 1 - w.  Passing w avoids the cancellation in 1 - z near z = 1.
    """
    a, b, c = sp.abc
    w = np.asarray(w, dtype=float)
    scalar = w.ndim == 0
    w = np.atleast_1d(w)
    if np.any(w == 0):
        raise CutError("z = 1 is a singular point")
    if np.any(w < 0) and side is None:
        raise CutError("z > 1 needs a boundary side")
    out = np.empty(w.shape, dtype=complex)
    near = np.abs(w) < BOUNDARY_SWITCH - 1
    pos = w > 0
    m = near & pos
    if m.any():
        out[m] = _one_minus(a, b, c, w[m].astype(complex))
    m = near & ~pos
    if m.any():
        out[m] = _one_minus(a, b, c, w[m].astype(complex), BoundarySide.parse(side))
    m = ~near & pos
    if m.any():
        out[m] = hyp2f1_continued(a, b, c, (1 - w[m]).astype(complex))
    m = ~near & ~pos
    if m.any():
        out[m] = hyp2f1_boundary(sp, 1 - w[m], side)
    return complex(out[0]) if scalar else out
