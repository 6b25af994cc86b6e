"""Predicted analytic wavefront sets of Psi^lambda, tilde Psi^lambda and a
windowed-Fourier probe of their directional decay.

Covectors at points near e_n are read in the lightcone chart
p = (y_0, ..., y_{n-1}) of :func:`dsk.geometry.lightcone_chart`, which maps
e_n + v (v null, v_n = 0) to p = v and identifies T_{e_n} with its dual.
Fourier transforms use exp(-i x . xi) with the Euclidean dot product; with
this convention F(x + i0) decays slowly for xi > 0 at x = 1.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from .distributions import _which, psi_bv_from_w
from .hyp2f1 import BoundarySide, hyp2f1_from_w
from .quadrature import composite, graded_breaks

P_SLOW = 1.5
P_RAPID = 4.0
NOISE_FLOOR = 1e-13
SIGMAS = tuple(np.geomspace(50.0, 800.0, 9))
FIT_POINTS = 5
TOL_DIRECTION = 1e-9


@dataclass(frozen=True)
class CovectorPoint:
    base: np.ndarray  # point of dS^n
    covector: np.ndarray  # n chart components

    def __post_init__(self):
        base = np.asarray(self.base, dtype=float)
        cov = np.asarray(self.covector, dtype=float)
        if not geo.on_de_sitter(base):
            raise ValueError("base point is not on dS^n")
        if cov.shape != (base.shape[0] - 1,):
            raise ValueError("covector needs n chart components")
        if not np.any(cov != 0):
            raise ValueError("covector must be nonzero")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "covector", cov)

    @property
    def n(self):
        return self.base.shape[0] - 1


def _same_ray(xi, direction, tol=TOL_DIRECTION):
    xi = np.asarray(xi, float)
    d = np.asarray(direction, float)
    cos = float(xi @ d) / (np.linalg.norm(xi) * np.linalg.norm(d))
    return cos >= 1 - tol


def predicted_directions(base, which="psi", tol=geo.TOL_CONE):
    """The wavefront ray at a lightcone point e_n + v, v_0 != 0 (None elsewhere)."""
    which = _which(which)
    y = np.asarray(base, float)
    n = y.shape[0] - 1
    if abs(y[n] - 1) > 1e3 * tol * max(1.0, abs(y[0])):
        return None
    v = y[:n]
    if np.linalg.norm(v) <= tol or abs(v[0]) <= tol:
        return None
    # Psi^lambda: v_0 > 0 -> (-v_0, v'), v_0 < 0 -> (v_0, -v'); tilde Psi is the mirror
    d = np.concatenate([[-v[0]], v[1:]]) if v[0] > 0 else np.concatenate([[v[0]], -v[1:]])
    return d if which == "psi" else -d


def predicted_wf_membership(sp, cp, which="psi", tol=geo.TOL_CONE):
    """Membership of (base, covector) in the predicted WF_A of Psi^lambda or tilde Psi^lambda."""
    which = _which(which)
    if cp.n != sp.n:
        raise ValueError("covector point and spectral parameter disagree on n")
    y, xi = cp.base, cp.covector
    en = geo.basis(cp.n, cp.n)
    if np.linalg.norm(y - en) <= 1e3 * tol:
        return bool(xi[0] < 0) if which == "psi" else bool(xi[0] > 0)
    d = predicted_directions(y, which, tol)
    if d is None:
        return False
    return _same_ray(xi, d)


def random_null_vector(n, rng, scale=(0.2, 1.0)):
    """v in T_{e_n} with [v, v] = 0, v_n = 0 and random time orientation."""
    space = rng.normal(size=n - 1)
    space /= np.linalg.norm(space)
    r = rng.uniform(*scale)
    v = np.zeros(n + 1)
    v[0] = r * rng.choice([-1.0, 1.0])
    v[1:n] = r * space
    return v


def wf_no_overlap_check(sp, samples=1000, which="psi", seed=0):
    """True iff no sampled (x, xi) has both xi and -xi in the predicted set.

    Half of the samples sit at e_n with random covectors, half at random
    lightcone points with the predicted ray and random covectors.
    """
    rng = np.random.default_rng(seed)
    n = sp.n
    en = geo.basis(n, n)
    for k in range(samples):
        if k % 2 == 0:
            base = en
            xi = rng.normal(size=n)
        else:
            base = en + random_null_vector(n, rng)
            d = predicted_directions(base, which)
            xi = d * rng.uniform(0.1, 10) if k % 4 == 1 else rng.normal(size=n)
        plus = predicted_wf_membership(sp, CovectorPoint(base, xi), which)
        minus = predicted_wf_membership(sp, CovectorPoint(base, -xi), which)
        if plus and minus:
            return False
    return True


# ---------------------------------------------------------------- probe


@dataclass
class DecayReport:
    direction: np.ndarray
    sigmas: np.ndarray
    amplitudes: np.ndarray
    exponent: float  # fitted p in |FT| ~ sigma^-p over the top of the ladder
    classification: str  # "slow", "rapid" or "inconclusive"
    thresholds: dict = field(default_factory=lambda: {"p_slow": P_SLOW, "p_rapid": P_RAPID,
                                                      "noise_floor": NOISE_FLOOR})
    predicted: bool | None = None

    @property
    def agrees(self):
        if self.predicted is None:
            return None
        return self.classification == ("slow" if self.predicted else "rapid")

    def as_dict(self):
        return {
            "direction": [float(d) for d in self.direction],
            "sigmas": [float(s) for s in self.sigmas],
            "amplitudes": [float(a) for a in self.amplitudes],
            "exponent": self.exponent,
            "classification": self.classification,
            "thresholds": self.thresholds,
            "predicted": self.predicted,
            "agrees": self.agrees,
        }


def bump_window(r):
    """exp(-1/(1 - r^2)) on r < 1, zero outside."""
    r = np.asarray(r, float)
    out = np.zeros_like(r)
    inside = r < 1
    out[inside] = np.exp(-1.0 / (1.0 - r[inside] ** 2))
    return out


def _axis_rule(radius, order, panel, graded):
    if graded:
        xs, ws = [], []
        for lo, hi, at in ((-radius, 0.0, "right"), (0.0, radius, "left")):
            pieces = max(1, int(math.ceil((hi - lo) / panel)))
            grid = np.linspace(lo, hi, pieces + 1)
            for j, (u, v) in enumerate(zip(grid[:-1], grid[1:])):
                near = (at == "left" and j == 0) or (at == "right" and j == pieces - 1)
                br = graded_breaks(u, v, at, 0.25, 24) if near else np.array([u, v])
                x, w = composite(br, order)
                xs.append(x)
                ws.append(w)
        return np.concatenate(xs), np.concatenate(ws)
    pieces = max(1, int(math.ceil(2 * radius / panel)))
    return composite(np.linspace(-radius, radius, pieces + 1), order)


def classify(sigmas, amplitudes, fit_points=FIT_POINTS, p_slow=P_SLOW, p_rapid=P_RAPID,
             noise_floor=NOISE_FLOOR, reference=None):
    """Fit log|FT| against log sigma over the top ``fit_points`` scales."""
    sigmas = np.asarray(sigmas, float)
    amps = np.asarray(amplitudes, float)
    ref = float(np.max(amps)) if reference is None else reference
    floor = noise_floor * ref
    top_s, top_a = sigmas[-fit_points:], amps[-fit_points:]
    above = top_a > floor
    if above.sum() < 2:
        return float("inf"), "rapid"
    slope = np.polyfit(np.log(top_s[above]), np.log(top_a[above]), 1)[0]
    p = float(-slope)
    if p <= p_slow:
        return p, "slow"
    if p >= p_rapid:
        return p, "rapid"
    return p, "inconclusive"


def windowed_decay_probe(f, x0, directions, sigmas=SIGMAS, radius=0.3, singular_normal=None,
                         order=16, panel=None, fit_points=FIT_POINTS):
    """|int w(x - x0) f(x) exp(-i sigma d . x) dx| along a sigma ladder, per direction.

    ``f`` maps an (N, dim) array of offsets x - x0 (dim 1 or 2) to complex
    values; passing offsets keeps the distance to a singularity at x0 exact.
    ``singular_normal`` is the unit normal of a singular hyperplane through
    x0 (for dim 1 any nonzero number); the rule is graded toward it.  Raises
    ValueError when the panels are too wide for the top frequency.
    """
    x0 = np.atleast_1d(np.asarray(x0, float))
    dim = x0.size
    if dim not in (1, 2):
        raise ValueError("probe implemented for dimension 1 or 2")
    dirs = [np.atleast_1d(np.asarray(d, float)) for d in np.atleast_1d(directions)] if dim == 1 \
        else [np.asarray(d, float) for d in directions]
    dirs = [d / np.linalg.norm(d) for d in dirs]
    sigmas = np.asarray(sigmas, float)
    if np.any(sigmas <= 0) or np.any(np.diff(sigmas) <= 0):
        raise ValueError("sigmas must be positive and increasing")
    panel = panel if panel is not None else min(0.05, order / sigmas[-1])
    if sigmas[-1] * panel > order:
        raise ValueError(
            f"under-resolved: sigma {sigmas[-1]:g} needs panels <= {order / sigmas[-1]:.3g}"
        )
    graded = singular_normal is not None
    if dim == 1:
        a, wa = _axis_rule(radius, order, panel, graded)
        rel = a[:, None]
        weights = wa * bump_window(np.abs(a) / radius)
    else:
        nrm = np.array([1.0, 0.0]) if singular_normal is None else np.asarray(singular_normal, float)
        nrm = nrm / np.linalg.norm(nrm)
        tan = np.array([-nrm[1], nrm[0]])
        a, wa = _axis_rule(radius, order, panel, graded)
        b, wb = _axis_rule(radius, order, panel, False)
        aa, bb = np.meshgrid(a, b, indexing="ij")
        r = np.hypot(aa, bb).ravel() / radius
        keep = r < 1
        rel = np.outer(aa.ravel()[keep], nrm) + np.outer(bb.ravel()[keep], tan)
        weights = (np.outer(wa, wb).ravel() * bump_window(r))[keep]
    vals = np.asarray(f(rel), dtype=complex) * weights
    reference = float(np.sum(np.abs(vals)))
    reports = []
    for d in dirs:
        phase = rel @ d
        amps = np.array([abs(np.sum(vals * np.exp(-1j * s * phase))) for s in sigmas])
        p, label = classify(sigmas, amps, fit_points, reference=reference)
        reports.append(DecayReport(d, sigmas, amps, p, label))
    return reports


def hyp2f1_line_profile(sp, side):
    """Offset a -> 2F1(1 + a), taking the ``side`` boundary value for a > 0 (a = 0 maps to 0)."""
    side = BoundarySide.parse(side)

    def f(offsets):
        w = -np.asarray(offsets, float)[:, 0]
        out = np.zeros(w.shape, dtype=complex)
        ok = w != 0
        out[ok] = hyp2f1_from_w(sp, w[ok], side)
        return out

    return f


def probe_hyp2f1_example(sp, side, sigmas=SIGMAS, radius=0.5):
    """1D probe of 2F1(x +- i0) at x = 1 in the directions +1 and -1.

    The pointwise profile is locally integrable only for n <= 3.
    """
    if sp.n >= 4:
        raise ValueError("2F1(x +- i0) is not locally integrable at x = 1 for n >= 4")
    return windowed_decay_probe(
        hyp2f1_line_profile(sp, side), [1.0], [1.0, -1.0], sigmas, radius, singular_normal=1.0
    )


def probe_directions(count=8):
    angles = 2 * np.pi * np.arange(count) / count
    return np.stack([np.cos(angles), np.sin(angles)], axis=1)


def wf_probe_de_sitter(sp, base_p=(0.5, 0.5), directions=None, which="psi", sigmas=SIGMAS,
                       radius=0.3):
    """Probe the chart restriction of Psi^lambda near a lightcone point (n = 2).

    Returns one :class:`DecayReport` per direction with the predicted
    membership filled in.
    """
    if sp.n != 2:
        raise ValueError("the de Sitter probe is implemented for n = 2")
    which = _which(which)
    p0 = np.asarray(base_p, float)
    if abs(p0[0] ** 2 - p0[1] ** 2) > 1e-12 or abs(p0[0]) < 1e-12:
        raise ValueError("base point must lie on the lightcone of e_n, off e_n")
    base = geo.lightcone_chart(p0)
    if p0[0] != p0[1] and p0[0] != -p0[1]:
        raise ValueError("base point must satisfy p_0 = +-p_1 exactly")
    directions = probe_directions() if directions is None else np.asarray(directions, float)
    normal = np.array([p0[0], -p0[1]])  # gradient of p_0^2 - p_1^2

    def f(rel):
        # q = p_0^2 - p_1^2 = (p_0 - p_1)(p_0 + p_1) with the base offset folded in exactly
        diff = (p0[0] - p0[1]) + (rel[:, 0] - rel[:, 1])
        summ = (p0[0] + p0[1]) + (rel[:, 0] + rel[:, 1])
        q = diff * summ
        w = -0.5 * q / (np.sqrt(1 + q) + 1)  # (1 - y_n)/2
        out = np.zeros(len(rel), dtype=complex)
        ok = w != 0
        out[ok] = psi_bv_from_w(sp, w[ok], p0[0] + rel[ok, 0], which)
        return out

    reports = windowed_decay_probe(f, p0, directions, sigmas, radius, singular_normal=normal)
    for rep in reports:
        rep.predicted = predicted_wf_membership(sp, CovectorPoint(base, rep.direction), which)
    return reports
