"""Verification suites: oracle and property checks grouped by module.

Each suite returns a list of :class:`Check` records.  Reports carry measured
errors and tolerances only (no timings), so identical configurations give
identical reports.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import distributions as dist
from . import geometry as geo
from . import kernels as ker
from . import microlocal as micro
from . import sphere
from .hyp2f1 import (
    BoundarySide,
    SpectralParam,
    hyp2f1_boundary,
    hyp2f1_continued,
    hyp2f1_from_w,
    near_one_coefficient,
)
from .quadrature import richardson

SUITES = ("hyp", "kernels", "rp", "distributions", "microlocal")

DEFAULT_TOLS = {
    "boundary": 1e-8,
    "boundary-switch": 1e-6,
    "reflection": 1e-12,
    "asymptotic": 1e-2,
    "rp-ratio": 1e-5,
    "rp-tail": 1e-8,
    "psd": 1e-10,
    "symmetry": 1e-12,
    "spherical": 1e-6,
    "table-offcut": 1e-6,
    "table-cut": 1e-3,
    "kg-offcut": 1e-4,
    "kg-cut": 1e-2,
    "kg-order": 2.0,
    "h-boost": 1e-3,
    "h-rotation": 1e-10,
    "wf-agree": 7.0,
}

# test bumps in chart coordinates (s, angles...); the cut bumps straddle y_n = 1
OFFCUT_2 = ((0.2, 2.0), (0.3, 0.4))
CUT_2 = ((0.5, 0.48), (0.3, 0.3))
OFFCUT_3 = ((0.2, 2.0, 0.0), (0.3, 0.4, None))
ROTATE_3 = ((0.2, 2.0, 0.5), (0.3, 0.4, 0.4))


@dataclass
class VerifyConfig:
    n: int | None = None  # restrict every grid to this dimension
    lam: complex | None = None  # restrict every grid to this spectral parameter
    seed: int = 0
    quad_order: int = 64
    eps_ladder: tuple = dist.EPS_LADDER
    K: int | None = None  # truncation of the sphere series (None: resummed)
    tols: dict = field(default_factory=lambda: dict(DEFAULT_TOLS))
    threads: int = 1

    def tol(self, name):
        return self.tols.get(name, DEFAULT_TOLS[name])


@dataclass
class Check:
    name: str
    passed: bool
    measured: float
    tolerance: float
    detail: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "measured": _json_float(self.measured),
            "tolerance": _json_float(self.tolerance),
            "detail": {k: _json_value(v) for k, v in self.detail.items()},
        }


def _json_float(x):
    x = float(x)
    return x if math.isfinite(x) else str(x)


def _json_value(v):
    if isinstance(v, (bool, str, type(None), int)):
        return v
    if isinstance(v, (float, np.floating)):
        return _json_float(v)
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_json_value(u) for u in v]
    if isinstance(v, dict):
        return {k: _json_value(u) for k, u in v.items()}
    return str(v)


def threads_from_env(default=1):
    try:
        return max(1, int(os.environ.get("DSK_THREADS", default)))
    except ValueError:
        return default


# ---------------------------------------------------------------- parameter grids


def _lam_label(sp):
    lam = sp.lam
    return f"{lam.imag:g}i" if lam.real == 0 else f"{lam.real:g}"


def _params(config, ns, factors):
    """SpectralParams over ``ns`` and lambda = factor * rho (or i for factor "i")."""
    ns = [n for n in ns if config.n is None or n == config.n]
    out = []
    for n in ns:
        if config.lam is not None:
            try:
                out.append(SpectralParam(n, config.lam))
            except ValueError:
                pass
            continue
        rho = (n - 1) / 2
        for f in factors:
            out.append(SpectralParam(n, 1j if f == "i" else f * rho))
    return out


def _tag(sp):
    return f"n={sp.n},lambda={_lam_label(sp)}"


def _rel(a, b):
    return float(abs(a - b) / max(abs(b), 1e-300))


# ---------------------------------------------------------------- hyp


def boundary_limit_error(sp, x, eps_ladder):
    """max over sides of |Richardson lim F(x +- i eps) - F(x +- i0)| / |F(x +- i0)|."""
    a, b, c = sp.abc
    eps = np.asarray(eps_ladder, float)
    ratio = float(eps[0] / eps[1])
    worst = 0.0
    for side in (BoundarySide.PLUS_I0, BoundarySide.MINUS_I0):
        vals = [hyp2f1_continued(a, b, c, x + side.sign * 1j * e) for e in eps]
        limit = richardson(vals, ratio=ratio).value
        worst = max(worst, _rel(limit, hyp2f1_boundary(sp, x, side)))
    return worst


def suite_hyp(config):
    checks = []
    params = _params(config, (2, 3, 4), (0.3, 0.9, "i"))
    xs = (1.1, 1.5, 1.9, 2.5, 5.0)
    for sp in params:
        for x in xs:
            tol = config.tol("boundary-switch" if x == 2.5 else "boundary")
            checks.append(lambda sp=sp, x=x, tol=tol: _check(
                f"boundary-limit[{_tag(sp)},x={x:g}]",
                boundary_limit_error(sp, x, config.eps_ladder), tol))
        checks.append(lambda sp=sp: _check(
            f"schwarz-reflection[{_tag(sp)}]",
            max(abs(hyp2f1_boundary(sp, x, "-") - np.conj(hyp2f1_boundary(sp, x, "+")))
                / abs(hyp2f1_boundary(sp, x, "+")) for x in xs),
            config.tol("reflection")))
        checks.append(lambda sp=sp: _asymptotic_check(sp, config))
    return checks


def _asymptotic_check(sp, config, w=1e-6):
    kind, coef = near_one_coefficient(sp)
    profile = -math.log(w) if kind == "log" else w ** ((2 - sp.n) / 2)
    ratio = hyp2f1_from_w(sp, w) / profile
    dev = _rel(ratio, coef)
    return _check(f"near-one-asymptotics[{_tag(sp)}]", dev, config.tol("asymptotic"),
                  {"one_minus_z": w, "ratio": [ratio.real, ratio.imag],
                   "coefficient": [complex(coef).real, complex(coef).imag]})


def _check(name, measured, tol, detail=None):
    measured = float(measured)
    return Check(name, bool(measured <= tol), measured, tol, detail or {})


# ---------------------------------------------------------------- kernels


def suite_kernels(config):
    checks = []
    for sp in _params(config, (2, 3), (0.3, "i")):
        for domain in ("hyperbolic", "crown"):
            for which in ("psi", "psi_tilde"):
                checks.append(lambda sp=sp, d=domain, w=which: _gram(sp, d, w, config))
        checks.append(lambda sp=sp: _symmetry(sp, config))
        for s in (0.25, 0.5, 1.0, 2.0):
            checks.append(lambda sp=sp, s=s: _spherical(sp, s, config))
    return checks


def _rng(config, *key):
    return np.random.default_rng([config.seed, *key])


def _gram(sp, domain, which, config, size=30):
    rng = _rng(config, sp.n, 1 if domain == "hyperbolic" else 2)
    pts = geo.random_hyperbolic(sp.n, rng, size) if domain == "hyperbolic" \
        else geo.random_crown(sp.n, rng, size)
    if which == "psi_tilde":
        pts = np.conj(pts)
    rep = ker.gram_check(sp, pts, which, tol=config.tol("psd"))
    floor = -rep.min_eigenvalue / rep.trace
    return Check(f"gram[{_tag(sp)},{domain},{which}]", rep.verdict, floor, config.tol("psd"),
                 {"min_eigenvalue": rep.min_eigenvalue, "trace": rep.trace,
                  "hermitian_defect": rep.hermitian_defect})


def _symmetry(sp, config, pairs=50):
    rng = _rng(config, sp.n, 3)
    zs = geo.random_crown(sp.n, rng, pairs)
    ws = geo.random_crown(sp.n, rng, pairs)
    worst = {}
    for z, w in zip(zs, ws):
        scale = max(1.0, abs(ker.psi_lambda(sp, z, w)))
        for k, v in ker.symmetry_defects(sp, z, w).items():
            worst[k] = max(worst.get(k, 0.0), v / scale)
    return _check(f"symmetry[{_tag(sp)}]", max(worst.values()), config.tol("symmetry"), worst)


def _spherical(sp, s, config):
    g = geo.boost_a(sp.n, s)
    integral = ker.spherical_function_integral(sp, g, config.quad_order)
    closed = ker.phi_lambda_closed(sp, g @ (1j * geo.basis(sp.n, 0, complex)))
    return _check(f"spherical-function[{_tag(sp)},s={s:g}]", _rel(integral, closed),
                  config.tol("spherical"), {"quad_order": config.quad_order})


# ---------------------------------------------------------------- rp


def suite_rp(config):
    checks = []
    for sp in _params(config, (2, 3), (0.3, "i")):
        checks.append(lambda sp=sp: _proportionality(sp, config))
        checks.append(lambda sp=sp: _rp_gram(sp, config))
    return checks


def _tail_note(tail, limit):
    if tail <= limit:
        return {}
    return {"diagnostic": f"spectral tail bound {tail:.3e} exceeds {limit:.1e}; increase K"}


def _proportionality(sp, config, pairs=20):
    rng = _rng(config, sp.n, 4)
    xs = sphere.random_sphere_plus(sp.n, rng, pairs)
    ys = sphere.random_sphere_plus(sp.n, rng, pairs)
    rep = sphere.proportionality_check(sp, list(zip(xs, ys)), K=config.K)
    tail_ok = rep.max_tail <= config.tol("rp-tail")
    detail = {"ratio": rep.ratio, "expected_ratio": sphere.expected_ratio(sp),
              "max_tail": rep.max_tail, "tail_tolerance": config.tol("rp-tail"),
              "skipped": rep.skipped, "K": config.K}
    detail.update(_tail_note(rep.max_tail, config.tol("rp-tail")))
    ok = rep.max_deviation <= config.tol("rp-ratio") and tail_ok
    return Check(f"rp-proportionality[{_tag(sp)}]", ok, rep.max_deviation,
                 config.tol("rp-ratio"), detail)


def _rp_gram(sp, config, size=20):
    rng = _rng(config, sp.n, 5)
    pts = sphere.random_sphere_plus(sp.n, rng, size)
    rep = sphere.rp_gram_check(sp, pts, K=config.K, tol=config.tol("psd"))
    tail_ok = rep.tail <= config.tol("rp-tail")
    detail = {"min_eigenvalue": rep.min_eigenvalue, "trace": rep.trace, "max_tail": rep.tail,
              "tail_tolerance": config.tol("rp-tail"), "K": config.K}
    detail.update(_tail_note(rep.tail, config.tol("rp-tail")))
    return Check(f"rp-gram[{_tag(sp)}]", rep.verdict and tail_ok,
                 -rep.min_eigenvalue / rep.trace, config.tol("psd"), detail)


# ---------------------------------------------------------------- distributions


def _bump(spec):
    return dist.bump_test_function(*spec)


def suite_distributions(config):
    checks = []
    ladder = config.eps_ladder
    for sp in _params(config, (2,), (0.6, "i")):
        for label, spec, tol in (("offcut", OFFCUT_2, "table-offcut"), ("cut", CUT_2, "table-cut")):
            for side, which in (("Xi", "psi"), ("XiBar", "psi_tilde")):
                checks.append(lambda sp=sp, label=label, spec=spec, tol=tol, side=side, which=which:
                              _table(sp, label, spec, side, which, config.tol(tol), ladder))
        checks.append(lambda sp=sp: _kg(sp, "offcut", OFFCUT_2, "limit", config.tol("kg-offcut"),
                                        ladder))
        checks.append(lambda sp=sp: _kg(sp, "cut", CUT_2, "limit", config.tol("kg-cut"), ladder))
        checks.append(lambda sp=sp: _kg_order(sp, config))
        checks.append(lambda sp=sp: _h_check(sp, "boost", OFFCUT_2, geo.boost(2, 0.2, axis=1),
                                             config.tol("h-boost"), ladder))
        checks.append(lambda sp=sp: _h_check(sp, "boost-cut", CUT_2, geo.boost(2, 0.2, axis=1),
                                             config.tol("h-boost"), ladder))
        checks.append(lambda sp=sp: _h_check(sp, "identity", OFFCUT_2, np.eye(3),
                                             config.tol("h-rotation"), ladder))
    for sp in _params(config, (3,), (0.6, "i")):
        checks.append(lambda sp=sp: _kg(sp, "offcut", OFFCUT_3, "limit", config.tol("kg-offcut"),
                                        ladder))
    for sp in _params(config, (3,), (0.6,)):
        checks.append(lambda sp=sp: _h_check(sp, "rotation", ROTATE_3, geo.rotation(3, 1, 2, 0.3),
                                             config.tol("h-rotation"), ladder))
    return checks


def _table(sp, label, spec, side, which, tol, ladder):
    tf = _bump(spec)
    grid = dist.build_grid(tf)
    lim = dist.pair_limit(sp, tf, side, ladder, grid=grid)
    point = dist.pair_pointwise(sp, tf, which, grid=grid)
    err = abs(lim.value - point) / max(1.0, abs(point))
    return _check(f"bv-table[{_tag(sp)},{label},{side}~{which}]", err, tol,
                  {"limit": [lim.value.real, lim.value.imag], "pointwise": [point.real, point.imag],
                   "richardson_residual": lim.residual})


def _kg(sp, label, spec, route, tol, ladder, step=dist.FD_STEP):
    rep = dist.weak_kg_check(sp, _bump(spec), "psi", route, step, eps_ladder=ladder)
    return _check(f"weak-kg[{_tag(sp)},{label},{route}]", rep.residual, tol,
                  {"fd_step": step, "theta_phi": [rep.theta_phi.real, rep.theta_phi.imag]})


def _kg_order(sp, config, steps=(0.02, 0.01, 0.005)):
    tf = _bump(OFFCUT_2)
    grid = dist.build_grid(tf)
    res = [dist.weak_kg_check(sp, tf, "psi", "limit", h, grid, eps_ladder=config.eps_ladder).residual
           for h in steps]
    orders = dist.observed_orders(steps, res)
    worst = float(np.min(orders))
    return Check(f"weak-kg-order[{_tag(sp)},offcut]", worst >= config.tol("kg-order"), worst,
                 config.tol("kg-order"), {"steps": list(steps), "residuals": res,
                                          "orders": list(orders), "bound": "lower"})


def _h_check(sp, label, spec, h, tol, ladder):
    err = dist.h_invariance_check(sp, _bump(spec), h, "psi", "limit", eps_ladder=ladder)
    return _check(f"h-invariance[{_tag(sp)},{label}]", err, tol)


# ---------------------------------------------------------------- microlocal


def suite_microlocal(config):
    checks = []
    for sp in _params(config, (2, 3), (0.6, "i")):
        for side in ("+", "-"):
            checks.append(lambda sp=sp, side=side: _probe_1d(sp, side))
    for sp in _params(config, (2,), (0.6, "i")):
        for which in ("psi", "psi_tilde"):
            checks.append(lambda sp=sp, which=which: _probe_2d(sp, which, config))
    for sp in _params(config, (2, 3), (0.6,)):
        for which in ("psi", "psi_tilde"):
            checks.append(lambda sp=sp, which=which: _no_overlap(sp, which, config))
    return checks


def _probe_1d(sp, side):
    reports = micro.probe_hyp2f1_example(sp, side)
    got = {float(r.direction[0]): r.classification for r in reports}
    # x + i0 is slow for tau > 0 and rapid for tau < 0; x - i0 is the mirror
    want = {1.0: "slow", -1.0: "rapid"} if side == "+" else {1.0: "rapid", -1.0: "slow"}
    wrong = sum(got[k] != v for k, v in want.items())
    return Check(f"probe-1d[{_tag(sp)},x{side}i0]", wrong == 0, float(wrong), 0.0,
                 {"exponents": {str(k): r.exponent for k, r in zip(got, reports)},
                  "classification": {str(k): v for k, v in got.items()}})


def _probe_2d(sp, which, config):
    reports = micro.wf_probe_de_sitter(sp, which=which)
    agree = sum(bool(r.agrees) for r in reports)
    need = config.tol("wf-agree")
    return Check(f"probe-2d[{_tag(sp)},{which}]", agree >= need, float(agree), need,
                 {"directions": len(reports), "bound": "lower",
                  "exponents": [r.exponent for r in reports],
                  "predicted": [r.predicted for r in reports]})


def _no_overlap(sp, which, config, samples=1000):
    ok = micro.wf_no_overlap_check(sp, samples, which, seed=config.seed)
    return Check(f"wf-no-overlap[{_tag(sp)},{which}]", ok, 0.0 if ok else 1.0, 0.0,
                 {"samples": samples})


# ---------------------------------------------------------------- driver


SUITE_FUNCTIONS = {
    "hyp": suite_hyp,
    "kernels": suite_kernels,
    "rp": suite_rp,
    "distributions": suite_distributions,
    "microlocal": suite_microlocal,
}


def _run_one(suite, index, thunk):
    try:
        return thunk()
    except Exception as exc:  # a crashing check is a failing check
        return Check(f"error[{suite}#{index}]", False, float("nan"), float("nan"),
                     {"error": f"{type(exc).__name__}: {exc}"})


def run_suite(name, config=None):
    """Run one suite (or "all") and return the JSON-ready report."""
    config = config or VerifyConfig()
    names = SUITES if name == "all" else (name,)
    if any(s not in SUITE_FUNCTIONS for s in names):
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}, all")
    sections = []
    for s in names:
        thunks = SUITE_FUNCTIONS[s](config)
        if config.threads > 1:
            with ThreadPoolExecutor(max_workers=config.threads) as pool:
                results = list(pool.map(_run_one, [s] * len(thunks), range(len(thunks)), thunks))
        else:
            results = [_run_one(s, i, t) for i, t in enumerate(thunks)]
        sections.append({
            "suite": s,
            "passed": all(c.passed for c in results),
            "checks": [c.as_dict() for c in results],
        })
    failed = [c["name"] for sec in sections for c in sec["checks"] if not c["passed"]]
    return {
        "suite": name,
        "config": {
            "n": config.n,
            "lambda": None if config.lam is None else [config.lam.real, config.lam.imag],
            "seed": config.seed,
            "quad_order": config.quad_order,
            "eps_ladder": [float(e) for e in config.eps_ladder],
            "K": config.K,
            "tolerances": {k: config.tol(k) for k in DEFAULT_TOLS},
        },
        "passed": not failed,
        "failed": failed,
        "sections": sections,
    }
