"""Command-line entry point: ``dsk eval-kernel``, ``dsk bv-profile`` and ``dsk verify``."""

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import geometry as geo
from . import kernels as ker
from .hyp2f1 import BoundarySide, SpectralParam, hyp2f1_boundary
from .verify import DEFAULT_TOLS, SUITES, VerifyConfig, run_suite, threads_from_env

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
CLIP = 1e-9  # bv-profile drops x <= 1 + CLIP

POINT_HELP = """point specs:
  ie0 / -ie0       i e_0 (in Xi) / -i e_0 (in XiBar)
  en               e_n (real de Sitter point)
  sphere:x0,...,xn (i x0, x1, ..., xn) for a unit vector x (x0 > 0: Xi, x0 < 0: XiBar)
  chart:s,a1,...   de Sitter chart (sinh s, cosh s omega); omega from angles
                   (n=2: alpha; n=3: beta,gamma)
  c0,c1,...,cn     explicit complex coordinates, e.g. 0+1j,0,0
  conj:SPEC        complex conjugate of SPEC (conj:ie0 = -ie0; avoids a leading '-')
"""

EVAL_HELP = """CSV columns: z<k>_re, z<k>_im, w<k>_re, w<k>_im for k = 0..n, then
kernel_re, kernel_im with kernel = Psi_lambda (Xi) or tilde Psi_lambda (XiBar)
evaluated as 2F1(rho+lambda, rho-lambda; n/2; (1 + [z, conj w]) / 2) with
[z, w] = -z0 w0 + z1 w1 + ... + zn wn.

""" + POINT_HELP

PROFILE_HELP = """CSV columns: x, plus_i0_re, plus_i0_im, minus_i0_re, minus_i0_im,
jump_re, jump_im.  plus_i0 is 2F1(rho+lambda, rho-lambda; n/2; x + i0), minus_i0
is x - i0 and jump = plus_i0 - minus_i0.  Rows have x on a uniform grid in
(1, inf); points with x <= 1 are dropped with a warning.  Values carry 17
significant digits; JSON output holds the same rows.
"""


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- parsing


def parse_lambda(text):
    try:
        parts = [float(p) for p in text.split(",")]
    except ValueError:
        raise UsageError(f"--lambda expects 're,im', got {text!r}") from None
    if len(parts) == 1:
        parts.append(0.0)
    if len(parts) != 2:
        raise UsageError(f"--lambda expects 're,im', got {text!r}")
    return complex(parts[0], parts[1])


def spectral_param(n, lam):
    try:
        return SpectralParam(n, lam)
    except ValueError:
        rho = (n - 1) / 2
        raise UsageError(
            f"inadmissible lambda = {lam.real:g}{lam.imag:+g}i for n = {n}: "
            f"need λ ∈ i[0,∞)∪(0,ρ) with ρ = {rho:g}"
        ) from None


def parse_eps_ladder(text):
    """START:RATIO:COUNT -> START * RATIO^-k, k < COUNT."""
    try:
        start, ratio, count = text.split(":")
        start, ratio, count = float(start), float(ratio), int(count)
    except ValueError:
        raise UsageError(f"--eps-ladder expects START:RATIO:COUNT, got {text!r}") from None
    if not (0 < start < np.pi / 2) or ratio <= 1 or count < 2:
        raise UsageError("--eps-ladder needs 0 < START < pi/2, RATIO > 1, COUNT >= 2")
    return tuple(start * ratio**-k for k in range(count))


def parse_point(spec, n):
    spec = spec.strip()
    if spec.startswith("conj:"):
        return np.conj(parse_point(spec[5:], n))
    try:
        if spec in ("ie0", "-ie0"):
            z = geo.basis(n, 0, complex) * (1j if spec == "ie0" else -1j)
        elif spec == "en":
            z = geo.basis(n, n, complex)
        elif spec.startswith("sphere:"):
            x = np.array([float(v) for v in spec[7:].split(",")])
            z = x.astype(complex)
            z[0] = 1j * x[0]
        elif spec.startswith("chart:"):
            vals = [float(v) for v in spec[6:].split(",")]
            if len(vals) != n:
                raise UsageError(f"chart point needs s and {n - 1} angle(s): {spec!r}")
            omega = geo.sphere_direction(n, vals[1:]) if n > 1 else np.ones(1)
            z = geo.de_sitter_chart(vals[0], omega).astype(complex)
        else:
            z = np.array([complex(v.replace(" ", "")) for v in spec.split(",")])
    except UsageError:
        raise
    except NotImplementedError:
        raise UsageError("chart points are implemented for n = 2, 3") from None
    except (ValueError, TypeError):
        raise UsageError(f"malformed point spec {spec!r}") from None
    if z.shape != (n + 1,):
        raise UsageError(f"point {spec!r} has {z.size} coordinates, need {n + 1}")
    if not geo.on_complex_de_sitter(z):
        raise UsageError(f"point {spec!r} is not on the complex de Sitter space")
    return z


# ---------------------------------------------------------------- output


def fmt(x):
    return f"{float(x):.17g}"


def emit_table(header, rows, fmt_name, out, meta=None):
    if fmt_name == "json":
        payload = {"meta": meta or {}, "columns": header,
                   "rows": [dict(zip(header, map(float, r))) for r in rows]}
        text = json.dumps(payload, indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(header)
        for r in rows:
            writer.writerow([fmt(v) for v in r])
        text = buf.getvalue()
    write_text(text, out)


def write_text(text, out):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


# ---------------------------------------------------------------- commands


def cmd_eval_kernel(args):
    sp = spectral_param(args.n, parse_lambda(args.lam))
    pairs = args.pair or []
    if not pairs:
        raise UsageError("give at least one --pair Z W")
    header = [f"z{k}_{p}" for k in range(sp.n + 1) for p in ("re", "im")]
    header += [f"w{k}_{p}" for k in range(sp.n + 1) for p in ("re", "im")]
    header += ["kernel_re", "kernel_im"]
    kernel = ker.psi_lambda if args.kernel == "psi" else ker.psi_tilde_lambda
    side = "Xi" if args.kernel == "psi" else "XiBar"
    rows = []
    for zs, ws in pairs:
        z, w = parse_point(zs, sp.n), parse_point(ws, sp.n)
        try:
            val = complex(kernel(sp, _crown_point(z, side), _crown_point(w, side)))
        except (ValueError, ker.InvariantBreach) as exc:
            raise UsageError(f"cannot evaluate at ({zs}, {ws}): {exc}") from None
        row = [c for v in z for c in (v.real, v.imag)] + [c for v in w for c in (v.real, v.imag)]
        rows.append(row + [val.real, val.imag])
    meta = {"kernel": args.kernel, "n": sp.n, "lambda": [sp.lam.real, sp.lam.imag],
            "argument": "(1 + [z, conj w]) / 2"}
    emit_table(header, rows, args.format, args.out, meta)
    return EXIT_OK


def _crown_point(z, side):
    return ker.CrownPoint(z, "boundary" if not np.any(z.imag) else side)


def profile_rows(sp, xs):
    rows = []
    for x in xs:
        plus = complex(hyp2f1_boundary(sp, x, BoundarySide.PLUS_I0))
        minus = complex(hyp2f1_boundary(sp, x, BoundarySide.MINUS_I0))
        jump = plus - minus
        rows.append([x, plus.real, plus.imag, minus.real, minus.imag, jump.real, jump.imag])
    return rows


def cmd_bv_profile(args):
    sp = spectral_param(args.n, parse_lambda(args.lam))
    if args.points < 0:
        raise UsageError("--points must be >= 0")
    xs = np.linspace(args.x_min, args.x_max, args.points) if args.x_min <= args.x_max \
        else np.empty(0)
    keep = xs > 1 + CLIP
    if not np.all(keep):
        print(f"dsk: warning: clipped {int(np.sum(~keep))} point(s) with x <= 1 from the range",
              file=sys.stderr)
    rows = profile_rows(sp, xs[keep])
    header = ["x", "plus_i0_re", "plus_i0_im", "minus_i0_re", "minus_i0_im", "jump_re", "jump_im"]
    meta = {"n": sp.n, "lambda": [sp.lam.real, sp.lam.imag],
            "function": "2F1(rho+lambda, rho-lambda; n/2; x +- i0)"}
    emit_table(header, rows, args.format, args.out, meta)
    if args.figure:
        from .plotting import bv_profile_figure

        bv_profile_figure(sp, rows, args.figure)
    return EXIT_OK


def cmd_verify(args):
    lam = None if args.lam is None else parse_lambda(args.lam)
    if lam is not None and args.n is not None:
        spectral_param(args.n, lam)
    tols = dict(DEFAULT_TOLS)
    for key in DEFAULT_TOLS:
        val = getattr(args, "tol_" + key.replace("-", "_"))
        if val is not None:
            tols[key] = val
    config = VerifyConfig(
        n=args.n, lam=lam, seed=args.seed, quad_order=args.quad_order,
        eps_ladder=parse_eps_ladder(args.eps_ladder), K=args.K, tols=tols,
        threads=threads_from_env(),
    )
    report = run_suite(args.suite, config)
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(["suite", "check", "passed", "measured", "tolerance"])
        for sec in report["sections"]:
            for c in sec["checks"]:
                writer.writerow([sec["suite"], c["name"], c["passed"], _cell(c["measured"]),
                                 _cell(c["tolerance"])])
        write_text(buf.getvalue(), args.out)
    else:
        write_text(json.dumps(report, indent=2) + "\n", args.out)
    for name in report["failed"]:
        print(f"FAILED: {name}", file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_FAIL


def _cell(v):
    return fmt(v) if isinstance(v, float) else str(v)


# ---------------------------------------------------------------- parser


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="output path (default stdout)")

    parser = argparse.ArgumentParser(prog="dsk", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval-kernel", parents=[common], help="evaluate Psi_lambda at point pairs",
                        description=EVAL_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    ev.add_argument("--format", choices=("csv", "json"), default="csv")
    ev.add_argument("--n", type=int, default=2)
    ev.add_argument("--lambda", dest="lam", default="0,1", help="'re,im' (default 0,1 = i)")
    ev.add_argument("--kernel", choices=("psi", "psi_tilde"), default="psi")
    ev.add_argument("--pair", nargs=2, action="append", metavar=("Z", "W"))
    ev.set_defaults(func=cmd_eval_kernel)

    bv = sub.add_parser("bv-profile", parents=[common], help="boundary values of 2F1 on (1, inf)",
                        description=PROFILE_HELP,
                        formatter_class=argparse.RawDescriptionHelpFormatter)
    bv.add_argument("--format", choices=("csv", "json"), default="csv")
    bv.add_argument("--n", type=int, default=2)
    bv.add_argument("--lambda", dest="lam", default="0,1", help="'re,im' (default 0,1 = i)")
    bv.add_argument("--x-min", type=float, default=1.05)
    bv.add_argument("--x-max", type=float, default=5.0)
    bv.add_argument("--points", type=int, default=50)
    bv.add_argument("--figure", default=None, help="also save a matplotlib figure to this path")
    bv.set_defaults(func=cmd_bv_profile)

    ve = sub.add_parser("verify", parents=[common], help="run verification suites")
    ve.add_argument("--format", choices=("csv", "json"), default="json")
    ve.add_argument("--suite", default="all", choices=(*SUITES, "all"))
    ve.add_argument("--n", type=int, default=None, help="restrict grids to this n")
    ve.add_argument("--lambda", dest="lam", default=None, help="restrict grids to this lambda")
    ve.add_argument("--seed", type=int, default=0)
    ve.add_argument("--quad-order", type=int, default=64, help="sphere quadrature order")
    ve.add_argument("--eps-ladder", default="0.1:2:9", help="START:RATIO:COUNT")
    ve.add_argument("--K", type=int, default=None,
                    help="truncate the sphere series at K (default: resummed kernel)")
    for key, val in DEFAULT_TOLS.items():
        ve.add_argument(f"--tol-{key}", type=float, default=None, help=f"default {val:g}")
    ve.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"dsk: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
