"""Gauss-Legendre panels, geometric grading toward singular points, and
Richardson extrapolation of eps -> 0+ limits."""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=64)
def _leggauss(order):
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(order, a, b):
    x, w = _leggauss(order)
    half = 0.5 * (b - a)
    return a + half * (x + 1), half * w


def composite(breaks, order):
    """Gauss-Legendre on each interval of the sorted ``breaks``."""
    xs, ws = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        if b > a:
            x, w = gauss_legendre(order, a, b)
            xs.append(x)
            ws.append(w)
    if not xs:
        return np.empty(0), np.empty(0)
    return np.concatenate(xs), np.concatenate(ws)


def graded_breaks(a, b, singular_at, ratio=0.3, levels=30):
    """Breakpoints on [a, b] refined geometrically toward an endpoint."""
    length = b - a
    if singular_at == "left":
        inner = a + length * ratio ** np.arange(levels, 0, -1)
        return np.concatenate([[a], inner, [b]])
    if singular_at == "right":
        inner = b - length * ratio ** np.arange(1, levels + 1)
        return np.concatenate([[a], inner, [b]])
    raise ValueError(singular_at)


def cut_adapted_rule(a, b, singular_points, order=12, panel=0.1, ratio=0.3, levels=30):
    """Composite rule on [a, b] graded toward each interior singular point.

    Smooth stretches are split into panels no longer than ``panel``; the
    panel adjacent to a singular point is graded geometrically toward it.
    """
    cuts = sorted(p for p in singular_points if a < p < b)
    edges = [a, *cuts, b]
    xs, ws = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        left_sing = lo in cuts
        right_sing = hi in cuts
        pieces = max(1, int(np.ceil((hi - lo) / panel)))
        grid = np.linspace(lo, hi, pieces + 1)
        if pieces == 1 and left_sing and right_sing:
            mid = 0.5 * (lo + hi)
            grid = np.array([lo, mid, hi])
        for j, (u, v) in enumerate(zip(grid[:-1], grid[1:])):
            if j == 0 and left_sing:
                br = graded_breaks(u, v, "left", ratio, levels)
            elif j == len(grid) - 2 and right_sing:
                br = graded_breaks(u, v, "right", ratio, levels)
            else:
                br = np.array([u, v])
            x, w = composite(br, order)
            xs.append(x)
            ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


@dataclass
class Extrapolation:
    value: complex
    residual: float
    table: list


def richardson(values, ratio=2.0, orders=None):
    """Extrapolate f(h_k), h_k = h_0 / ratio^k, to h -> 0.

    Assumes f(h) = f(0) + c_1 h^p1 + c_2 h^p2 + ... with ``orders`` the
    exponents p1, p2, ... (default 1, 2, 3, ...).  Returns the diagonal entry
    whose change from its predecessor is smallest, with that change as the
    residual.
    """
    values = [complex(v) for v in values]
    k = len(values)
    if k == 0:
        raise ValueError("no values to extrapolate")
    if orders is None:
        orders = list(range(1, k))
    table = [values]
    best = (values[-1], abs(values[-1] - values[-2]) if k > 1 else float("inf"))
    for m in range(1, k):
        prev = table[-1]
        mult = ratio ** orders[m - 1]
        row = [(mult * prev[i + 1] - prev[i]) / (mult - 1) for i in range(len(prev) - 1)]
        table.append(row)
        err = max(abs(row[-1] - prev[-1]), abs(row[-1] - row[-2]) if len(row) > 1 else 0.0)
        if err < best[1]:
            best = (row[-1], err)
    return Extrapolation(best[0], float(best[1]), table)
