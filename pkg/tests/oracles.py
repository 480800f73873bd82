"""Independent reference computations used by the tests.

Everything here is written with plain Python loops over explicit vertices,
cells and corners, sharing no code paths with the package beyond calling
the function under test pointwise.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def f_at(f, x) -> float:
    return float(np.asarray(f(np.asarray([x], dtype=float)), dtype=float)[0])


def delta_brute(f, a, b, u=None) -> float:
    """Alternating vertex sum over the coordinates in ``u`` (all when None)."""
    d = len(a)
    u = tuple(range(d)) if u is None else tuple(sorted(u))
    total = 0.0
    for choice in itertools.product((0, 1), repeat=len(u)):
        x = list(b)
        lows = 0
        for j, c in zip(u, choice):
            if c:
                x[j] = a[j]
                lows += 1
        total += (-1) ** lows * f_at(f, x)
    return total


def hk_brute(f, axes) -> float:
    """Hardy-Krause variation on the ladder with per-axis breakpoint lists ``axes``."""
    d = len(axes)
    closed = [list(ax) + [1.0] for ax in axes]
    total = 0.0
    for r in range(1, d + 1):
        for u in itertools.combinations(range(d), r):
            for cell in itertools.product(*[range(len(axes[j])) for j in u]):
                a = [1.0] * d
                b = [1.0] * d
                for j, l in zip(u, cell):
                    a[j] = closed[j][l]
                    b[j] = closed[j][l + 1]
                total += abs(delta_brute(f, a, b, u))
    return total


def cm_brute(f, axes, tol=1e-12) -> bool:
    """Every face box spanned by grid points, at every grid value of the pinned axes, has Delta >= 0."""
    d = len(axes)
    closed = [list(ax) + [1.0] for ax in axes]
    for r in range(1, d + 1):
        for u in itertools.combinations(range(d), r):
            rest = [j for j in range(d) if j not in u]
            for pins in itertools.product(*[closed[j] for j in rest]):
                for cell in itertools.product(*[range(len(axes[j])) for j in u]):
                    a = [0.0] * d
                    b = [0.0] * d
                    for j, p in zip(rest, pins):
                        a[j] = b[j] = p
                    for j, l in zip(u, cell):
                        a[j] = closed[j][l]
                        b[j] = closed[j][l + 1]
                    if delta_brute(f, a, b, u) < -tol:
                        return False
    return True


def star_discrepancy_brute(points) -> float:
    """Sup over anchored boxes via every corner drawn from coordinates and 1, open and closed counts."""
    P = np.asarray(points, dtype=float)
    if P.ndim == 1:
        P = P[:, None]
    n, d = P.shape
    cands = [sorted(set(P[:, j].tolist()) | {1.0}) for j in range(d)]
    best = 0.0
    for t in itertools.product(*cands):
        t = np.array(t)
        vol = float(np.prod(t))
        inside_open = int(np.sum(np.all(P < t, axis=1)))
        inside_closed = int(np.sum(np.all(P <= t, axis=1)))
        best = max(best, vol - inside_open / n, inside_closed / n - vol)
    return best


def local_discrepancy_sweep(points, m: int) -> float:
    """Max local discrepancy over closed and open boxes with corners on the uniform 1/m grid."""
    P = np.asarray(points, dtype=float)
    n, d = P.shape
    g = np.arange(m + 1) / m
    best = 0.0
    if d == 1:
        for t in g:
            best = max(best, t - np.sum(P[:, 0] < t) / n, np.sum(P[:, 0] <= t) / n - t)
        return float(best)
    for t1 in g:
        sel_o = P[:, 0] < t1
        sel_c = P[:, 0] <= t1
        y_o = np.sort(P[sel_o, 1])
        y_c = np.sort(P[sel_c, 1])
        cnt_o = np.searchsorted(y_o, g, side="left")
        cnt_c = np.searchsorted(y_c, g, side="right")
        vol = t1 * g
        best = max(best, float(np.max(vol - cnt_o / n)), float(np.max(cnt_c / n - vol)))
    return best


def jordan_1d(values):
    """Positive and negative variation functions of a sequence, anchored at the first value."""
    plus = [values[0]]
    minus = [0.0]
    for prev, cur in zip(values, values[1:]):
        step = cur - prev
        plus.append(plus[-1] + max(step, 0.0))
        minus.append(minus[-1] + max(-step, 0.0))
    return plus, minus


def quantize_map(breakpoints, x: float) -> float:
    """Representative of ``x`` in the one-axis approximation scheme.

    Breakpoints stand for themselves, open gaps between them for their
    midpoints, and the gap after the last one (up to but excluding 1) for its
    midpoint; 1 stands for itself.
    """
    ys = list(breakpoints) + [1.0]
    for l in range(len(ys) - 1):
        if x == ys[l]:
            return ys[l]
        if ys[l] < x < ys[l + 1]:
            return (ys[l] + ys[l + 1]) / 2.0
    return 1.0


def composed_approximant(f, breakpoints, x) -> float:
    q = [quantize_map(bps, float(xi)) for bps, xi in zip(breakpoints, x)]
    return f_at(f, q)


def halton_brute(i: int, base: int) -> float:
    """Radical inverse of ``i`` computed digit by digit with exact fractions."""
    from fractions import Fraction

    out, scale = Fraction(0), Fraction(1, base)
    while i:
        i, r = divmod(i, base)
        out += r * scale
        scale /= base
    return float(out)


def prod_hk(d: int) -> float:
    return 2.0 ** d - 1.0


def expsum_hk(d: int) -> float:
    return (2.0 - math.exp(-1.0)) ** d - 1.0
