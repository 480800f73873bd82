"""Uniform approximation of completely monotone functions by anchored-box simple functions.

On each edge of the cube through 1, the restriction of ``f`` is an
increasing function of one variable. Its range is cut into steps of
height at most ``1/n`` and each cut level is pulled back to a breakpoint:
either a point where the restriction attains the level or the location of
the jump across it. Between consecutive breakpoints a midpoint stands in
for the whole open interval, and each breakpoint stands for itself.

In ``d`` dimensions the representatives combine coordinatewise into a map
``q``, and the approximant is ``f(q(x))``. On each axis the representatives
form a nested chain of anchored intervals::

    [0,y_1]  [0,y_2)  [0,y_2]  ...  [0,y_K]  [0,1)  [0,1]
      y_1      z_1      y_2          y_K      z_K     1

so ``f o q`` is a signed sum of product boxes whose coefficients are the
mixed differences of ``f`` over the representative grid. The sup-norm
error is at most ``d/n`` for completely monotone ``f``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument, PreconditionViolation, UnsupportedInput
from .grid import BoxV, Ladder, TabulatedFunction, _mesh, as_points, evaluate
from .sets import SetFamily
from .simple import SimpleFunction, mixed_differences, vs_upper
from .variation import hk_on_ladder, is_completely_monotone

_BISECT_MAX_ITER = 1200


def _dim(f, d=None) -> int:
    d = d if d is not None else getattr(f, "d", None)
    if d is None:
        raise InvalidArgument("dimension unknown: pass d explicitly")
    return int(d)


def edge_restriction(f, d: int, axis: int):
    """``t -> f(1, ..., t, ..., 1)`` with ``t`` in position ``axis``."""

    def g(t):
        t = np.asarray(t, dtype=float).reshape(-1)
        pts = np.ones((t.size, d))
        pts[:, axis] = t
        return evaluate(f, pts)

    return g


def _first_reaching(g, levels: np.ndarray) -> np.ndarray:
    """Smallest float ``y`` in [0, 1] with ``g(y) >= level``, for each level.

    Requires ``g(0) < level <= g(1)``. Bisection runs until the bracket is
    two adjacent floats, so the boundary is exact in floating point: every
    float below the result falls short of the level.
    """
    lo = np.zeros(levels.size)
    hi = np.ones(levels.size)
    for _ in range(_BISECT_MAX_ITER):
        mid = lo + (hi - lo) / 2.0
        active = (mid > lo) & (mid < hi)
        if not active.any():
            break
        vals = g(mid[active])
        reach = vals >= levels[active]
        ia = np.flatnonzero(active)
        hi[ia[reach]] = mid[active][reach]
        lo[ia[~reach]] = mid[active][~reach]
    return hi


def axis_breakpoints(g, n: int) -> np.ndarray:
    """Breakpoints ``0 = y_1 < ... < y_K < 1`` for an increasing function of one variable.

    The range ``[g(0), g(1)]`` is split into ``N = ceil(n * (g(1) - g(0)))``
    equal steps and every level above ``g(0)`` is pulled back, the top one
    included, so a jump to the maximum becomes a breakpoint. Repeated
    breakpoints and 1 are dropped.
    """
    lo_val, hi_val = (float(v) for v in g(np.array([0.0, 1.0])))
    width = hi_val - lo_val
    if width < 0:
        raise PreconditionViolation("restriction to an edge through 1 is decreasing",
                                    {"f(0)": lo_val, "f(1)": hi_val})
    steps = math.ceil(n * width) if width > 0 else 0
    ys = [0.0]
    if steps >= 1:
        levels = lo_val + np.arange(1, steps + 1) * (width / steps)
        levels[-1] = hi_val
        ys.extend(_first_reaching(g, levels).tolist())
    pts = np.unique(np.array(ys))
    return pts[pts < 1.0]


def representative_chain(breakpoints: np.ndarray):
    """Per-axis representatives with the anchored interval each one stands for.

    Returns ``(reps, ends, closed)``: representative points and, for the
    matching chain link, the upper end and whether it is closed.
    """
    ys = list(breakpoints) + [1.0]
    reps, ends, closed = [], [], []
    for l in range(len(ys) - 1):
        reps.append(ys[l])
        ends.append(ys[l])
        closed.append(True)
        reps.append((ys[l] + ys[l + 1]) / 2.0)
        ends.append(ys[l + 1])
        closed.append(False)
    reps.append(1.0)
    ends.append(1.0)
    closed.append(True)
    return np.array(reps), np.array(ends), np.array(closed)


@dataclass
class MonotoneApproximation:
    """The approximant together with the per-axis breakpoints it was built from."""

    simple: SimpleFunction
    breakpoints: tuple
    n: int

    @property
    def error_bound(self) -> float:
        return self.simple.d / self.n

    @property
    def ladder(self) -> Ladder:
        return Ladder(tuple(tuple(b.tolist()) for b in self.breakpoints))


def require_completely_monotone(f, d: int, check_ladder: Ladder | None = None):
    if check_ladder is None:
        check_ladder = f.ladder if isinstance(f, TabulatedFunction) else Ladder.uniform(d, 8)
    res = is_completely_monotone(f, check_ladder)
    if not res.ok:
        raise PreconditionViolation("function is not completely monotone", res.witness)


def monotone_approximation(f, n: int, d: int | None = None, family: SetFamily | None = None,
                           check: bool = True, check_ladder: Ladder | None = None) -> MonotoneApproximation:
    from .sets import AnchoredBoxes

    d = _dim(f, d)
    n = int(n)
    if n < 1:
        raise InvalidArgument("n must be a positive integer")
    if check:
        require_completely_monotone(f, d, check_ladder)
    family = family or AnchoredBoxes(d)
    bps = tuple(axis_breakpoints(edge_restriction(f, d, i), n) for i in range(d))
    chains = [representative_chain(b) for b in bps]
    reps = [c[0] for c in chains]
    values = evaluate(f, _mesh(reps)).reshape(tuple(r.size for r in reps))
    coef = mixed_differences(values)
    terms = []
    for idx in zip(*np.nonzero(coef)):
        b = tuple(float(chains[j][1][k]) for j, k in enumerate(idx))
        closed = frozenset(j for j, k in enumerate(idx) if chains[j][2][k])
        terms.append((float(coef[idx]), BoxV.anchored(b, closed)))
    return MonotoneApproximation(SimpleFunction(family, terms), bps, n)


def monotone_approximate(f, n: int, d: int | None = None, **kw) -> SimpleFunction:
    """Simple function over anchored boxes within ``d/n`` of a completely monotone ``f``."""
    return monotone_approximation(f, n, d, **kw).simple


# -- D-variation upper bounds ---------------------------------------------

@dataclass
class DVariationBound:
    value: float
    route: str
    certified: bool
    trace: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"value": self.value, "route": self.route, "certified": self.certified,
                "trace": self.trace}


def _sample_points(d: int, count: int = 4096) -> np.ndarray:
    from .discrepancy import halton

    corners = np.array(np.meshgrid(*[[0.0, 1.0]] * d, indexing="ij")).reshape(d, -1).T
    return np.vstack([halton(count, d), corners])


def _doubling(n_max: int):
    n = 1
    while n <= n_max:
        yield n
        n *= 2


def dvar_upper(f, family: SetFamily, n_max: int = 64, samples=None) -> DVariationBound:
    """Upper bound on the D-variation from a uniformly convergent sequence of simple functions.

    Routes, in order of preference:

    ``simple``       the input is a simple function over the family;
    ``exact``        the input knows an exact representation in the family;
    ``monotone``     the input is completely monotone: the anchored-box
                     approximants for n = 1, 2, 4, ..., n_max;
    ``tabulation``   otherwise: step tables on uniform ladders. When the
                     sampled sup error does not shrink the sequence does not
                     converge uniformly and the bound is +inf; when it does,
                     the last value is reported uncertified.
    """
    d = family.d
    if isinstance(f, SimpleFunction):
        if f.family != family:
            raise UnsupportedInput(f"simple function over {f.family!r}, asked for {family!r}")
        v = vs_upper(f)
        return DVariationBound(v, "simple", True, [{"n": 1, "vs_upper": v, "sup_error": 0.0}])
    rep_fn = getattr(f, "representation", None)
    rep = rep_fn(family) if rep_fn is not None else None
    if rep is not None:
        v = vs_upper(rep)
        return DVariationBound(v, "exact", True, [{"n": 1, "vs_upper": v, "sup_error": 0.0}])
    if getattr(f, "d", d) != d:
        raise InvalidArgument("function and family dimensions differ")
    if samples is None:
        samples = _sample_points(d)
    fx = evaluate(f, samples)
    flag = getattr(f, "completely_monotone", None)
    cm = flag if flag is not None else is_completely_monotone(f, Ladder.uniform(d, 8)).ok
    trace = []
    if cm:
        for n in _doubling(n_max):
            approx = monotone_approximate(f, n, d, family=family, check=False)
            err = float(np.max(np.abs(fx - approx(samples))))
            trace.append({"n": n, "vs_upper": vs_upper(approx), "sup_error": err})
        return DVariationBound(min(t["vs_upper"] for t in trace), "monotone", True, trace)
    if isinstance(f, TabulatedFunction):
        raise UnsupportedInput("tabulated input should carry an exact representation")
    for m in _doubling(n_max):
        if m < 2:
            continue
        ladder = Ladder.uniform(d, m)
        table = TabulatedFunction(ladder, ladder.tabulate(f))
        err = float(np.max(np.abs(fx - table(samples))))
        trace.append({"n": m, "vs_upper": hk_on_ladder(table, ladder).hk_total, "sup_error": err})
    if not trace:
        raise UnsupportedInput("n_max too small for the tabulation route")
    first, last = trace[0]["sup_error"], trace[-1]["sup_error"]
    shrinking = len(trace) > 1 and last <= 4.0 * first * trace[0]["n"] / trace[-1]["n"]
    if not shrinking and last > 0.0:
        return DVariationBound(math.inf, "tabulation", True, trace)
    return DVariationBound(trace[-1]["vs_upper"], "tabulation", False, trace)


# -- chain inequality for completely monotone functions ---------------------

def chain_terms(f, x, a, i: int, j: int):
    """The three differences in the edge-comparison chain for axes ``i != j``.

    ``|f(x^j:a^-j) - f(a)|``, ``|f(1^i:x^j:a^-{i,j}) - f(1^i:a^-i)|`` and
    ``|f(x^j:1^-j) - f(a^j:1^-j)|``.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    a = np.asarray(a, dtype=float).reshape(-1)
    d = x.size
    if a.size != d:
        raise InvalidArgument("x and a must have the same dimension")
    if i == j or not (0 <= i < d and 0 <= j < d):
        raise InvalidArgument("need two distinct axes in range")
    p1 = a.copy()
    p1[j] = x[j]
    p2 = a.copy()
    p2[i] = 1.0
    p2[j] = x[j]
    p3 = a.copy()
    p3[i] = 1.0
    p4 = np.ones(d)
    p4[j] = x[j]
    p5 = np.ones(d)
    p5[j] = a[j]
    v = evaluate(f, np.array([p1, a, p2, p3, p4, p5]))
    return abs(v[0] - v[1]), abs(v[2] - v[3]), abs(v[4] - v[5])


def chain_check(f, x, a, i: int, j: int, tol: float = 1e-12) -> bool:
    left, mid, right = chain_terms(f, x, a, i, j)
    slack = tol * (1.0 + right)
    return left <= mid + slack and mid <= right + slack


# -- Banach-algebra norm ----------------------------------------------------

def sup_norm(f, d: int | None = None, samples=None) -> float:
    """Exact for simple functions over anchored boxes and tables; sampled otherwise."""
    if isinstance(f, SimpleFunction):
        return f.sup_norm(samples)
    if isinstance(f, TabulatedFunction):
        return f.sup_norm()
    known = getattr(f, "sup_norm", None)
    if callable(known):
        return float(known())
    d = _dim(f, d)
    pts = _sample_points(d, 1 << 14) if samples is None else as_points(samples, d)
    return float(np.max(np.abs(evaluate(f, pts))))


def banach_norm(f, sigma: float, var: float, d: int | None = None, samples=None) -> float:
    """``sup|f| + sigma * var`` for a caller-supplied variation value."""
    if not sigma > 0:
        raise InvalidArgument("sigma must be positive")
    if var < 0:
        raise InvalidArgument("variation must be nonnegative")
    return sup_norm(f, d, samples) + sigma * var
