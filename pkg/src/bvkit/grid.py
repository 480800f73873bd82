"""Points, axis subsets, half-open boxes, ladders and difference operators.

Axes are 0-based in the Python API. Anything user-facing (JSON keys, CLI
output) prints them 1-based, e.g. ``"{1,3}"``.

A *grid function* is any callable mapping an ``(n, d)`` float array to an
``(n,)`` array of values. Closed-form test functions, tabulated step
functions and simple functions all follow that convention.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import InvalidArgument

MAX_DIM = 8

GridFunction = Callable[[np.ndarray], np.ndarray]


def stable_sum(values) -> float:
    """Exactly rounded sum; independent of ordering and thread count."""
    return math.fsum(np.ravel(np.asarray(values, dtype=float)).tolist())


def as_points(x, d: int | None = None) -> np.ndarray:
    pts = np.asarray(x, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.ndim != 2:
        raise InvalidArgument(f"expected an (n, d) array of points, got shape {pts.shape}")
    if d is not None and pts.shape[1] != d:
        raise InvalidArgument(f"expected points of dimension {d}, got {pts.shape[1]}")
    return pts


def as_point(x, d: int | None = None) -> np.ndarray:
    p = np.asarray(x, dtype=float).reshape(-1)
    if not 1 <= p.size <= MAX_DIM:
        raise InvalidArgument(f"dimension must be in 1..{MAX_DIM}, got {p.size}")
    if d is not None and p.size != d:
        raise InvalidArgument(f"dimension mismatch: expected {d}, got {p.size}")
    if np.any(p < 0.0) or np.any(p > 1.0) or not np.all(np.isfinite(p)):
        raise InvalidArgument(f"point {p.tolist()} lies outside [0,1]^{p.size}")
    return p


def evaluate(f: GridFunction, pts) -> np.ndarray:
    return np.asarray(f(as_points(pts)), dtype=float).reshape(-1)


# -- axis subsets ---------------------------------------------------------

def axis_subset(u: Iterable[int], d: int) -> frozenset:
    u = frozenset(int(i) for i in u)
    if any(i < 0 or i >= d for i in u):
        raise InvalidArgument(f"axis subset {sorted(u)} out of range for d={d}")
    return u


def complement(u: Iterable[int], d: int) -> frozenset:
    return frozenset(range(d)) - frozenset(u)


def subsets(axes: Iterable[int]):
    """All subsets of ``axes`` as sorted tuples, smallest first."""
    axes = sorted(axes)
    for r in range(len(axes) + 1):
        yield from itertools.combinations(axes, r)


def format_subset(u: Iterable[int]) -> str:
    return "{" + ",".join(str(i + 1) for i in sorted(u)) + "}"


def parse_subset(text: str) -> frozenset:
    body = text.strip().strip("{}").strip()
    if not body:
        return frozenset()
    return frozenset(int(tok) - 1 for tok in body.split(","))


# -- splicing and differences --------------------------------------------

def splice(a, b, u: Iterable[int]) -> np.ndarray:
    """The point taking coordinate ``a_i`` for ``i`` in ``u`` and ``b_i`` otherwise."""
    a = np.asarray(a, dtype=float).reshape(-1)
    b = np.asarray(b, dtype=float).reshape(-1)
    if a.shape != b.shape:
        raise InvalidArgument(f"dimension mismatch: {a.size} vs {b.size}")
    u = axis_subset(u, a.size)
    out = b.copy()
    idx = list(u)
    out[idx] = a[idx]
    return out


def _check_box(a, b):
    a = as_point(a)
    b = as_point(b, a.size)
    if np.any(a > b):
        raise InvalidArgument(f"lower corner {a.tolist()} is not <= upper corner {b.tolist()}")
    return a, b


def delta_u(f: GridFunction, a, b, u: Iterable[int]) -> float:
    """Alternating sum of ``f`` over the corners of ``[a, b]`` varying only the axes in ``u``.

    Axes outside ``u`` stay at ``b``. With ``u`` empty this is ``f(b)``;
    with ``u`` the full axis set it is the quasi-volume ``delta(f, a, b)``.
    """
    a, b = _check_box(a, b)
    u = axis_subset(u, a.size)
    subs = list(subsets(u))
    pts = np.array([splice(a, b, v) for v in subs])
    vals = evaluate(f, pts)
    signs = np.array([(-1.0) ** len(v) for v in subs])
    return stable_sum(signs * vals)


def delta(f: GridFunction, a, b) -> float:
    """Quasi-volume of ``[a, b]`` under ``f``: 2^d signed corner evaluations."""
    a, b = _check_box(a, b)
    return delta_u(f, a, b, range(a.size))


def grid_differences(values: np.ndarray, axes: Iterable[int]) -> np.ndarray:
    """Apply a forward difference along each axis in ``axes``.

    On a tabulated grid this yields the quasi-volume of every cell of the
    face spanned by ``axes``, with the remaining axes left at every grid
    value.
    """
    out = values
    for ax in axes:
        out = np.diff(out, axis=ax)
    return out


# -- boxes ----------------------------------------------------------------

@dataclass(frozen=True)
class BoxV:
    """Axis-parallel box, closed at ``b`` on the axes in ``closed`` and half-open elsewhere.

    The lower face is always closed. On any axis outside ``closed`` with
    ``a_i == b_i`` the box is empty.
    """

    a: tuple
    b: tuple
    closed: frozenset = frozenset()

    def __post_init__(self):
        a = tuple(float(t) for t in self.a)
        b = tuple(float(t) for t in self.b)
        if len(a) != len(b) or not 1 <= len(a) <= MAX_DIM:
            raise InvalidArgument("box corners must share a dimension in 1..8")
        if any(x > y for x, y in zip(a, b)):
            raise InvalidArgument(f"box corner {a} is not <= {b}")
        if any(t < 0.0 or t > 1.0 for t in a + b):
            raise InvalidArgument("box corners must lie in the unit cube")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "closed", axis_subset(self.closed, len(a)))

    @classmethod
    def anchored(cls, b, closed=()) -> "BoxV":
        b = tuple(b)
        return cls((0.0,) * len(b), b, frozenset(closed))

    @property
    def d(self) -> int:
        return len(self.a)

    @property
    def is_anchored(self) -> bool:
        return all(t == 0.0 for t in self.a)

    @property
    def is_empty(self) -> bool:
        return any(self.a[i] == self.b[i] for i in range(self.d) if i not in self.closed)

    @property
    def is_full(self) -> bool:
        return (
            all(t == 0.0 for t in self.a)
            and all(t == 1.0 for t in self.b)
            and len(self.closed) == self.d
        )

    def contains(self, pts) -> np.ndarray:
        x = as_points(pts, self.d)
        a = np.asarray(self.a)
        b = np.asarray(self.b)
        closed = np.zeros(self.d, dtype=bool)
        closed[list(self.closed)] = True
        upper = np.where(closed, x <= b, x < b)
        return np.all((x >= a) & upper, axis=1)

    def intersect(self, other: "BoxV") -> "BoxV":
        a = tuple(max(p, q) for p, q in zip(self.a, other.a))
        b, closed = [], set()
        for i, (p, q) in enumerate(zip(self.b, other.b)):
            if p < q:
                b.append(p)
                on = i in self.closed
            elif q < p:
                b.append(q)
                on = i in other.closed
            else:
                b.append(p)
                on = i in self.closed and i in other.closed
            if on:
                closed.add(i)
        # disjoint boxes collapse to a canonical empty box
        if any(x > y for x, y in zip(a, b)):
            return BoxV(b, b, frozenset())
        return BoxV(a, tuple(b), frozenset(closed))

    def to_json(self) -> dict:
        return {
            "kind": "box",
            "a": list(self.a),
            "b": list(self.b),
            "closed_axes": [i + 1 for i in sorted(self.closed)],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "BoxV":
        b = obj["b"]
        a = obj.get("a", [0.0] * len(b))
        return cls(tuple(a), tuple(b), frozenset(i - 1 for i in obj.get("closed_axes", [])))


# -- ladders --------------------------------------------------------------

@dataclass(frozen=True)
class Ladder:
    """Product of per-axis breakpoint lists ``0 = y_1 < ... < y_k < 1``.

    The successor of the last breakpoint on each axis is 1, so the cells
    ``[y, y_+]`` tile the unit cube.
    """

    axes: tuple

    def __post_init__(self):
        axes = tuple(tuple(float(t) for t in ax) for ax in self.axes)
        if not 1 <= len(axes) <= MAX_DIM:
            raise InvalidArgument(f"ladder dimension must be in 1..{MAX_DIM}")
        for j, ax in enumerate(axes):
            if not ax or ax[0] != 0.0:
                raise InvalidArgument(f"axis {j + 1}: breakpoints must start at 0")
            if ax[-1] >= 1.0:
                raise InvalidArgument(f"axis {j + 1}: breakpoints must be < 1")
            if any(p >= q for p, q in zip(ax, ax[1:])):
                raise InvalidArgument(f"axis {j + 1}: breakpoints must be strictly increasing")
        object.__setattr__(self, "axes", axes)

    @classmethod
    def uniform(cls, d: int, m) -> "Ladder":
        ms = [m] * d if np.isscalar(m) else list(m)
        if len(ms) != d or any(int(k) < 1 for k in ms):
            raise InvalidArgument("cells per axis must be positive integers, one per axis")
        return cls(tuple(tuple((np.arange(int(k)) / int(k)).tolist()) for k in ms))

    @property
    def d(self) -> int:
        return len(self.axes)

    @property
    def cells_per_axis(self) -> tuple:
        return tuple(len(ax) for ax in self.axes)

    def closed_axis(self, j: int) -> np.ndarray:
        """Breakpoints of axis ``j`` followed by the terminal value 1."""
        return np.array(self.axes[j] + (1.0,))

    def points(self) -> np.ndarray:
        return _mesh([np.array(ax) for ax in self.axes])

    def closed_points(self) -> np.ndarray:
        return _mesh([self.closed_axis(j) for j in range(self.d)])

    def tabulate(self, f: GridFunction) -> np.ndarray:
        """Values of ``f`` on the closed grid, shaped ``(k_1 + 1, ..., k_d + 1)``."""
        shape = tuple(k + 1 for k in self.cells_per_axis)
        return evaluate(f, self.closed_points()).reshape(shape)

    def locate(self, pts) -> np.ndarray:
        """Index of the closed-grid point at the lower-left of each point's cell.

        A coordinate equal to 1 maps to the terminal index.
        """
        x = as_points(pts, self.d)
        idx = np.empty(x.shape, dtype=np.intp)
        for j in range(self.d):
            grid = self.closed_axis(j)
            idx[:, j] = np.searchsorted(grid, x[:, j], side="right") - 1
        return np.clip(idx, 0, None)

    def to_json(self) -> list:
        return [list(ax) for ax in self.axes]


def _mesh(axes: Sequence[np.ndarray]) -> np.ndarray:
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def successor(ladder: Ladder, y) -> np.ndarray:
    y = np.asarray(y, dtype=float).reshape(-1)
    if y.size != ladder.d:
        raise InvalidArgument(f"dimension mismatch: ladder has d={ladder.d}, point has {y.size}")
    out = np.empty_like(y)
    for j, ax in enumerate(ladder.axes):
        try:
            # exact equality: breakpoints are stored, never recomputed
            i = ax.index(float(y[j]))
        except ValueError:
            raise InvalidArgument(f"coordinate {y[j]!r} is not a breakpoint of axis {j + 1}") from None
        out[j] = ax[i + 1] if i + 1 < len(ax) else 1.0
    return out


def face_ladder(ladder: Ladder, u: Iterable[int]) -> np.ndarray:
    """Points ``y^u : 1^{-u}`` for ``y`` in the ladder; ``{1}`` when ``u`` is empty."""
    u = axis_subset(u, ladder.d)
    axes = [np.array(ax) if j in u else np.array([1.0]) for j, ax in enumerate(ladder.axes)]
    return _mesh(axes)


def refine(ladder: Ladder, factor: int) -> Ladder:
    """Split every cell on every axis into ``factor`` equal parts."""
    factor = int(factor)
    if factor < 1:
        raise InvalidArgument("refinement factor must be a positive integer")
    new_axes = []
    for j, ax in enumerate(ladder.axes):
        grid = ladder.closed_axis(j)
        pts = []
        for lo, hi in zip(grid[:-1], grid[1:]):
            pts.append(lo)
            pts.extend(lo + k * (hi - lo) / factor for k in range(1, factor))
        new_axes.append(tuple(float(p) for p in pts))
    return Ladder(tuple(new_axes))


class TabulatedFunction:
    """Step function on a ladder: each point takes the value at the lower-left corner of its cell.

    ``values`` lives on the closed grid (breakpoints plus 1 on every axis),
    so the value at coordinate 1 is stored explicitly.
    """

    def __init__(self, ladder: Ladder, values, label: str = "table"):
        values = np.array(values, dtype=float)
        shape = tuple(k + 1 for k in ladder.cells_per_axis)
        if values.shape != shape:
            raise InvalidArgument(f"table shape {values.shape} does not match ladder grid {shape}")
        values.setflags(write=False)
        self.ladder = ladder
        self.values = values
        self.label = label
        self.d = ladder.d

    def __call__(self, pts) -> np.ndarray:
        idx = self.ladder.locate(pts)
        return self.values[tuple(idx.T)]

    def __mul__(self, other: "TabulatedFunction") -> "TabulatedFunction":
        if other.ladder != self.ladder:
            raise InvalidArgument("pointwise product needs both tables on the same ladder")
        return TabulatedFunction(self.ladder, self.values * other.values, f"{self.label}*{other.label}")

    def __add__(self, other: "TabulatedFunction") -> "TabulatedFunction":
        if other.ladder != self.ladder:
            raise InvalidArgument("sum needs both tables on the same ladder")
        return TabulatedFunction(self.ladder, self.values + other.values, f"{self.label}+{other.label}")

    def scaled(self, c: float) -> "TabulatedFunction":
        return TabulatedFunction(self.ladder, c * self.values, f"{c}*{self.label}")

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def representation(self, family):
        """Exact simple-function form; anchored boxes belong to every supported family."""
        from .simple import table_to_simple

        return table_to_simple(self, family)

    def integral(self) -> float:
        vol = np.ones(())
        for j in range(self.d):
            widths = np.diff(self.ladder.closed_axis(j))
            vol = np.multiply.outer(vol, widths)
        # the terminal slice at coordinate 1 has measure zero
        body = self.values[tuple(slice(0, -1) for _ in range(self.d))]
        return stable_sum(body * vol)

    def to_json(self) -> dict:
        return {"ladder": self.ladder.to_json(), "values": self.values.tolist()}

    @classmethod
    def from_json(cls, obj: dict, label: str = "table") -> "TabulatedFunction":
        return cls(Ladder(tuple(tuple(ax) for ax in obj["ladder"])), obj["values"], label)
