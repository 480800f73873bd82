"""Point sets and star discrepancy.

Local discrepancy is measured on anchored boxes. The supremum over
half-open boxes ``[0, t)`` equals the largest of

* ``vol(t) - #{x < t} / N`` over corners ``t`` built from point
  coordinates and 1 (deficient boxes), and
* ``#{x <= t} / N - vol(t)`` over the same corners (overfull boxes,
  reached as ``t`` shrinks onto a closed box).

Both counts come from one histogram of coordinate ranks followed by
cumulative sums along every axis.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .errors import InvalidArgument, ResourceLimit
from .grid import MAX_DIM

# exact search budget: N^d corners per dimension
EXACT_LIMITS = {1: 4096, 2: 256, 3: 64}
_GRID_CELL_LIMIT = 20_000_000


@dataclass(frozen=True)
class PointSet:
    points: np.ndarray
    label: str = "points"
    seed: int | None = None

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise InvalidArgument("a point set needs at least one point")
        if not 1 <= pts.shape[1] <= MAX_DIM:
            raise InvalidArgument(f"dimension must be in 1..{MAX_DIM}")
        if not np.all(np.isfinite(pts)) or pts.min() < 0.0 or pts.max() > 1.0:
            raise InvalidArgument("all coordinates must lie in [0, 1]")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.n


# -- generators -------------------------------------------------------------

def first_primes(k: int) -> list:
    out, c = [], 2
    while len(out) < k:
        if all(c % p for p in out if p * p <= c):
            out.append(c)
        c += 1
    return out


def radical_inverse(indices, base: int) -> np.ndarray:
    """Digit reversal of each index in ``base``, mirrored about the radix point."""
    i = np.asarray(indices, dtype=np.int64).copy()
    num = np.zeros_like(i)
    den = np.ones_like(i)
    while np.any(i > 0):
        live = i > 0
        num = np.where(live, num * base + i % base, num)
        den = np.where(live, den * base, den)
        i //= base
    return num / den


def halton(n: int, d: int, start: int = 1) -> np.ndarray:
    """First ``n`` Halton points (indices ``start, start+1, ...``) using the first ``d`` primes."""
    idx = np.arange(start, start + n, dtype=np.int64)
    return np.stack([radical_inverse(idx, b) for b in first_primes(d)], axis=1)


def rank1_lattice(n: int, g) -> np.ndarray:
    g = np.asarray(g, dtype=np.int64).reshape(-1)
    i = np.arange(n, dtype=np.int64)
    return (np.outer(i, g) % n) / n


@lru_cache(maxsize=None)
def korobov_generator(n: int, d: int) -> tuple:
    """Korobov vector ``(1, a, a^2, ...) mod n`` with ``a`` minimising exact star discrepancy."""
    if d == 1:
        return (1,)
    if n > EXACT_LIMITS.get(d, 0):
        raise InvalidArgument(
            f"no default generating vector for n={n}, d={d}; pass g explicitly")
    best = None
    for a in range(1, max(n, 2)):
        if math.gcd(a, n) != 1:
            continue
        g = tuple(pow(a, k, n) for k in range(d))
        dstar = star_discrepancy_exact(PointSet(rank1_lattice(n, g)))
        if best is None or dstar < best[0]:
            best = (dstar, g)
    if best is None:
        return (1,) * d
    return best[1]


def uniform_random(n: int, d: int, seed: int) -> np.ndarray:
    # Philox is counter-based, so the stream is fixed by the seed alone
    gen = np.random.Generator(np.random.Philox(int(seed) & (2**64 - 1)))
    return gen.random((n, d))


def centered_regular(n: int, d: int) -> np.ndarray:
    """Cell midpoints of the regular grid with ``n`` points (``n`` must be a perfect ``d``-th power)."""
    k = round(n ** (1.0 / d))
    if k ** d != n:
        raise InvalidArgument(f"centered_regular needs n to be a perfect {d}-th power, got {n}")
    axis = (2 * np.arange(1, k + 1) - 1) / (2 * k)
    grids = np.meshgrid(*[axis] * d, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


GENERATORS = ("halton", "rank1_lattice", "uniform_random", "centered_regular")


def generate(kind: str, n: int, d: int, seed: int | None = None, g=None) -> PointSet:
    n, d = int(n), int(d)
    if n < 1:
        raise InvalidArgument("n must be positive")
    if not 1 <= d <= MAX_DIM:
        raise InvalidArgument(f"dimension must be in 1..{MAX_DIM}")
    if kind == "halton":
        return PointSet(halton(n, d), f"halton(n={n} d={d})")
    if kind == "rank1_lattice":
        if g is None:
            g = korobov_generator(n, d)
        g = tuple(int(t) for t in g)
        if len(g) != d:
            raise InvalidArgument(f"generating vector must have {d} entries")
        return PointSet(rank1_lattice(n, g), f"rank1_lattice(n={n} d={d} g={'/'.join(map(str, g))})")
    if kind == "uniform_random":
        if seed is None:
            raise InvalidArgument("uniform_random needs a seed")
        return PointSet(uniform_random(n, d, seed), f"uniform_random(n={n} d={d})", int(seed))
    if kind == "centered_regular":
        return PointSet(centered_regular(n, d), f"centered_regular(n={n} d={d})")
    raise InvalidArgument(f"unknown generator {kind!r}; expected one of {GENERATORS}")


# -- discrepancy ------------------------------------------------------------

def _counts(points: np.ndarray, grids):
    """Closed and open anchored-box counts at every corner of the product grid.

    ``closed[k] = #{x <= grid[k]}`` and ``open[k] = #{x < grid[k]}``
    componentwise.
    """
    d = points.shape[1]
    shape = tuple(g.size for g in grids)
    closed_first = np.empty(points.shape, dtype=np.intp)
    open_first = np.empty(points.shape, dtype=np.intp)
    for j, g in enumerate(grids):
        closed_first[:, j] = np.searchsorted(g, points[:, j], side="left")
        open_first[:, j] = np.searchsorted(g, points[:, j], side="right")

    def cumulative(first):
        hist = np.zeros(tuple(s + 1 for s in shape), dtype=np.int64)
        np.add.at(hist, tuple(first.T), 1)
        for ax in range(d):
            hist = np.cumsum(hist, axis=ax)
        return hist[tuple(slice(0, s) for s in shape)]

    return cumulative(closed_first), cumulative(open_first)


def _volumes(grids) -> np.ndarray:
    vol = np.ones(())
    for g in grids:
        vol = np.multiply.outer(vol, g)
    return vol


def _local_max(points, grids) -> float:
    n = points.shape[0]
    closed, open_ = _counts(points, grids)
    vol = _volumes(grids)
    over = closed / n - vol
    under = vol - open_ / n
    return float(max(over.max(), under.max()))


def exact_budget_ok(n: int, d: int) -> bool:
    return n <= EXACT_LIMITS.get(d, 0)


def star_discrepancy_exact(points) -> float:
    """Exact star discrepancy by enumeration of critical corners."""
    P = points if isinstance(points, PointSet) else PointSet(points)
    if not exact_budget_ok(P.n, P.d):
        limit = EXACT_LIMITS.get(P.d)
        raise ResourceLimit(
            f"exact search for n={P.n}, d={P.d} exceeds the budget"
            + (f" (n <= {limit})" if limit else " (d <= 3 only)"),
            suggestion="use star_discrepancy_grid_bound for a certified bracket",
        )
    grids = [np.unique(np.concatenate([P.points[:, j], [1.0]])) for j in range(P.d)]
    return _local_max(P.points, grids)


def star_discrepancy_grid_bound(points, m: int) -> tuple:
    """Certified bracket ``(lower, lower + d/m)`` from the uniform grid with spacing ``1/m``."""
    P = points if isinstance(points, PointSet) else PointSet(points)
    m = int(m)
    if m < 2:
        raise InvalidArgument("grid resolution m must be at least 2")
    if (m + 1) ** P.d > _GRID_CELL_LIMIT:
        raise ResourceLimit(f"grid of {(m + 1)}^{P.d} corners is too large",
                            suggestion="reduce m")
    axis = np.arange(m + 1) / m
    lower = _local_max(P.points, [axis] * P.d)
    return lower, lower + P.d / m


@dataclass(frozen=True)
class DiscrepancyResult:
    value: float
    method: str
    lower: float
    upper: float

    def to_json(self) -> dict:
        return {"dstar": self.value, "method": self.method, "lower": self.lower, "upper": self.upper}


def star_discrepancy(points, m: int = 512) -> DiscrepancyResult:
    """Exact value within budget, else the upper end of a grid bracket.

    ``value`` is always safe to use as an upper bound.
    """
    P = points if isinstance(points, PointSet) else PointSet(points)
    if exact_budget_ok(P.n, P.d):
        v = star_discrepancy_exact(P)
        return DiscrepancyResult(v, "exact", v, v)
    while (m + 1) ** P.d > _GRID_CELL_LIMIT and m > 2:
        m //= 2
    lo, hi = star_discrepancy_grid_bound(P, m)
    return DiscrepancyResult(hi, f"grid-bound(m={m})", lo, hi)


# -- CSV --------------------------------------------------------------------

def write_csv(P: PointSet, path=None) -> str:
    buf = io.StringIO()
    header = f"# label={P.label}"
    if P.seed is not None:
        header += f", seed={P.seed}"
    buf.write(header + "\n")
    for row in P.points:
        buf.write(",".join(repr(float(v)) for v in row) + "\n")
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def read_csv(path) -> PointSet:
    label, seed, rows = Path(path).stem, None, []
    with open(path, newline="") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for item in line[1:].split(","):
                    if "=" in item:
                        key, val = item.split("=", 1)
                        key = key.strip()
                        if key == "label":
                            label = val.strip()
                        elif key == "seed":
                            seed = int(val)
                continue
            rows.append(next(csv.reader([line])))
    try:
        pts = np.array([[float(v) for v in r] for r in rows])
    except ValueError as exc:
        raise InvalidArgument(f"{path}: {exc}") from None
    if pts.size == 0 or len({len(r) for r in rows}) != 1:
        raise InvalidArgument(f"{path}: expected rows with a common number of coordinates")
    return PointSet(pts, label, seed)
