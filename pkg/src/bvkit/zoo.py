"""Named test functions with known structure.

Each entry knows its monotonicity class, whether its Hardy-Krause and
convex-set variations are bounded, and (where available) its integral and
Hardy-Krause variation in closed form. Flags are the closed-form truth;
:func:`get` also runs the necessary-condition checks from the variation
module on a 16-cell ladder and refuses entries that fail them.

Function descriptors (see :func:`get`)::

    prod  linear  expsum  halfplane
    box:a=0.3,0.7           indicator of the closed anchored box [0, a]
    disc:c=0.5,0.5;r=0.3    indicator of a closed disc (d = 2)
    step1d:j=0.5            1 for x >= j (d = 1)
    table:path.json         tabulated step function {"ladder": ..., "values": ...}
    random:cells=4;seed=7   seeded random table on a uniform ladder
"""

from __future__ import annotations

import difflib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy import integrate

from .errors import InvalidArgument, NotFound
from .grid import MAX_DIM, BoxV, Ladder, TabulatedFunction, as_points
from .sets import AnchoredBoxes, Ball, ConvexSet, ConvexSets, HalfSpace, SetFamily
from .simple import SimpleFunction
from .variation import hk_on_ladder, is_completely_monotone

CHECK_CELLS = 16


@dataclass
class ZooEntry:
    name: str
    d: int
    evaluator: Callable = field(repr=False)
    completely_monotone: bool
    bounded_hk: bool
    bounded_k: bool
    integral: float | None = None
    hk: float | None = None
    sup: float | None = None
    representations: dict = field(default_factory=dict, repr=False)
    table: TabulatedFunction | None = field(default=None, repr=False)

    def __call__(self, pts) -> np.ndarray:
        return np.asarray(self.evaluator(as_points(pts, self.d)), dtype=float)

    def representation(self, family: SetFamily):
        """Exact simple-function form in ``family``, if the entry has one."""
        if family.d != self.d:
            return None
        if self.table is not None:
            return self.table.representation(family)
        build = self.representations.get(family.name)
        return build(family) if build else None

    def sup_norm(self):
        return self.sup


def _indicator_rep(member_fn):
    def build(family):
        return SimpleFunction(family, [(1.0, member_fn(family.d))])
    return build


def _prod(d):
    return ZooEntry(
        "prod", d, lambda x: np.prod(x, axis=1),
        completely_monotone=True, bounded_hk=True, bounded_k=True,
        integral=2.0 ** -d, hk=2.0 ** d - 1.0, sup=1.0)


def _linear(d):
    return ZooEntry(
        "linear", d, lambda x: np.sum(x, axis=1) / d,
        completely_monotone=True, bounded_hk=True, bounded_k=True,
        integral=0.5, hk=1.0, sup=1.0)


def _expsum(d):
    r = 1.0 - math.exp(-1.0)
    return ZooEntry(
        "expsum", d, lambda x: np.exp(np.sum(x, axis=1) - d),
        completely_monotone=True, bounded_hk=True, bounded_k=True,
        integral=r ** d, hk=(1.0 + r) ** d - 1.0, sup=1.0)


def _box(a):
    a = tuple(float(t) for t in a)
    d = len(a)
    box = BoxV.anchored(a, range(d))
    trivial = box.is_full
    return ZooEntry(
        "box:a=" + ",".join(repr(t) for t in a), d, box.contains,
        completely_monotone=trivial, bounded_hk=True, bounded_k=True,
        integral=float(np.prod(a)), hk=0.0 if trivial or box.is_empty else 1.0, sup=1.0,
        representations={"rstar": _indicator_rep(lambda _d: box), "k": _indicator_rep(lambda _d: box)})


def _halfplane(d):
    if d != 2:
        raise InvalidArgument("halfplane is defined for d = 2")
    member = ConvexSet(2, (HalfSpace((-1.0, 1.0), 0.0, strict=True),))
    return ZooEntry(
        "halfplane", 2, lambda x: (x[:, 0] > x[:, 1]).astype(float),
        completely_monotone=False, bounded_hk=False, bounded_k=True,
        integral=0.5, hk=math.inf, sup=1.0,
        representations={"k": _indicator_rep(lambda _d: member)})


def disc_area(c, r) -> float:
    """Area of a closed disc intersected with the unit square."""
    cx, cy = c

    def chord(x):
        h = math.sqrt(max(r * r - (x - cx) ** 2, 0.0))
        return max(0.0, min(1.0, cy + h) - max(0.0, cy - h))

    lo, hi = max(0.0, cx - r), min(1.0, cx + r)
    if lo >= hi:
        return 0.0
    pts = sorted({lo, hi, *[p for p in (cx, cx - math.sqrt(max(r * r - cy * cy, 0)),
                                        cx + math.sqrt(max(r * r - cy * cy, 0)),
                                        cx - math.sqrt(max(r * r - (1 - cy) ** 2, 0)),
                                        cx + math.sqrt(max(r * r - (1 - cy) ** 2, 0)))
                                 if lo < p < hi]})
    total = 0.0
    for p, q in zip(pts, pts[1:]):
        val, _ = integrate.quad(chord, p, q, epsabs=1e-13, epsrel=1e-13, limit=200)
        total += val
    return total


def _disc(c, r):
    c = tuple(float(t) for t in c)
    if len(c) != 2:
        raise InvalidArgument("disc needs a 2-d center")
    ball = Ball(c, float(r))
    member = ConvexSet(2, (), (ball,))
    return ZooEntry(
        f"disc:c={c[0]!r},{c[1]!r};r={float(r)!r}", 2, ball.contains,
        completely_monotone=False, bounded_hk=False, bounded_k=True,
        integral=disc_area(c, float(r)), hk=math.inf, sup=1.0,
        representations={"k": _indicator_rep(lambda _d: member)})


def _step1d(j):
    j = float(j)
    if not 0.0 < j <= 1.0:
        raise InvalidArgument("step1d needs a jump location in (0, 1]")
    # 1_{x >= j} = 1_[0,1] - 1_[0,j)
    def rep(family):
        return SimpleFunction(family, [(1.0, family.full()), (-1.0, BoxV.anchored((j,)))])
    return ZooEntry(
        f"step1d:j={j!r}", 1, lambda x: (x[:, 0] >= j).astype(float),
        completely_monotone=True, bounded_hk=True, bounded_k=True,
        integral=1.0 - j, hk=1.0, sup=1.0,
        representations={"rstar": rep, "k": rep})


def from_table(table: TabulatedFunction, name: str = "table") -> ZooEntry:
    values = table.values
    cm = is_completely_monotone(table, table.ladder).ok
    return ZooEntry(
        name, table.d, table,
        completely_monotone=cm, bounded_hk=True, bounded_k=True,
        integral=table.integral(), hk=hk_on_ladder(table, table.ladder).hk_total,
        sup=float(np.max(np.abs(values))), table=table)


RANDOM_TABLE_RESOLUTION = 2.0 ** -30


def random_table(d: int, cells: int = 4, seed: int = 0, ladder: Ladder | None = None) -> TabulatedFunction:
    """Seeded values in [-1, 1] on the closed grid of ``ladder``.

    Values are multiples of ``2**-30``, so sums and differences of a few
    thousand of them are exact in double precision.
    """
    ladder = ladder or Ladder.uniform(d, cells)
    gen = np.random.Generator(np.random.Philox(int(seed)))
    raw = gen.uniform(-1.0, 1.0, size=tuple(k + 1 for k in ladder.cells_per_axis))
    values = np.round(raw / RANDOM_TABLE_RESOLUTION) * RANDOM_TABLE_RESOLUTION
    return TabulatedFunction(ladder, values, f"random:cells={cells};seed={seed}")


_BUILDERS = {
    "prod": lambda d, p: _prod(d),
    "linear": lambda d, p: _linear(d),
    "expsum": lambda d, p: _expsum(d),
    "halfplane": lambda d, p: _halfplane(d),
    "box": lambda d, p: _box(p.get("a") or [0.5] * d),
    "anchored_box": lambda d, p: _box(p.get("a") or [0.5] * d),
    "disc": lambda d, p: _disc(p.get("c", [0.5, 0.5]), p.get("r", [0.3])[0]),
    "step1d": lambda d, p: _step1d(p.get("j", [0.5])[0]),
    "random": lambda d, p: from_table(
        random_table(d, int(p.get("cells", [4])[0]), int(p.get("seed", [0])[0])),
        "random:cells={};seed={}".format(int(p.get("cells", [4])[0]), int(p.get("seed", [0])[0]))),
}


def names() -> list:
    return ["prod", "linear", "expsum", "anchored_box", "halfplane", "disc", "step1d", "table", "random"]


list_names = names


def _parse_params(text: str) -> dict:
    params = {}
    if not text:
        return params
    for item in text.split(";"):
        if not item.strip():
            continue
        if "=" not in item:
            raise InvalidArgument(f"malformed parameter {item!r}; expected key=value")
        key, val = item.split("=", 1)
        try:
            params[key.strip()] = [float(v) for v in val.split(",")]
        except ValueError:
            raise InvalidArgument(f"parameter {key.strip()!r} must be numeric") from None
    return params


def verify_flags(entry: ZooEntry, cells: int = CHECK_CELLS) -> None:
    """Necessary-condition checks of the declared flags on a uniform ladder."""
    ladder = entry.table.ladder if entry.table is not None else Ladder.uniform(entry.d, cells)
    res = is_completely_monotone(entry, ladder)
    if entry.completely_monotone and not res.ok:
        raise InvalidArgument(f"{entry.name}: declared completely monotone but {res.witness}")
    if not entry.completely_monotone and res.ok:
        raise InvalidArgument(f"{entry.name}: declared not completely monotone but no witness found")
    if entry.hk is not None and math.isfinite(entry.hk):
        found = hk_on_ladder(entry, ladder).hk_total
        if found > entry.hk + 1e-9 * (1.0 + entry.hk):
            raise InvalidArgument(f"{entry.name}: ladder variation {found} exceeds declared HK {entry.hk}")


def get(text: str, d: int = 2, verify: bool = True) -> ZooEntry:
    """Build a zoo entry from a function descriptor; unknown names suggest close matches."""
    text = text.strip()
    if not 1 <= d <= MAX_DIM:
        raise InvalidArgument(f"dimension must be in 1..{MAX_DIM}")
    name, _, rest = text.partition(":")
    if name == "table":
        path = Path(rest)
        if not path.is_file():
            raise NotFound(f"table file {rest!r} not found")
        entry = from_table(TabulatedFunction.from_json(json.loads(path.read_text()), path.stem),
                           f"table:{rest}")
    elif name in _BUILDERS:
        entry = _BUILDERS[name](d, _parse_params(rest))
    else:
        close = difflib.get_close_matches(name, names(), n=3)
        hint = f"; did you mean {', '.join(close)}?" if close else f"; known: {', '.join(names())}"
        raise NotFound(f"unknown function {name!r}{hint}")
    if verify:
        verify_flags(entry)
    return entry


def family_for(name: str, d: int) -> SetFamily:
    return {"rstar": AnchoredBoxes, "k": ConvexSets}[name](d)
