"""Set families: anchored boxes and (a tractable slice of) convex sets.

Convex members are intersections of half-spaces and Euclidean balls with
the unit cube. That class is closed under intersection, contains every
box, and has exact membership tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument
from .grid import MAX_DIM, BoxV, as_points


@dataclass(frozen=True)
class HalfSpace:
    """``{x : normal . x <= offset}``, or ``<`` when ``strict``."""

    normal: tuple
    offset: float
    strict: bool = False

    def __post_init__(self):
        object.__setattr__(self, "normal", tuple(float(t) for t in self.normal))
        object.__setattr__(self, "offset", float(self.offset))

    def contains(self, x: np.ndarray) -> np.ndarray:
        s = x @ np.asarray(self.normal)
        return s < self.offset if self.strict else s <= self.offset

    def to_json(self):
        return {"normal": list(self.normal), "offset": self.offset, "strict": self.strict}


@dataclass(frozen=True)
class Ball:
    center: tuple
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(t) for t in self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if self.radius < 0:
            raise InvalidArgument("radius must be nonnegative")

    def contains(self, x: np.ndarray) -> np.ndarray:
        return np.sum((x - np.asarray(self.center)) ** 2, axis=1) <= self.radius ** 2

    def to_json(self):
        return {"center": list(self.center), "radius": self.radius}


@dataclass(frozen=True)
class ConvexSet:
    """Intersection of the unit cube with half-spaces and balls."""

    d: int
    halfspaces: tuple = ()
    balls: tuple = ()

    def __post_init__(self):
        if not 1 <= self.d <= MAX_DIM:
            raise InvalidArgument(f"dimension must be in 1..{MAX_DIM}")
        hs = tuple(sorted(set(self.halfspaces), key=lambda h: (h.normal, h.offset, h.strict)))
        bs = tuple(sorted(set(self.balls), key=lambda b: (b.center, b.radius)))
        for h in hs:
            if len(h.normal) != self.d:
                raise InvalidArgument("half-space normal has the wrong dimension")
        for b in bs:
            if len(b.center) != self.d:
                raise InvalidArgument("ball center has the wrong dimension")
        object.__setattr__(self, "halfspaces", hs)
        object.__setattr__(self, "balls", bs)

    @classmethod
    def from_box(cls, box: BoxV) -> "ConvexSet":
        hs = []
        for i in range(box.d):
            e = [0.0] * box.d
            if box.a[i] > 0.0:
                e[i] = -1.0
                hs.append(HalfSpace(tuple(e), -box.a[i]))
            e = [0.0] * box.d
            e[i] = 1.0
            if i in box.closed:
                if box.b[i] < 1.0:
                    hs.append(HalfSpace(tuple(e), box.b[i]))
            else:
                hs.append(HalfSpace(tuple(e), box.b[i], strict=True))
        return cls(box.d, tuple(hs))

    @property
    def is_full(self) -> bool:
        return not self.halfspaces and not self.balls

    @property
    def is_empty(self) -> bool:
        # only the obvious certificate: some ball lies entirely outside the cube
        for b in self.balls:
            c = np.asarray(b.center)
            gap = np.maximum(np.maximum(-c, c - 1.0), 0.0)
            if np.sqrt(np.sum(gap ** 2)) > b.radius:
                return True
        return False

    def contains(self, pts) -> np.ndarray:
        x = as_points(pts, self.d)
        inside = np.all((x >= 0.0) & (x <= 1.0), axis=1)
        for h in self.halfspaces:
            inside &= h.contains(x)
        for b in self.balls:
            inside &= b.contains(x)
        return inside

    def intersect(self, other: "ConvexSet") -> "ConvexSet":
        return ConvexSet(self.d, self.halfspaces + other.halfspaces, self.balls + other.balls)

    def to_json(self) -> dict:
        return {
            "kind": "convex",
            "d": self.d,
            "halfspaces": [h.to_json() for h in self.halfspaces],
            "discs": [b.to_json() for b in self.balls],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ConvexSet":
        hs = tuple(HalfSpace(tuple(h["normal"]), h["offset"], h.get("strict", False))
                   for h in obj.get("halfspaces", []))
        bs = tuple(Ball(tuple(b["center"]), b["radius"]) for b in obj.get("discs", []))
        return cls(int(obj["d"]), hs, bs)


@dataclass(frozen=True)
class Complement:
    """``[0,1]^d`` minus a family member; counts once towards Harman complexity."""

    inner: object

    @property
    def d(self) -> int:
        return self.inner.d

    def contains(self, pts) -> np.ndarray:
        return ~self.inner.contains(pts)


@dataclass(frozen=True)
class AlgebraicSum:
    """A set given by ``1_A = sum(1_{plus}) - sum(1_{minus})``.

    The identity is the caller's claim; :meth:`verify` samples it.
    """

    plus: tuple
    minus: tuple = ()

    @property
    def d(self) -> int:
        return (self.plus + self.minus)[0].d

    def indicator_sum(self, pts) -> np.ndarray:
        total = np.zeros(as_points(pts).shape[0])
        for s in self.plus:
            total += s.contains(pts)
        for s in self.minus:
            total -= s.contains(pts)
        return total

    def contains(self, pts) -> np.ndarray:
        return self.indicator_sum(pts) == 1.0

    def verify(self, pts) -> bool:
        v = self.indicator_sum(pts)
        return bool(np.all((v == 0.0) | (v == 1.0)))


# -- families -------------------------------------------------------------

class SetFamily:
    name = "abstract"
    closed_under_intersection = False

    def __init__(self, d: int):
        if not 1 <= d <= MAX_DIM:
            raise InvalidArgument(f"dimension must be in 1..{MAX_DIM}")
        self.d = d

    def __eq__(self, other):
        return type(self) is type(other) and self.d == other.d

    def __hash__(self):
        return hash((self.name, self.d))

    def __repr__(self):
        return f"{type(self).__name__}(d={self.d})"

    def accepts(self, member) -> bool:
        raise NotImplementedError

    def full(self):
        raise NotImplementedError

    def empty(self):
        raise NotImplementedError

    def intersect(self, s, t):
        raise NotImplementedError

    def is_full(self, member) -> bool:
        return bool(getattr(member, "is_full", False))

    def is_empty(self, member) -> bool:
        return bool(getattr(member, "is_empty", False))


class AnchoredBoxes(SetFamily):
    """Boxes ``[0, b]`` with per-axis closedness at ``b``."""

    name = "rstar"
    closed_under_intersection = True

    def accepts(self, member) -> bool:
        return isinstance(member, BoxV) and member.d == self.d and member.is_anchored

    def full(self):
        return BoxV.anchored((1.0,) * self.d, range(self.d))

    def empty(self):
        return BoxV.anchored((0.0,) * self.d, ())

    def intersect(self, s, t):
        return s.intersect(t)


class ConvexSets(SetFamily):
    """Convex sets: boxes, polytopes, balls and their intersections."""

    name = "k"
    closed_under_intersection = True

    def accepts(self, member) -> bool:
        return isinstance(member, (BoxV, ConvexSet)) and member.d == self.d

    def full(self):
        return ConvexSet(self.d)

    def empty(self):
        return BoxV.anchored((0.0,) * self.d, ())

    def intersect(self, s, t):
        if isinstance(s, BoxV) and isinstance(t, BoxV):
            return s.intersect(t)
        if isinstance(s, BoxV):
            s = ConvexSet.from_box(s)
        if isinstance(t, BoxV):
            t = ConvexSet.from_box(t)
        return s.intersect(t)


FAMILIES = {"rstar": AnchoredBoxes, "k": ConvexSets}


def family_by_name(name: str, d: int) -> SetFamily:
    try:
        return FAMILIES[name](d)
    except KeyError:
        raise InvalidArgument(f"unknown set family {name!r}; expected one of {sorted(FAMILIES)}") from None


def set_to_json(member) -> dict:
    return member.to_json()


def set_from_json(obj: dict):
    kind = obj.get("kind")
    if kind == "box":
        return BoxV.from_json(obj)
    if kind == "convex":
        return ConvexSet.from_json(obj)
    raise InvalidArgument(f"unknown set kind {kind!r}")
