"""Simple functions over a set family and their complexity accounting.

A :class:`SimpleFunction` is a finite list of ``(alpha, set)`` terms. The
representation is not unique and nothing here searches for a better one:
variation figures are computed from the stored terms after merging
identical sets, which always gives an upper bound on the infimum over all
representations.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, UnsupportedOperation
from .grid import BoxV, as_points, stable_sum
from .sets import AlgebraicSum, Complement, SetFamily, family_by_name, set_from_json

# dense suffix-sum tables larger than this fall back to direct membership tests
_MAX_INDEX_CELLS = 4_000_000
_CHUNK = 2048


class SimpleFunction:
    def __init__(self, family: SetFamily, terms=()):
        terms = tuple((float(alpha), s) for alpha, s in terms)
        for _, s in terms:
            if not family.accepts(s):
                raise InvalidArgument(f"{s!r} is not a member of {family!r}")
        self.family = family
        self.terms = terms
        self.d = family.d
        self._index = None

    def __repr__(self):
        return f"SimpleFunction({self.family!r}, {len(self.terms)} terms)"

    def __len__(self):
        return len(self.terms)

    # -- evaluation -------------------------------------------------------

    def __call__(self, pts) -> np.ndarray:
        x = as_points(pts, self.d)
        if not self.terms:
            return np.zeros(x.shape[0])
        if all(isinstance(s, BoxV) and s.is_anchored for _, s in self.terms):
            index = self._anchored_index()
            if index is not None:
                return index.evaluate(x)
        return self._evaluate_direct(x)

    eval = __call__

    def _evaluate_direct(self, x: np.ndarray) -> np.ndarray:
        out = np.zeros(x.shape[0])
        for alpha, s in self.terms:
            out += alpha * s.contains(x)
        return out

    def _anchored_index(self):
        if self._index is None:
            self._index = _AnchoredIndex.build(self.terms, self.d) or False
        return self._index or None

    # -- algebra ----------------------------------------------------------

    def _check_family(self, other: "SimpleFunction"):
        if other.family != self.family:
            raise InvalidArgument(f"family mismatch: {self.family!r} vs {other.family!r}")

    def __add__(self, other: "SimpleFunction") -> "SimpleFunction":
        self._check_family(other)
        return SimpleFunction(self.family, self.terms + other.terms)

    def __neg__(self):
        return self.scale(-1.0)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: float) -> "SimpleFunction":
        return SimpleFunction(self.family, [(c * a, s) for a, s in self.terms])

    def __mul__(self, other):
        if isinstance(other, SimpleFunction):
            return multiply(self, other)
        return self.scale(float(other))

    __rmul__ = __mul__

    def merged(self) -> "SimpleFunction":
        """Sum the coefficients of structurally identical sets; drop zeros and empty sets."""
        acc = OrderedDict()
        for alpha, s in self.terms:
            if self.family.is_empty(s):
                continue
            acc[s] = acc.get(s, 0.0) + alpha
        return SimpleFunction(self.family, [(a, s) for s, a in acc.items() if a != 0.0])

    # -- norms ------------------------------------------------------------

    def sup_norm(self, samples=None) -> float:
        """Exact for anchored boxes; otherwise a maximum over ``samples`` (a sampled value)."""
        if all(isinstance(s, BoxV) and s.is_anchored for _, s in self.terms):
            index = self._anchored_index()
            if index is not None:
                return index.sup_norm()
        if samples is None:
            from .discrepancy import halton

            samples = np.vstack([halton(1 << 14, self.d), _corners(self.d)])
        return float(np.max(np.abs(self(samples))))

    def inf_abs(self, samples=None) -> float:
        if all(isinstance(s, BoxV) and s.is_anchored for _, s in self.terms):
            index = self._anchored_index()
            if index is not None:
                return index.inf_abs()
        if samples is None:
            from .discrepancy import halton

            samples = np.vstack([halton(1 << 14, self.d), _corners(self.d)])
        return float(np.min(np.abs(self(samples))))

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "family": self.family.name,
            "d": self.d,
            "terms": [{"alpha": a, "set": s.to_json()} for a, s in self.terms],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SimpleFunction":
        family = family_by_name(obj["family"], int(obj["d"]))
        return cls(family, [(t["alpha"], set_from_json(t["set"])) for t in obj["terms"]])


def _corners(d: int) -> np.ndarray:
    return np.array(np.meshgrid(*[[0.0, 1.0]] * d, indexing="ij")).reshape(d, -1).T


def multiply(s: SimpleFunction, t: SimpleFunction) -> SimpleFunction:
    """Pointwise product via ``1_A 1_B = 1_{A cap B}``."""
    s._check_family(t)
    fam = s.family
    if not fam.closed_under_intersection:
        raise UnsupportedOperation(f"{fam!r} is not closed under intersection")
    terms = []
    for a, A in s.terms:
        for b, B in t.terms:
            C = fam.intersect(A, B)
            if not fam.is_empty(C):
                terms.append((a * b, C))
    return SimpleFunction(fam, terms)


def add(s: SimpleFunction, t: SimpleFunction) -> SimpleFunction:
    return s + t


def scale(c: float, s: SimpleFunction) -> SimpleFunction:
    return s.scale(c)


def harman_complexity_upper(member, family: SetFamily) -> int:
    """Upper bound on the Harman complexity of a set.

    Exact at 0 for the empty set and the full cube, and at 1 for any other
    recognised member or complement of a member. For an algebraic sum the
    length of the given representation is returned. Emptiness of general
    convex sets is only detected in obvious cases, so a set that is
    secretly empty may be charged 1.
    """
    if isinstance(member, Complement):
        inner = member.inner
        if not family.accepts(inner):
            raise InvalidArgument(f"complement of a non-member of {family!r}")
        return 0 if family.is_full(inner) or family.is_empty(inner) else 1
    if isinstance(member, AlgebraicSum):
        parts = member.plus + member.minus
        if len(parts) == 1:
            return harman_complexity_upper(parts[0], family)
        return len(parts)
    if not family.accepts(member):
        raise InvalidArgument(f"{member!r} is not a member of {family!r}")
    if family.is_full(member) or family.is_empty(member):
        return 0
    return 1


@dataclass(frozen=True)
class ComplexityAccount:
    complexities: tuple
    vs_upper: float


def complexity_account(s: SimpleFunction, merge: bool = True) -> ComplexityAccount:
    rep = s.merged() if merge else s
    hs = tuple(harman_complexity_upper(A, rep.family) for _, A in rep.terms)
    total = stable_sum([abs(a) * h for (a, _), h in zip(rep.terms, hs)])
    return ComplexityAccount(hs, total)


def vs_upper(s: SimpleFunction, merge: bool = True) -> float:
    """Complexity-weighted coefficient sum of the (merged) stored representation."""
    return complexity_account(s, merge).vs_upper


class _AnchoredIndex:
    """Dominance-sum table for simple functions over anchored boxes.

    On each axis the distinct upper ends ``(b, closed)`` form a nested
    chain ``[0,b) < [0,b] < [0,b')``. A point's position on that chain is
    the first threshold containing it, and a term contains the point iff its
    threshold index is at least the point's on every axis. Suffix sums of
    the coefficient table therefore give the function value by lookup.
    """

    def __init__(self, bs, closed, table):
        self.bs = bs
        self.closed = closed
        self.table = table

    @classmethod
    def build(cls, terms, d):
        keys = [sorted({(s.b[j], j in s.closed) for _, s in terms}) for j in range(d)]
        size = 1
        for k in keys:
            size *= len(k) + 1
        if size > _MAX_INDEX_CELLS:
            return None
        pos = [{key: i for i, key in enumerate(k)} for k in keys]
        coef = np.zeros(tuple(len(k) + 1 for k in keys))
        for alpha, s in terms:
            idx = tuple(pos[j][(s.b[j], j in s.closed)] for j in range(d))
            coef[idx] += alpha
        table = coef
        for ax in range(d):
            table = np.flip(np.cumsum(np.flip(table, axis=ax), axis=ax), axis=ax)
        bs = [np.array([b for b, _ in k]) for k in keys]
        closed = [np.array([c for _, c in k], dtype=bool) for k in keys]
        return cls(bs, closed, table)

    def positions(self, x: np.ndarray) -> np.ndarray:
        out = np.empty(x.shape, dtype=np.intp)
        for j in range(x.shape[1]):
            bs, cl = self.bs[j], self.closed[j]
            p = np.searchsorted(bs, x[:, j], side="left")
            # an open threshold at exactly x does not contain x
            inb = p < bs.size
            hit = np.zeros_like(inb)
            hit[inb] = (bs[p[inb]] == x[inb, j]) & ~cl[p[inb]]
            out[:, j] = p + hit
        return out

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return self.table[tuple(self.positions(x).T)]

    def _nonempty(self):
        masks = []
        for bs, cl in zip(self.bs, self.closed):
            m = np.ones(bs.size + 1, dtype=bool)
            if bs.size and bs[0] == 0.0 and not cl[0]:
                m[0] = False
            if bs.size and bs[-1] == 1.0 and cl[-1]:
                m[-1] = False
            masks.append(m)
        grid = masks[0]
        for m in masks[1:]:
            grid = np.multiply.outer(grid, m)
        return grid

    def sup_norm(self) -> float:
        vals = np.abs(self.table[self._nonempty()])
        return float(vals.max()) if vals.size else 0.0

    def inf_abs(self) -> float:
        vals = np.abs(self.table[self._nonempty()])
        return float(vals.min()) if vals.size else 0.0


def mixed_differences(values: np.ndarray) -> np.ndarray:
    """``c[k] = sum_s (-1)^|s| values[k + e_s]`` with values beyond the last index taken as 0."""
    coef = values
    for ax in range(values.ndim):
        shifted = np.zeros_like(coef)
        src = [slice(None)] * values.ndim
        dst = [slice(None)] * values.ndim
        src[ax] = slice(1, None)
        dst[ax] = slice(0, -1)
        shifted[tuple(dst)] = coef[tuple(src)]
        coef = coef - shifted
    return coef


def table_to_simple(table, family: SetFamily) -> SimpleFunction:
    """Exact anchored-box representation of a tabulated step function.

    Along each axis the cells ``[y_l, y_{l+1})`` and the point ``{1}`` are
    differences of the nested boxes ``[0,y_2), ..., [0,y_K), [0,1), [0,1]``.
    """
    d = table.d
    ends, closed = [], []
    for j in range(d):
        grid = table.ladder.closed_axis(j)
        ends.append(np.concatenate([grid[1:], [1.0]]))
        closed.append(np.array([False] * (grid.size - 1) + [True]))
    coef = mixed_differences(table.values)
    terms = []
    for idx in zip(*np.nonzero(coef)):
        b = tuple(float(ends[j][k]) for j, k in enumerate(idx))
        cl = frozenset(j for j, k in enumerate(idx) if closed[j][k])
        terms.append((float(coef[idx]), BoxV.anchored(b, cl)))
    return SimpleFunction(family, terms)
