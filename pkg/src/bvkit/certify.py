"""Koksma-Hlawka certificates and reference integrals.

A certificate pairs the star discrepancy of a point set with a variation
value and records where that value came from. Only upper bounds on the
Hardy-Krause variation make the certificate *sound*; a sound certificate
whose measured error exceeds its bound is a hard failure.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .approximation import dvar_upper
from .discrepancy import PointSet, star_discrepancy
from .errors import CertifiedInequalityViolation, FamilyMismatch, InvalidArgument
from .grid import Ladder, stable_sum
from .sets import AnchoredBoxes, family_by_name
from .variation import hk_on_ladder

PROVENANCES = ("ladder-exact", "refined-lower-bound", "dvar-upper")
SOUND_PROVENANCES = ("ladder-exact", "dvar-upper")
KH_SLACK = 1e-12

_GL_NODES = (0.5 - math.sqrt(0.15), 0.5, 0.5 + math.sqrt(0.15))
_GL_WEIGHTS = (5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0)
_MAX_DEPTH = 42


# -- reference quadrature ---------------------------------------------------

def _adaptive_lines(F, n_lines: int, cells: int, tol: float):
    """Integrate ``t -> F(line, t)`` over [0, 1] for every line at once.

    Each cell is compared under 3-point Gauss-Legendre and Simpson; the two
    disagree on any cell holding a jump, so such cells are bisected until the
    disagreement drops below ``tol`` times the cell width.
    Returns ``(integrals, error_estimates)``.
    """
    total = np.zeros(n_lines)
    err = np.zeros(n_lines)
    line = np.repeat(np.arange(n_lines), cells)
    a = np.tile(np.arange(cells) / cells, n_lines)
    h = np.full(a.size, 1.0 / cells)
    for depth in range(_MAX_DEPTH + 1):
        if line.size == 0:
            break
        offsets = np.array([0.0, *_GL_NODES[:1], 0.5, *_GL_NODES[2:], 1.0])
        t = a[:, None] + h[:, None] * offsets[None, :]
        vals = F(np.repeat(line, offsets.size), t.ravel()).reshape(t.shape)
        gl = h * (_GL_WEIGHTS[0] * vals[:, 1] + _GL_WEIGHTS[1] * vals[:, 2] + _GL_WEIGHTS[2] * vals[:, 3])
        simpson = h * (vals[:, 0] + 4.0 * vals[:, 2] + vals[:, 4]) / 6.0
        gap = np.abs(gl - simpson)
        done = (gap <= tol * h) | (depth == _MAX_DEPTH)
        # bincount sums in index order, so results do not depend on batching
        total += np.bincount(line[done], weights=gl[done], minlength=n_lines)
        err += np.bincount(line[done], weights=gap[done], minlength=n_lines)
        keep = ~done
        line = np.repeat(line[keep], 2)
        h = np.repeat(h[keep] / 2.0, 2)
        a = np.repeat(a[keep], 2) + np.tile([0.0, 1.0], keep.sum()) * h
    return total, err


def reference_quadrature(f, d: int, cells: int = 1024, tol: float = 1e-10):
    """Composite quadrature of ``f`` over [0,1]^d with an error estimate.

    For ``d <= 2`` an adaptive iterated rule starts from ``cells`` cells per
    axis. For ``d > 2`` a fixed tensor 3-point Gauss-Legendre rule is used
    with about ``cells^2`` cells in total; its estimate is the Simpson gap.
    """
    d = int(d)
    if d == 1:
        vals, err = _adaptive_lines(lambda _l, t: np.asarray(f(t[:, None]), float), 1, cells, tol)
        return float(vals[0]), float(err[0])
    if d == 2:
        def outer(_lines, xs):
            inner = lambda l, t: np.asarray(f(np.column_stack([xs[l], t])), float)
            vals, errs = _adaptive_lines(inner, xs.size, cells, tol)
            outer.err_weight.append(errs)
            return vals

        outer.err_weight = []
        val, err_outer = _adaptive_lines(outer, 1, cells, tol)
        # inner errors are bounded by their worst line, times the unit outer length
        inner_err = max((float(e.max()) for e in outer.err_weight), default=0.0)
        return float(val[0]), float(err_outer[0]) + inner_err
    m = max(2, int(round(cells ** (2.0 / d))))
    nodes = (np.arange(m)[:, None] + np.array(_GL_NODES)[None, :]).ravel() / m
    w = np.tile(_GL_WEIGHTS, m) / m
    simp_nodes = np.arange(2 * m + 1) / (2 * m)
    simp_w = np.where(np.arange(2 * m + 1) % 2 == 1, 4.0, 2.0)
    simp_w[0] = simp_w[-1] = 1.0
    simp_w /= 6.0 * m
    value = _tensor(f, d, nodes, w)
    return value, abs(value - _tensor(f, d, simp_nodes, simp_w))


def _tensor(f, d, nodes, weights) -> float:
    first = np.stack(np.meshgrid(*[nodes] * (d - 1), indexing="ij"), axis=-1).reshape(-1, d - 1)
    wfirst = np.ones(1)
    for _ in range(d - 1):
        wfirst = np.multiply.outer(wfirst, weights).ravel()
    parts = []
    for k, t in enumerate(nodes):
        pts = np.column_stack([first, np.full(first.shape[0], t)])
        parts.append(weights[k] * stable_sum(wfirst * np.asarray(f(pts), float)))
    return stable_sum(parts)


@dataclass(frozen=True)
class ReferenceIntegral:
    value: float
    provenance: str
    error_estimate: float = 0.0

    def to_json(self) -> dict:
        return {"value": self.value, "provenance": self.provenance}


def reference_integral(entry, cells: int = 1024) -> ReferenceIntegral:
    """Closed-form integral of a zoo entry when known, else reference quadrature."""
    if getattr(entry, "integral", None) is not None:
        return ReferenceIntegral(float(entry.integral), "analytic")
    value, err = reference_quadrature(entry, entry.d, cells)
    return ReferenceIntegral(value, "quadrature", err)


# -- certificates -----------------------------------------------------------

def empirical_error(f, P, ref: float) -> float:
    """``|mean of f over P - ref|`` with exactly rounded summation."""
    pts = P.points if isinstance(P, PointSet) else np.asarray(P, float)
    vals = np.asarray(f(pts), float)
    return abs(stable_sum(vals) / vals.size - float(ref))


@dataclass(frozen=True)
class KHCertificate:
    function: str
    pointset: str
    n: int
    d: int
    discrepancy: float
    discrepancy_method: str
    variation: float
    provenance: str
    bound: float
    empirical_error: float
    reference: ReferenceIntegral
    sound: bool
    vacuous: bool

    def to_json(self) -> dict:
        return {
            "function": self.function,
            "pointset": self.pointset,
            "n": self.n,
            "d": self.d,
            "discrepancy": self.discrepancy,
            "variation": {"value": self.variation, "provenance": self.provenance},
            "bound": self.bound,
            "empirical_error": self.empirical_error,
            "reference": self.reference.to_json(),
            "sound": self.sound,
            "vacuous": self.vacuous,
        }

    def csv_row(self) -> list:
        return [self.function, self.pointset, self.n, self.d, repr(self.discrepancy),
                repr(self.variation), self.provenance, repr(self.bound),
                repr(self.empirical_error), str(self.sound).lower()]


CSV_COLUMNS = ["function", "pointset", "N", "d", "dstar", "variation", "provenance", "bound", "error", "sound"]


def certify(f, P: PointSet, variation: float, provenance: str, family: str = "rstar",
            reference: ReferenceIntegral | float | None = None, label: str | None = None) -> KHCertificate:
    """Bind star discrepancy and a variation value into a checked certificate.

    Raises
    ------
    FamilyMismatch
        If the variation is measured over convex sets; star discrepancy
        only controls the anchored-box variation.
    CertifiedInequalityViolation
        If the certificate is sound and the measured error exceeds the bound.
    """
    if family != "rstar":
        raise FamilyMismatch(
            f"variation over family {family!r} cannot be paired with star discrepancy; "
            "only 'rstar' certificates are supported")
    if provenance not in PROVENANCES:
        raise InvalidArgument(f"unknown provenance {provenance!r}; expected one of {PROVENANCES}")
    variation = float(variation)
    if variation < 0 or math.isnan(variation):
        raise InvalidArgument("variation must be nonnegative")
    if P.d != getattr(f, "d", P.d):
        raise InvalidArgument(f"point set has d={P.d} but the function has d={f.d}")
    if reference is None:
        reference = reference_integral(f)
    elif not isinstance(reference, ReferenceIntegral):
        reference = ReferenceIntegral(float(reference), "analytic")
    disc = star_discrepancy(P)
    bound = math.inf if math.isinf(variation) else disc.value * variation
    err = empirical_error(f, P, reference.value)
    sound = provenance in SOUND_PROVENANCES
    cert = KHCertificate(
        function=label or getattr(f, "name", "f"), pointset=P.label, n=P.n, d=P.d,
        discrepancy=disc.value, discrepancy_method=disc.method, variation=variation,
        provenance=provenance, bound=bound, empirical_error=err, reference=reference,
        sound=sound, vacuous=math.isinf(bound))
    if sound and err > bound + KH_SLACK:
        raise CertifiedInequalityViolation(
            f"{cert.function} on {cert.pointset}: error {err!r} exceeds bound {bound!r}")
    return cert


def variation_for(entry, family: str = "rstar", n_max: int = 64):
    """Variation value and provenance for a zoo entry.

    Tables and completely monotone entries have constant-sign increments on
    any ladder, so one ladder gives the exact value. Other entries go through
    :func:`dvar_upper`; uncertified values there are ladder variations of a
    tabulation and hence lower bounds.
    """
    fam = family_by_name(family, entry.d)
    if isinstance(fam, AnchoredBoxes):
        if entry.table is not None:
            return hk_on_ladder(entry.table, entry.table.ladder).hk_total, "ladder-exact"
        if entry.completely_monotone:
            return hk_on_ladder(entry, Ladder.uniform(entry.d, 4)).hk_total, "ladder-exact"
    res = dvar_upper(entry, fam, n_max=n_max)
    return res.value, "dvar-upper" if res.certified else "refined-lower-bound"


def certificates_csv(certs) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for c in certs:
        w.writerow(c.csv_row())
    return buf.getvalue()
