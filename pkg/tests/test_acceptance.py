"""Acceptance criteria, one check per criterion at its stated tolerance.

Run with pytest (results appear in the terminal summary) or directly:
``python tests/test_acceptance.py``.
"""

import math
import subprocess
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bvkit import zoo  # noqa: E402
from bvkit.approximation import banach_norm, dvar_upper, chain_check, monotone_approximate  # noqa: E402
from bvkit.certify import certify, reference_integral, variation_for  # noqa: E402
from bvkit.discrepancy import PointSet, centered_regular, generate, halton, star_discrepancy_exact  # noqa: E402
from bvkit.grid import Ladder, TabulatedFunction  # noqa: E402
from bvkit.sets import AnchoredBoxes, ConvexSets  # noqa: E402
from bvkit.simple import vs_upper  # noqa: E402
from bvkit.variation import hk_on_ladder, hk_refined, leonov_decompose  # noqa: E402
from oracles import hk_brute, local_discrepancy_sweep  # noqa: E402

SEED = 20240611


def _random_ladder(rng, d, cells):
    return Ladder(tuple(tuple([0.0] + sorted(rng.uniform(0.01, 0.99, cells - 1).tolist())) for _ in range(d)))


class _NoRepresentation:
    """Wraps a zoo entry, hiding its exact representation so the approximation route is used."""

    def __init__(self, entry):
        self.entry, self.d = entry, entry.d
        self.completely_monotone = entry.completely_monotone

    def __call__(self, x):
        return self.entry(x)


def criterion_1():
    rng = np.random.default_rng(SEED)
    t0 = time.perf_counter()
    worst = 0.0
    for d, exact in ((2, 3.0), (3, 7.0)):
        for _ in range(5):
            L = _random_ladder(rng, d, int(rng.integers(1, 9)))
            worst = max(worst, abs(hk_on_ladder(zoo.get("prod", d, verify=False), L).hk_total - exact))
        worst = max(worst, abs(hk_on_ladder(zoo.get("prod", d, verify=False), Ladder.uniform(d, 16)).hk_total - exact))
    elapsed = time.perf_counter() - t0
    brute = hk_brute(lambda x: np.prod(x, axis=1), Ladder.uniform(3, 16).axes)
    ok = worst <= 1e-9 and elapsed < 1.0 and abs(brute - 7.0) <= 1e-9
    return ok, f"max |hk - closed form| = {worst:.2e}, brute force 16^3 = {brute!r}, {elapsed:.3f}s"


def criterion_2():
    t0 = time.perf_counter()
    worst_ratio = 0.0
    ok = True
    for name, d in (("prod", 1), ("prod", 2), ("prod", 3), ("expsum", 2), ("step1d:j=0.5", 1)):
        e = zoo.get(name, d)
        x = halton(10_000, d)
        fx = e(x)
        for n in (1, 2, 4, 8, 16):
            err = float(np.max(np.abs(fx - monotone_approximate(e, n)(x))))
            ok &= err <= d / n + 1e-12
            worst_ratio = max(worst_ratio, err / (d / n))
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 30.0
    return ok, f"max error / (d/n) = {worst_ratio:.3f}, {elapsed:.2f}s"


def criterion_3():
    parts = []
    ok = True
    for name, d, exact in (("prod", 2, 3.0), ("step1d:j=0.5", 1, 1.0)):
        e = zoo.get(name, d)
        for label, f in (("approximants", _NoRepresentation(e)), ("any", e)):
            upper = min(t["vs_upper"] for t in dvar_upper(f, AnchoredBoxes(d), n_max=64).trace)
            lower = hk_refined(e, Ladder.uniform(d, 2)).hk_total
            gap = upper - lower
            ok &= gap <= 0.05 and lower - 1e-9 <= exact <= upper + 1e-9
            parts.append(f"{name}/{label}: [{lower:.6g}, {upper:.6g}]")
    return ok, "; ".join(parts)


def criterion_4():
    t0 = time.perf_counter()
    functions = [("prod", 2), ("linear", 2), ("box:a=0.3,0.7", 2), ("expsum", 2),
                 ("prod", 1), ("linear", 1), ("expsum", 1)]
    count = violations = 0
    for name, d in functions:
        e = zoo.get(name, d)
        var, prov = variation_for(e)
        ref = reference_integral(e)
        for kind in ("halton", "rank1_lattice", "centered_regular"):
            for n in (16, 64, 256):
                P = generate(kind, n, d)
                D = star_discrepancy_exact(P)
                cert = certify(e, P, var, prov, reference=ref)
                assert cert.sound and cert.discrepancy == D
                count += 1
                violations += cert.empirical_error > D * var + 1e-12
    elapsed = time.perf_counter() - t0
    return violations == 0 and elapsed < 120, f"{count} certificates, {violations} violations, {elapsed:.1f}s"


def criterion_5():
    rng = np.random.default_rng(SEED)
    sigma = 3.0
    violations = 0
    worst = -math.inf
    for _ in range(200):
        L = _random_ladder(rng, 2, 4)
        f = TabulatedFunction(L, rng.uniform(-1, 1, (5, 5)))
        g = TabulatedFunction(L, rng.uniform(-1, 1, (5, 5)))
        norm = lambda h: banach_norm(h, sigma, hk_on_ladder(h, L).hk_total)
        slack = norm(f * g) - norm(f) * norm(g)
        worst = max(worst, slack)
        violations += slack > 1e-9
    return violations == 0, f"200 pairs, {violations} violations, max(||fg|| - ||f|| ||g||) = {worst:.3f}"


def criterion_6():
    rng = np.random.default_rng(SEED + 6)
    worst_tri = worst_hom = 0.0
    for _ in range(500):
        L = _random_ladder(rng, 2, int(rng.integers(1, 6)))
        shape = tuple(k + 1 for k in L.cells_per_axis)
        f = TabulatedFunction(L, rng.uniform(-1, 1, shape))
        g = TabulatedFunction(L, rng.uniform(-1, 1, shape))
        c = float(rng.normal())
        hk = lambda h: hk_on_ladder(h, L).hk_total
        worst_tri = max(worst_tri, hk(f + g) - hk(f) - hk(g))
        worst_hom = max(worst_hom, abs(hk(f.scaled(c)) - abs(c) * hk(f)))
        fam = AnchoredBoxes(2)
        s, t = f.representation(fam), g.representation(fam)
        worst_tri = max(worst_tri, vs_upper(s + t) - vs_upper(s) - vs_upper(t))
        worst_hom = max(worst_hom, abs(vs_upper(s.scale(c)) - abs(c) * vs_upper(s)))
    ok = worst_tri <= 1e-12 and worst_hom <= 1e-12
    return ok, f"triangle excess {worst_tri:.1e}, homogeneity gap {worst_hom:.1e}"


def criterion_7():
    t0 = time.perf_counter()
    hp = zoo.get("halfplane", 2)
    rep = hk_refined(hp, Ladder.uniform(2, 1), max_refine=6)
    totals = {cells[0]: v for cells, v in rep.trace}
    values = list(totals.values())
    increasing = all(p < q for p, q in zip(values, values[1:]))
    kvar = dvar_upper(hp, ConvexSets(2)).value
    elapsed = time.perf_counter() - t0
    ok = increasing and len(rep.trace) == 7 and totals[64] > 10 and not rep.converged and kvar == 1 and elapsed < 30
    return ok, f"trace {values}, convex variation {kvar}, {elapsed:.2f}s"


def criterion_8():
    rng = np.random.default_rng(SEED + 8)
    m = 512
    worst = 0.0
    ok = True
    for k in range(50):
        d = 1 + k % 2
        P = rng.random((int(rng.integers(1, 41)), d))
        exact = star_discrepancy_exact(P)
        sweep = local_discrepancy_sweep(P, m)
        ok &= sweep - 1e-15 <= exact <= sweep + d / m
        worst = max(worst, (exact - sweep) / (d / m))
    centered = [star_discrepancy_exact(PointSet(centered_regular(n, 1))) == 1 / (2 * n) for n in (1, 2, 4, 8, 16)]
    ok &= all(centered)
    return ok, f"50 sets, max (exact - sweep)/(d/m) = {worst:.3f}; centered 1/(2N) exact: {all(centered)}"


def criterion_9():
    inexact = not_cm = 0
    for seed in range(100):
        t = zoo.random_table(2, 4, seed=SEED + seed)
        dec = leonov_decompose(t, t.ladder)
        inexact += not np.array_equal(dec.f_plus.values - dec.f_minus.values, t.values)
        not_cm += not (dec.plus_check.ok and dec.minus_check.ok)
    rng = np.random.default_rng(SEED + 9)
    f = zoo.get("prod", 3)
    chain_fail = 0
    for _ in range(1000):
        i, j = rng.choice(3, 2, replace=False)
        chain_fail += not chain_check(f, rng.random(3), rng.random(3), int(i), int(j))
    ok = inexact == 0 and not_cm == 0 and chain_fail == 0
    return ok, f"100 tables: {inexact} inexact, {not_cm} not monotone; chain inequality failures {chain_fail}/1000"


def criterion_10():
    outputs = []
    with tempfile.TemporaryDirectory() as tmp:
        for run, threads in enumerate((1, 1, 4, 4)):
            out = Path(tmp) / f"run{run}"
            proc = subprocess.run([sys.executable, "-m", "bvkit.cli", "suite", "--out", str(out),
                                   "--seed", "7", "--threads", str(threads)], capture_output=True, text=True)
            if proc.returncode != 0:
                return False, proc.stderr.strip()
            outputs.append((out / "kh_suite.csv").read_bytes())
    same = all(o == outputs[0] for o in outputs)
    return same, f"4 runs (threads 1,1,4,4): {'byte-identical' if same else 'DIFFER'}, {len(outputs[0])} bytes"


CRITERIA = {
    1: ("closed-form Hardy-Krause values", criterion_1),
    2: ("monotone approximation error <= d/n", criterion_2),
    3: ("two-sided variation bracket", criterion_3),
    4: ("Koksma-Hlawka inequality over the suite grid", criterion_4),
    5: ("submultiplicative norm", criterion_5),
    6: ("seminorm at ladder level", criterion_6),
    7: ("half-plane divergence", criterion_7),
    8: ("discrepancy oracle agreement", criterion_8),
    9: ("monotone decomposition and chain inequality", criterion_9),
    10: ("suite determinism", criterion_10),
}


def _line(num, ok, detail):
    return f"criterion {num:2d} {'PASS' if ok else 'FAIL'}  {CRITERIA[num][0]}: {detail}"


@pytest.mark.parametrize("num", sorted(CRITERIA))
def test_criterion(num):
    from conftest import ACCEPTANCE_LINES

    ok, detail = CRITERIA[num][1]()
    line = _line(num, ok, detail)
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


if __name__ == "__main__":
    results = []
    for num in sorted(CRITERIA):
        ok, detail = CRITERIA[num][1]()
        results.append(ok)
        print(_line(num, ok, detail), flush=True)
    sys.exit(0 if all(results) else 1)
