import numpy as np
import pytest

from bvkit.discrepancy import (
    PointSet,
    centered_regular,
    generate,
    halton,
    rank1_lattice,
    read_csv,
    star_discrepancy,
    star_discrepancy_exact,
    star_discrepancy_grid_bound,
    write_csv,
)
from bvkit.errors import InvalidArgument, ResourceLimit
from oracles import halton_brute, star_discrepancy_brute


def test_exact_examples():
    assert star_discrepancy_exact([0.25, 0.75]) == 0.25
    assert star_discrepancy_exact([0.5]) == 0.5
    assert star_discrepancy_exact([[0.5, 0.5]]) == 0.75


def test_exact_matches_brute_force(rng):
    for d in (1, 2, 3):
        for _ in range(10):
            n = int(rng.integers(1, 12))
            pts = rng.random((n, d))
            if rng.random() < 0.5:
                # ties and boundary coordinates exercise open versus closed counting
                pts = np.round(pts * 4) / 4
            assert star_discrepancy_exact(pts) == pytest.approx(star_discrepancy_brute(pts), abs=1e-15)


def test_permutation_invariant(rng):
    pts = rng.random((40, 2))
    assert star_discrepancy_exact(pts) == star_discrepancy_exact(pts[rng.permutation(40)])


def test_budget_enforced():
    with pytest.raises(ResourceLimit) as info:
        star_discrepancy_exact(halton(257, 2))
    assert info.value.suggestion
    with pytest.raises(ResourceLimit):
        star_discrepancy_exact(halton(10, 4))


def test_grid_bound_brackets_exact(rng):
    for d in (1, 2, 3):
        for _ in range(5):
            P = rng.random((int(rng.integers(1, 30)), d))
            lo, hi = star_discrepancy_grid_bound(P, 32)
            exact = star_discrepancy_exact(P)
            assert lo <= exact + 1e-15 <= hi + 2e-15
            assert hi - lo == pytest.approx(d / 32)


def test_grid_bound_width():
    P = generate("uniform_random", 100, 2, seed=3)
    lo, hi = star_discrepancy_grid_bound(P, 64)
    assert hi - lo == pytest.approx(2 / 64)
    lo2, hi2 = star_discrepancy_grid_bound(P, 128)
    assert hi2 - lo2 == pytest.approx((hi - lo) / 2)
    with pytest.raises(InvalidArgument):
        star_discrepancy_grid_bound(P, 1)


def test_halton_first_points():
    assert halton(3, 1)[:, 0].tolist() == [0.5, 0.25, 0.75]
    pts = halton(50, 4)
    for i in range(50):
        assert pts[i].tolist() == [halton_brute(i + 1, b) for b in (2, 3, 5, 7)]


def test_centered_regular():
    assert centered_regular(4, 1)[:, 0].tolist() == [0.125, 0.375, 0.625, 0.875]
    assert star_discrepancy_exact(centered_regular(4, 1)) == 0.125
    assert centered_regular(16, 2).shape == (16, 2)
    with pytest.raises(InvalidArgument):
        centered_regular(10, 2)


def test_lattice_and_default_generator():
    pts = rank1_lattice(8, (1, 3))
    assert pts[1].tolist() == [1 / 8, 3 / 8]
    P = generate("rank1_lattice", 16, 2)
    assert P.n == 16 and "g=1/" in P.label
    with pytest.raises(InvalidArgument):
        generate("rank1_lattice", 16, 2, g=(1, 2, 3))


def test_random_reproducible():
    a = generate("uniform_random", 64, 3, seed=11).points
    b = generate("uniform_random", 64, 3, seed=11).points
    c = generate("uniform_random", 64, 3, seed=12).points
    assert a.tobytes() == b.tobytes()
    assert a.tobytes() != c.tobytes()
    with pytest.raises(InvalidArgument):
        generate("uniform_random", 4, 2)


def test_generate_validation():
    with pytest.raises(InvalidArgument):
        generate("sobol", 4, 2)
    with pytest.raises(InvalidArgument):
        generate("halton", 4, 9)
    with pytest.raises(InvalidArgument):
        PointSet([[1.5, 0.2]])


def test_lower_bound_one_dim(rng):
    for n in (1, 3, 17, 100):
        for P in (halton(n, 1), rng.random((n, 1)), centered_regular(n, 1)):
            v = star_discrepancy_exact(P)
            assert 1 / (2 * n) - 1e-15 <= v <= 1.0


def test_halton_decreasing():
    vals = [star_discrepancy_exact(halton(n, 2)) for n in (16, 64, 256)]
    assert vals[0] > vals[1] > vals[2]


def test_dispatcher():
    r = star_discrepancy(halton(64, 2))
    assert r.method == "exact" and r.lower == r.upper == r.value
    big = star_discrepancy(halton(1000, 2))
    assert big.method.startswith("grid-bound")
    assert big.lower <= big.value == big.upper


def test_csv_round_trip(tmp_path):
    P = generate("uniform_random", 20, 3, seed=5)
    path = tmp_path / "p.csv"
    write_csv(P, path)
    Q = read_csv(path)
    assert Q.points.tobytes() == P.points.tobytes()
    assert Q.label == P.label and Q.seed == 5
    bad = tmp_path / "bad.csv"
    bad.write_text("0.1,0.2\n0.3\n")
    with pytest.raises(InvalidArgument):
        read_csv(bad)
