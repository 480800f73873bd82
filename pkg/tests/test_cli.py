import json

import pytest

from bvkit.cli import main, parse_points
from bvkit.discrepancy import generate, write_csv
from bvkit.errors import InvalidArgument, NotFound


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_variation_prod(capsys):
    code, out, _ = run(capsys, "variation", "--fn", "prod", "--cells", "4")
    assert code == 0
    assert json.loads(out)["hk_total"] == pytest.approx(3.0)


def test_variation_refine(capsys, tmp_path):
    target = tmp_path / "v.json"
    code, out, _ = run(capsys, "variation", "--fn", "halfplane", "--cells", "1", "--refine", "6",
                       "--out", str(target))
    assert code == 0 and "hk_total" in out
    rep = json.loads(target.read_text())
    assert rep["converged"] is False and len(rep["trace"]) == 7


def test_approx_prod(capsys):
    code, out, _ = run(capsys, "approx", "--fn", "prod", "--n", "8", "--d", "2")
    assert code == 0
    assert json.loads(out)["max_error"] <= 0.25


def test_discrepancy_centered(capsys):
    code, out, _ = run(capsys, "discrepancy", "--points", "centered:n=4,d=1")
    assert code == 0
    assert json.loads(out)["dstar"] == 0.125


def test_discrepancy_csv(capsys, tmp_path):
    path = tmp_path / "pts.csv"
    write_csv(generate("halton", 16, 2), path)
    code, out, _ = run(capsys, "discrepancy", "--points", str(path))
    assert code == 0 and json.loads(out)["n"] == 16


def test_decompose(capsys):
    code, out, _ = run(capsys, "decompose", "--fn", "random:cells=4;seed=3", "--cells", "4")
    res = json.loads(out)
    assert code == 0
    assert res["residual_max"] == 0.0
    assert res["plus_completely_monotone"] and res["minus_completely_monotone"]


def test_kh(capsys):
    code, out, _ = run(capsys, "kh", "--fn", "prod", "--points", "halton:n=64,d=2")
    cert = json.loads(out)
    assert code == 0 and cert["sound"] and cert["empirical_error"] <= cert["bound"]
    code, out, _ = run(capsys, "kh", "--fn", "halfplane", "--points", "halton:n=16,d=2")
    cert = json.loads(out)
    assert cert["vacuous"] and cert["bound"] == "inf"


def test_kh_convex_refused(capsys):
    code, _, err = run(capsys, "kh", "--fn", "halfplane", "--points", "halton:n=16,d=2", "--family", "k")
    assert code == 2
    assert json.loads(err)["error"] == "family-mismatch"


@pytest.mark.parametrize("argv,kind", [
    (["variation", "--fn", "prd"], "not-found"),
    (["variation", "--fn", "prod", "--cells", "0"], "invalid-argument"),
    (["variation", "--fn", "prod", "--bogus", "1"], "invalid-argument"),
    (["approx", "--fn", "halfplane", "--n", "4"], "precondition-violation"),
    (["discrepancy", "--points", "halton:n=4,q=2"], "invalid-argument"),
])
def test_invalid_input_exit_2(capsys, argv, kind):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert json.loads(err)["error"] == kind


def test_resource_limit_exit_3(capsys, monkeypatch):
    import bvkit.cli as cli
    from bvkit.errors import ResourceLimit

    def boom(*_a, **_k):
        raise ResourceLimit("too big", suggestion="smaller m")

    monkeypatch.setattr(cli, "star_discrepancy", boom)
    code, _, err = run(capsys, "discrepancy", "--points", "halton:n=4,d=2")
    assert code == 3 and json.loads(err)["suggestion"] == "smaller m"


def test_violation_exit_4(capsys, monkeypatch):
    import bvkit.cli as cli

    monkeypatch.setattr(cli, "variation_for", lambda *a, **k: (1e-6, "dvar-upper"))
    code, _, err = run(capsys, "kh", "--fn", "prod", "--points", "halton:n=16,d=2")
    assert code == 4 and json.loads(err)["error"] == "certified-inequality-violation"


def test_parse_points():
    assert parse_points("lattice:n=16,d=2,g=1/7").points[1].tolist() == [1 / 16, 7 / 16]
    assert parse_points("random:n=5,d=3,seed=4").seed == 4
    with pytest.raises(NotFound):
        parse_points("sobol:n=4")
    with pytest.raises(InvalidArgument):
        parse_points("halton:d=2")


def test_output_byte_identical(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for target in (a, b):
        assert main(["kh", "--fn", "expsum", "--points", "random:n=64,d=2,seed=9", "--out", str(target)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_suite(capsys, tmp_path):
    code, out, _ = run(capsys, "suite", "--out", str(tmp_path))
    assert code == 0
    lines = (tmp_path / "kh_suite.csv").read_text().splitlines()
    assert lines[0] == "function,pointset,N,d,dstar,variation,provenance,bound,error,sound"
    assert len(lines) > 90
