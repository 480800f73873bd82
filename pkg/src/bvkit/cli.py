"""Command line front end.

Every subcommand writes one artifact (JSON, or CSV for ``suite``) and a
one-line summary. Errors go to stderr as JSON and map onto exit codes:
2 invalid input, 3 resource limit, 4 certified-inequality violation.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import zoo
from .approximation import monotone_approximation
from .certify import certificates_csv, certify, reference_integral, variation_for
from .discrepancy import generate, halton, read_csv, star_discrepancy
from .errors import BVKitError, InvalidArgument, NotFound
from .grid import Ladder
from .simple import vs_upper
from .variation import hk_on_ladder, hk_refined, leonov_decompose

_POINT_KINDS = {
    "halton": "halton",
    "lattice": "rank1_lattice",
    "rank1_lattice": "rank1_lattice",
    "random": "uniform_random",
    "uniform_random": "uniform_random",
    "centered": "centered_regular",
    "centered_regular": "centered_regular",
}
_POINT_KEYS = {"n", "d", "seed", "g"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InvalidArgument(message)


def _jsonable(obj):
    """Replace non-finite floats by the strings ``inf``, ``-inf``, ``nan``."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return _jsonable(obj.item())
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, allow_nan=False) + "\n"


def parse_points(text: str, default_d: int = 2, seed: int | None = None):
    """Point-set descriptor ``kind:key=value,...`` or a CSV path."""
    kind, _, rest = text.partition(":")
    if kind not in _POINT_KINDS:
        if Path(text).is_file():
            return read_csv(text)
        raise NotFound(f"unknown point set {kind!r} and no such CSV file; "
                       f"known kinds: {', '.join(sorted(_POINT_KINDS))}")
    params = {}
    for item in filter(None, rest.split(",")):
        key, eq, val = item.partition("=")
        key = key.strip()
        if not eq or key not in _POINT_KEYS:
            raise InvalidArgument(f"bad point-set parameter {item!r}; expected one of {sorted(_POINT_KEYS)}")
        params[key] = val.strip()
    try:
        n = int(params["n"])
        d = int(params.get("d", default_d))
        s = int(params["seed"]) if "seed" in params else seed
        g = tuple(int(t) for t in params["g"].split("/")) if "g" in params else None
    except KeyError:
        raise InvalidArgument("point-set descriptor needs n=...") from None
    except ValueError as exc:
        raise InvalidArgument(f"point-set parameters must be integers: {exc}") from None
    return generate(_POINT_KINDS[kind], n, d, seed=s, g=g)


def _positive(kind=int):
    def check(text):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
        if not v > 0:
            raise argparse.ArgumentTypeError(f"expected a positive value, got {text!r}")
        return v
    return check


def _ladder(args, d: int) -> Ladder:
    if args.ladder:
        try:
            axes = json.loads(Path(args.ladder).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidArgument(f"cannot read ladder file: {exc}") from None
        ladder = Ladder(axes)
        if ladder.d != d:
            raise InvalidArgument(f"ladder has d={ladder.d} but the function has d={d}")
        return ladder
    return Ladder.uniform(d, args.cells)


# -- subcommands -------------------------------------------------------------

def cmd_variation(args):
    f = zoo.get(args.fn, args.d)
    ladder = _ladder(args, f.d)
    if args.refine:
        rep = hk_refined(f, ladder, tol=args.tol, max_refine=args.refine)
    else:
        rep = hk_on_ladder(f, ladder)
    return rep.to_json(), f"{f.name} d={f.d}: hk_total={rep.hk_total!r} on {rep.ladder_cells_per_axis} cells"


def cmd_decompose(args):
    f = zoo.get(args.fn, args.d)
    ladder = _ladder(args, f.d)
    dec = leonov_decompose(f, ladder)
    residual = float(np.max(np.abs(dec.residual(ladder.tabulate(f)))))
    out = dec.to_json()
    out["residual_max"] = residual
    ok = bool(dec.plus_check) and bool(dec.minus_check)
    return out, f"{f.name}: residual={residual!r} parts completely monotone={ok}"


def cmd_approx(args):
    f = zoo.get(args.fn, args.d)
    res = monotone_approximation(f, args.n, f.d)
    x = np.vstack([halton(args.check_samples, f.d), np.ones((1, f.d)), np.zeros((1, f.d))])
    err = float(np.max(np.abs(f(x) - res.simple(x))))
    out = {
        "function": f.name,
        "n": args.n,
        "d": f.d,
        "error_bound": res.error_bound,
        "max_error": err,
        "vs_upper": vs_upper(res.simple),
        "simple": res.simple.to_json(),
    }
    return out, f"{f.name} n={args.n}: max sampled error {err:.6g} (bound {res.error_bound:.6g})"


def cmd_discrepancy(args):
    P = parse_points(args.points, args.d, args.seed)
    res = star_discrepancy(P)
    out = {"pointset": P.label, "n": P.n, "d": P.d, **res.to_json()}
    return out, f"{P.label}: D*={res.value!r} ({res.method})"


def cmd_kh(args):
    f = zoo.get(args.fn, args.d)
    P = parse_points(args.points, f.d, args.seed)
    var, prov = variation_for(f, args.family, n_max=args.n_max)
    cert = certify(f, P, var, prov, family=args.family, reference=reference_integral(f), label=f.name)
    flag = "vacuous" if cert.vacuous else ("sound" if cert.sound else "informative")
    return cert.to_json(), (f"{f.name} on {P.label}: error {cert.empirical_error:.3g} "
                            f"<= bound {cert.bound:.3g} ({flag})")


SUITE_FUNCTIONS = [
    ("prod", 2), ("linear", 2), ("box:a=0.3,0.7", 2), ("expsum", 2), ("halfplane", 2),
    ("prod", 1), ("linear", 1), ("expsum", 1), ("step1d:j=0.5", 1),
]
SUITE_POINTS = ("halton", "rank1_lattice", "centered_regular", "uniform_random")
SUITE_SIZES = (16, 64, 256)


def _suite_points(kind, n, d, seed):
    if kind == "centered_regular" and round(n ** (1.0 / d)) ** d != n:
        return None
    return generate(kind, n, d, seed=seed)


def run_suite(seed: int = 0, threads: int = 1):
    """Certificates over the acceptance grid, in a fixed row order."""
    entries = [zoo.get(name, d) for name, d in SUITE_FUNCTIONS]
    jobs = [(e, kind, n) for e in entries for kind in SUITE_POINTS for n in SUITE_SIZES]

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        variations = list(pool.map(lambda e: variation_for(e, "rstar"), entries))
        var_of = {id(e): v for e, v in zip(entries, variations)}

        def run(job):
            e, kind, n = job
            P = _suite_points(kind, n, e.d, seed)
            if P is None:
                return None
            var, prov = var_of[id(e)]
            return certify(e, P, var, prov, reference=reference_integral(e), label=e.name)

        certs = [c for c in pool.map(run, jobs) if c is not None]
    return certs


def cmd_suite(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    certs = run_suite(args.seed, args.threads)
    path = out / "kh_suite.csv"
    path.write_text(certificates_csv(certs))
    sound = [c for c in certs if c.sound and not c.vacuous]
    return None, f"{len(certs)} certificates ({len(sound)} sound, finite) written to {path}"


def _add_fn(p):
    p.add_argument("--fn", required=True, help="function descriptor, e.g. prod or box:a=0.3,0.7")
    p.add_argument("--d", type=_positive(), default=2, help="dimension (default 2)")


def _add_ladder(p):
    p.add_argument("--cells", type=_positive(), default=4, help="cells per axis of a uniform ladder")
    p.add_argument("--ladder", help="JSON file with per-axis breakpoints")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bvkit", description="Variation, discrepancy and Koksma-Hlawka certificates.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("variation", help="Hardy-Krause variation on a ladder")
    _add_fn(p)
    _add_ladder(p)
    p.add_argument("--refine", type=_positive(), help="refine up to K times")
    p.add_argument("--tol", type=_positive(float), default=1e-6)
    p.set_defaults(run=cmd_variation)

    p = sub.add_parser("decompose", help="split into completely monotone parts on a ladder")
    _add_fn(p)
    _add_ladder(p)
    p.set_defaults(run=cmd_decompose)

    p = sub.add_parser("approx", help="simple-function approximation of a completely monotone function")
    _add_fn(p)
    p.add_argument("--n", type=_positive(), required=True)
    p.add_argument("--check-samples", type=_positive(), default=10_000)
    p.set_defaults(run=cmd_approx)

    p = sub.add_parser("discrepancy", help="star discrepancy of a point set")
    p.add_argument("--points", required=True, help="e.g. halton:n=64,d=2 or a CSV file")
    p.add_argument("--d", type=_positive(), default=2)
    p.set_defaults(run=cmd_discrepancy)

    p = sub.add_parser("kh", help="Koksma-Hlawka certificate")
    _add_fn(p)
    p.add_argument("--points", required=True)
    p.add_argument("--family", choices=("rstar", "k"), default="rstar")
    p.add_argument("--n-max", type=_positive(), default=64)
    p.set_defaults(run=cmd_kh)

    p = sub.add_parser("suite", help="certificate table over the acceptance grid")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--threads", type=_positive(), default=1)
    p.set_defaults(run=cmd_suite)

    for sp in sub.choices.values():
        sp.add_argument("--seed", type=int, default=0, help="seed for random point sets")
        if sp.get_default("run") is not cmd_suite:
            sp.add_argument("--out", help="output file (default stdout)")
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        payload, summary = args.run(args)
        if payload is not None:
            text = dumps(payload)
            if args.out:
                Path(args.out).write_text(text)
            else:
                sys.stdout.write(text)
        print(summary, file=sys.stdout if args.out else sys.stderr)
        return 0
    except BVKitError as exc:
        sys.stderr.write(json.dumps(_jsonable(exc.to_json())) + "\n")
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
