"""Command line: certify, solve, transform, crossratio, indexes, counterexample.

Exit codes: 0 certified, 1 usage or schema error, 2 infeasible class,
3 not certified or stalled.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from importlib import resources

import numpy as np

from .bands import ValueWindows, excess_profile, tight_windows, windows_from_mu, windows_from_theta
from .certify import certify
from .errors import (ClassInfeasible, DegenerateMap, DegenerateImage, DegenerateWindows,
                     ProjFilterError, Stalled)
from .problem import Problem, SchemaError, load_problem, parse_problem, transform_problem
from .projline import MobiusMap
from .ratfun import RealRational
from .solver import SolverOptions, brute_force_oracle, solve
from .stiefel import CANONICAL, FLIPPED, index_array, relabel

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_NOT_CERTIFIED = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def bundled(name: str) -> Problem:
    text = resources.files("projfilter.data").joinpath(f"{name}.json").read_text()
    return parse_problem(text, name)


def random_mobius(rng, cond_max: float = 50.0) -> MobiusMap:
    """Random map with matrix condition number at most ``cond_max``."""
    while True:
        m = MobiusMap.from_matrix(rng.normal(size=(2, 2)))
        if m.condition() <= cond_max:
            return m


def _write_json(obj, path):
    text = json.dumps(obj, indent=2)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _write_csv(rows, header, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _parse_map(text: str) -> MobiusMap:
    try:
        a, b, c, d = (float(v) for v in text.split(","))
    except ValueError as exc:
        raise SchemaError(f"--map expects a,b,c,d: {exc}") from exc
    return MobiusMap(a, b, c, d)


def _class_for(pb: Problem, r: RealRational, f: ValueWindows, convention: str, spec: str | None):
    if spec == "self" or pb.class_array is None:
        if spec != "self":
            raise SchemaError("problem has no class_array; pass --class self")
        own = index_array(r, pb.bands, f, convention)
        return own
    cls = pb.class_array
    if cls.convention != convention:
        cls = relabel(cls, pb.bands)
    return cls


def certify_problem(pb: Problem, convention: str = CANONICAL, class_spec: str | None = None,
                    n: int | None = None):
    if pb.function is None:
        raise SchemaError("problem has no function to certify")
    r = pb.function
    f = pb.windows if pb.windows is not None else tight_windows(r, pb.bands)
    cls = _class_for(pb, r, f, convention, class_spec)
    return certify(r, pb.bands, f, cls, n), f


def cmd_certify(args) -> int:
    pb = load_problem(args.problem)
    cert, f = certify_problem(pb, args.convention, args.cls, args.n)
    out = cert.to_json()
    if pb.bands.has_infinite_endpoint:
        out["notes"] = ["band endpoint at infinity"]
    _write_json(out, args.json_out)
    if args.csv_out:
        rows = excess_profile(pb.function, pb.bands, f, args.samples)
        _write_csv(rows, ["band", "x", "value", "distance"], args.csv_out)
    return EXIT_OK if cert.optimal else EXIT_NOT_CERTIFIED


def fuzz_invariance(pb: Problem, count: int, seed: int = 0, cond_max: float = 50.0,
                    jobs: int = 1, convention: str = CANONICAL) -> list:
    """Certify ``count`` randomly moved copies; returns ``(case, summary, base)`` rows."""
    base, _ = certify_problem(pb, convention, None if pb.class_array else "self")
    if pb.class_array is None:
        pb = Problem(pb.bands, pb.windows, base.class_array, pb.function, pb.name)
    rng = np.random.default_rng(seed)
    maps = [(random_mobius(rng, cond_max), random_mobius(rng, cond_max)) for _ in range(count)]

    def run(i):
        alpha, beta = maps[i]
        try:
            moved = transform_problem(transform_problem(pb, alpha), beta, target=True)
            cert, _ = certify_problem(moved, convention)
            return i, cert.summary(), base.summary()
        except ProjFilterError as exc:
            return i, f"error: {exc}", base.summary()

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as ex:
        return list(ex.map(run, range(count)))


def cmd_transform(args) -> int:
    pb = load_problem(args.problem)
    if args.fuzz:
        rows = fuzz_invariance(pb, args.fuzz, args.seed, jobs=args.jobs)
        same = sum(s == b for _, s, b in rows)
        for i, s, b in rows:
            if s != b:
                print(f"case {i}: {s} != {b}", file=sys.stderr)
        print(f"{same}/{len(rows)} identical certificates")
        return EXIT_OK if same == len(rows) else EXIT_NOT_CERTIFIED
    if not args.map:
        raise SchemaError("--map a,b,c,d is required unless --fuzz is given")
    m = _parse_map(args.map)
    out = transform_problem(pb, m, target=args.target)
    _write_json(out.to_json(), args.out)
    return EXIT_OK


def cmd_crossratio(args) -> int:
    if args.mu is not None:
        f = windows_from_mu(args.mu)
    elif args.theta is not None:
        f = windows_from_theta(args.theta)
    elif args.problem:
        pb = load_problem(args.problem)
        if pb.windows is None:
            raise SchemaError("problem has no windows")
        f = pb.windows
    elif args.endpoints:
        f = ValueWindows.from_reals(*[float(v) if v != "inf" else float("inf")
                                      for v in args.endpoints])
    else:
        raise SchemaError("give endpoints, --mu, --theta or --problem")
    print(json.dumps({"schema": 1, "windows": f.to_json(), "kappa": f.kappa}))
    return EXIT_OK


def cmd_indexes(args) -> int:
    pb = load_problem(args.problem)
    if pb.function is None:
        raise SchemaError("problem has no function")
    f = pb.windows if pb.windows is not None else tight_windows(pb.function, pb.bands)
    arr = index_array(pb.function, pb.bands, f, args.convention)
    out = {"schema": 1, **arr.to_json(), "parity_ok": arr.parity_ok}
    _write_json(out, args.json_out)
    return EXIT_OK


def cmd_solve(args) -> int:
    pb = load_problem(args.problem)
    seed = pb.function
    if args.seed_file:
        with open(args.seed_file) as fh:
            d = json.load(fh)
        seed = RealRational.from_json(d.get("function", d))
    n = args.n if args.n is not None else (seed.nominal_degree if seed is not None else None)
    if n is None:
        raise SchemaError("--n is required when no seed is given")
    cls = pb.class_array
    if cls is not None and cls.convention != args.convention:
        cls = relabel(cls, pb.bands)
    opts = SolverOptions(max_iter=args.max_iter, convention=args.convention, seed=args.seed)
    try:
        rep = solve(pb.bands, n, cls, seed, opts)
    except Stalled as exc:
        rep = exc.report
    if args.oracle:
        if n > 2:
            raise SchemaError("--oracle supports n <= 2")
        k, _ = brute_force_oracle(pb.bands, n)
        rep.oracle_kappa = k
        rep.oracle_gap = abs(rep.kappa - k) / k
    _write_json(rep.to_json(), args.json_out)
    if args.csv_out:
        rows = [(i, *t) for i, t in enumerate(rep.iterations)]
        _write_csv(rows, ["iteration", "kappa", "defect", "alt", "sigma0", "sigma1"],
                   args.csv_out)
    return EXIT_OK if rep.converged else EXIT_NOT_CERTIFIED


def counterexample_rows() -> list:
    """Certificates along E -> E* -> l^-1 E* for the cubic Chebyshev polynomial."""
    estar = bundled("t3-estar")
    e = bundled("t3")
    e = Problem(e.bands, e.windows, estar.class_array, e.function.with_nominal(4), "E")
    inv = transform_problem(estar, MobiusMap(0.0, 1.0, 1.0, 0.0))
    rows = []
    for label, pb in (("E", e), ("E*", estar), ("l^-1 E*", inv)):
        cert, _ = certify_problem(pb)
        rows.append({"set": label, "malozemov": cert.malozemov, "alt": cert.alt,
                     "sigma0": cert.sigma0, "sigma1": cert.sigma1, "verdict": cert.verdict,
                     "summary": list(cert.summary())})
    return rows


def cmd_counterexample(args) -> int:
    rows = counterexample_rows()
    if args.json_out:
        _write_json({"schema": 1, "rows": rows}, args.json_out)
    print(f"{'set':10} {'linear':>6} {'alt':>4} {'S0':>3} {'S1':>3}  verdict")
    for r in rows:
        print(f"{r['set']:10} {r['malozemov']:>6} {r['alt']:>4} {r['sigma0']:>3} "
              f"{r['sigma1']:>3}  {r['verdict']}")
    same = rows[1]["summary"] == rows[2]["summary"]
    print(f"cyclic certificates of E* and l^-1 E* identical: {same}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="projfilter", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    c = sub.add_parser("certify", help="certify a function against its problem")
    c.add_argument("problem")
    c.add_argument("--convention", choices=[CANONICAL, FLIPPED], default=CANONICAL)
    c.add_argument("--class", dest="cls", choices=["self"], default=None)
    c.add_argument("--n", type=int, default=None, help="nominal degree override")
    c.add_argument("--json-out")
    c.add_argument("--csv-out")
    c.add_argument("--samples", type=int, default=200)
    c.set_defaults(func=cmd_certify)

    s = sub.add_parser("solve", help="run the minimax solver")
    s.add_argument("problem")
    s.add_argument("--n", type=int)
    s.add_argument("--seed-file")
    s.add_argument("--oracle", action="store_true")
    s.add_argument("--convention", choices=[CANONICAL, FLIPPED], default=CANONICAL)
    s.add_argument("--max-iter", type=int, default=200)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--json-out")
    s.add_argument("--csv-out")
    s.set_defaults(func=cmd_solve)

    t = sub.add_parser("transform", help="move a problem by a projective map")
    t.add_argument("problem")
    t.add_argument("--map")
    t.add_argument("--target", action="store_true", help="apply the map to values")
    t.add_argument("--out")
    t.add_argument("--fuzz", type=int, default=0)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--jobs", type=int, default=1)
    t.set_defaults(func=cmd_transform)

    x = sub.add_parser("crossratio", help="cross ratio of value windows")
    x.add_argument("endpoints", nargs="*")
    x.add_argument("--mu", type=float)
    x.add_argument("--theta", type=float)
    x.add_argument("--problem")
    x.set_defaults(func=cmd_crossratio)

    i = sub.add_parser("indexes", help="transition indexes of the problem's function")
    i.add_argument("problem")
    i.add_argument("--convention", choices=[CANONICAL, FLIPPED], default=CANONICAL)
    i.add_argument("--json-out")
    i.set_defaults(func=cmd_indexes)

    k = sub.add_parser("counterexample", help="reproduce the cubic Chebyshev counterexample")
    k.add_argument("--json-out")
    k.set_defaults(func=cmd_counterexample)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ClassInfeasible as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (SchemaError, DegenerateMap, DegenerateImage, DegenerateWindows) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ProjFilterError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NOT_CERTIFIED


if __name__ == "__main__":
    sys.exit(main())
