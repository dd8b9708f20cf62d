"""Compare the solver with brute-force search and the closed form on two symmetric bands."""
import argparse
import csv
import math
import time
from dataclasses import dataclass

from projfilter.bands import BandSystem
from projfilter.solver import SolverOptions, brute_force_oracle, solve


@dataclass
class Config:
    gaps: tuple = (0.2, 0.5, 0.8)
    degrees: tuple = (1, 2)
    grid: int = 24
    levels: int = 24
    max_iter: int = 200


def closed_form(a, n):
    if n == 1:
        return ((1 + a) / (1 - a)) ** 2
    s = math.sqrt(a)
    return ((1 + s) / (1 - s)) ** 4


def run(cfg: Config):
    rows = []
    for a in cfg.gaps:
        e = BandSystem.from_intervals([("minus", -1.0, -a), ("plus", a, 1.0)])
        for n in cfg.degrees:
            t0 = time.perf_counter()
            rep = solve(e, n, opts=SolverOptions(max_iter=cfg.max_iter))
            t1 = time.perf_counter()
            k_or, _ = brute_force_oracle(e, n, cfg.grid, cfg.levels)
            rows.append({"a": a, "n": n, "kappa": rep.kappa, "oracle": k_or,
                         "closed_form": closed_form(a, n),
                         "gap": abs(rep.kappa - k_or) / k_or, "alt": rep.certificate.alt,
                         "iterations": len(rep.iterations) - 1, "seconds": t1 - t0})
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--csv-out")
    ap.add_argument("--grid", type=int, default=24)
    args = ap.parse_args()
    rows = run(Config(grid=args.grid))
    print(f"{'a':>4} {'n':>2} {'solver':>14} {'oracle':>14} {'closed form':>14} "
          f"{'gap':>9} {'alt':>4} {'it':>4} {'sec':>6}")
    for r in rows:
        print(f"{r['a']:>4} {r['n']:>2} {r['kappa']:>14.8g} {r['oracle']:>14.8g} "
              f"{r['closed_form']:>14.8g} {r['gap']:>9.1e} {r['alt']:>4} "
              f"{r['iterations']:>4} {r['seconds']:>6.2f}")
    if args.csv_out:
        with open(args.csv_out, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)


if __name__ == "__main__":
    main()
