"""Certify randomly moved copies of the bundled problems and count invariant certificates."""
import argparse
import time

from projfilter.cli import bundled, fuzz_invariance


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--cond-max", type=float, default=50.0)
    ap.add_argument("--jobs", type=int, default=4)
    args = ap.parse_args()
    for name in ("t3", "t3-estar"):
        t0 = time.perf_counter()
        rows = fuzz_invariance(bundled(name), args.count, args.seed, args.cond_max, args.jobs)
        same = sum(s == b for _, s, b in rows)
        print(f"{name:9} {same}/{len(rows)} identical  base {rows[0][2]}  "
              f"{time.perf_counter() - t0:.1f} s")
        for i, s, b in rows:
            if s != b:
                print(f"  case {i}: {s}")


if __name__ == "__main__":
    main()
