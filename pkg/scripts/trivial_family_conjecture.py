#!/usr/bin/env python3
"""Compare the permutation family with all constant (p,p) tensors killed by every field.

Prints, for each (p, n), the dimension of the universal invariant space and
the rank of the permutation family.  Equal numbers are consistent with the
family being complete; p >= 4 is the open case.

Usage: python3 scripts/trivial_family_conjecture.py [--p-max 4] [--n-max 3]
"""

import argparse
import time

from kova.invsearch import universal_constant_invariants

SLOT_LIMIT = 70000


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p-max", type=int, default=4)
    ap.add_argument("--n-max", type=int, default=3)
    args = ap.parse_args()
    print(f"{'p':>2} {'n':>2} {'slots':>6} {'universal':>9} {'family':>6}  verdict")
    for p in range(args.p_max + 1):
        for n in range(1, args.n_max + 1):
            slots = n ** (2 * p)
            if slots > SLOT_LIMIT:
                print(f"{p:>2} {n:>2} {slots:>6}  skipped (over {SLOT_LIMIT} slots)")
                continue
            t0 = time.perf_counter()
            dim, rank = universal_constant_invariants(p, n)
            verdict = "complete" if dim == rank else "GAP"
            print(f"{p:>2} {n:>2} {slots:>6} {dim:>9} {rank:>6}  {verdict} "
                  f"({time.perf_counter() - t0:.1f}s)")


if __name__ == "__main__":
    main()
