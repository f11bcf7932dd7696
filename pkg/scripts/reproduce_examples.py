#!/usr/bin/env python3
"""Run the three bundled systems through the pipeline and print a summary.

Usage: python3 scripts/reproduce_examples.py [--json OUT_DIR]
"""

import argparse
import json
import time
from pathlib import Path

from kova.cli import main as cli_main
from kova.config import PipelineConfig, SearchOptions
from kova.dsl import load_system, to_vector_field
from kova.pipeline import analyze_grading, scan
from kova.tensorfield import TensorType

ROOT = Path(__file__).resolve().parent.parent
CASES = [
    ("lotka.kova", False, [(0, 0), (1, 0), (1, 1), (0, 1), (0, 2), (1, 2)]),
    ("oregonator.kova", False, [(0, 0), (1, 0), (1, 1), (0, 1)]),
    ("artificial.kova", True, [(0, 0), (1, 0), (1, 1), (2, 0), (0, 1), (1, 2)]),
]


def summarize(name, float_mode, types, raw):
    spec = load_system(ROOT / "systems" / name, float_mode)
    F = to_vector_field(spec)
    cfg = PipelineConfig(search=SearchOptions(quotient_trivial=not raw))
    t0 = time.perf_counter()
    ga = analyze_grading(F, cfg, spec.weights, spec.degree)
    print(f"== {name}")
    if ga.grading is None:
        print("   no grading; fixed-point analysis at the origin")
    else:
        g = ga.grading
        print(f"   grading s={list(g.weights)} m={g.degree} ({g.sign})")
        for b, k in zip(ga.balances, ga.kdata):
            exps = ", ".join(str(v) for v, _ in k.exponents)
            print(f"   balance {tuple(str(v) for v in b.c)}  exponents {{{exps}}}")
    for pq in types:
        rep = scan(F, ga, TensorType(*pq), cfg)
        dims = {e.degree: e.dimension for e in rep.entries}
        print(f"   type {pq}: window {rep.window.degrees} [{rep.window.status}] dims {dims}")
        for e in rep.entries:
            for T in (e.basis.basis if e.basis else []):
                print(f"      l={e.degree}: {T.to_str(list(spec.names))}")
        if rep.violations:
            print(f"      VIOLATIONS {rep.violations}")
    print(f"   ({time.perf_counter() - t0:.2f}s)")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--json", help="also write full CLI reports into this directory")
    ap.add_argument("--raw", action="store_true", help="keep trivial invariants in the bases")
    args = ap.parse_args()
    for name, fm, types in CASES:
        summarize(name, fm, types, args.raw)
        if args.json:
            out = Path(args.json)
            out.mkdir(parents=True, exist_ok=True)
            argv = ["analyze", str(ROOT / "systems" / name), "--out", str(out / (name + ".json"))]
            if fm:
                argv.append("--float")
            cli_main(argv)


if __name__ == "__main__":
    main()
