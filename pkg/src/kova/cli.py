"""Command line entry point: ``kova <command> SYSTEM.kova [options]``.

Exit codes: 0 success, 1 usage, 2 parse error, 3 analysis error,
4 internal verification failure.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .config import BalanceOptions, OracleOptions, PipelineConfig, ResonanceOptions, SearchOptions
from .dsl import format_expr, load_system, load_tensor, to_vector_field
from .errors import KovaError, ParseError, VerificationFailure
from .invsearch import fixed_point_spectrum, linear_part
from .oracle import flow_pullback_residual, oracle_disagreement, scale_invariant_solution_check
from .pipeline import analyze_grading, scan
from .report import (SCHEMA_VERSION, balance_json, dumps, grading_json, kdata_json, matrix,
                     scalar_str)
from .resonance import (admissible_degree_window, enumerate_fixed_point, enumerate_semi_qh,
                        fixed_point_window)
from .tensorfield import TensorType, is_invariant

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_ANALYSIS, EXIT_VERIFY = 0, 1, 2, 3, 4
DEFAULT_TYPES = [(0, 0), (1, 0), (1, 1)]
INVARIANT_TOL = 1e-6


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser():
    ap = _Parser(prog="kova", description="Tensor invariants of polynomial vector fields.")
    ap.add_argument("--version", action="version", version=f"kova {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("system", help="system file (.kova)")
        p.add_argument("--float", dest="float_mode", action="store_true",
                       help="float mode; allows decimal literals")
        p.add_argument("--seed", type=int, default=0, help="seed for Newton starts and sampling")
        p.add_argument("--out", help="write the JSON report here instead of stdout")
        p.add_argument("--s-max", type=int, default=4, help="largest weight tried")
        p.add_argument("--m-max", type=int, default=5, help="largest grading degree tried")
        p.add_argument("--tol", type=float, default=1e-9, help="float rank/resonance tolerance")
        p.add_argument("--fixed-point", action="store_true",
                       help="analyse the equilibrium at the origin instead of a grading")
        return p

    def typed(p):
        p.add_argument("--type", nargs=2, type=int, action="append", metavar=("P", "Q"),
                       help="tensor type (repeatable)")
        p.add_argument("--k-max", type=int, default=None,
                       help="resonance bound on sum k (default 20) / fixed-point order (default 6)")
        p.add_argument("--degree", type=int, action="append",
                       help="tensor degree l (or order k) to use instead of the window")
        p.add_argument("--no-quotient-trivial", action="store_true",
                       help="keep trivial invariants in the reported bases")
        return p

    typed(common(sub.add_parser("analyze", help="full pipeline")))
    common(sub.add_parser("balances", help="balances of the cut"))
    common(sub.add_parser("kovalevskaya", help="Kovalevskaya matrices and exponents"))
    typed(common(sub.add_parser("resonances", help="resonance certificates")))
    typed(common(sub.add_parser("search", help="invariant search")))
    v = common(sub.add_parser("verify", help="numeric invariance check of a tensor"))
    v.add_argument("--tensor", required=True, help="tensor file")
    v.add_argument("--samples", type=int, default=20)
    v.add_argument("--field", choices=["auto", "full", "cut"], default="auto",
                   help="check against the full field or the cut (auto: cut if the file "
                        "declares weights and degree)")
    return ap


def _config(args) -> PipelineConfig:
    k_max = getattr(args, "k_max", None)
    degrees = getattr(args, "degree", None)
    return PipelineConfig(
        balance=BalanceOptions(seed=args.seed),
        resonance=ResonanceOptions(tol=args.tol, k_max=k_max if k_max is not None else 20),
        search=SearchOptions(fixed_point_k_max=k_max if k_max is not None else 6,
                             quotient_trivial=not getattr(args, "no_quotient_trivial", False),
                             tol=args.tol, degrees=tuple(degrees) if degrees else None),
        oracle=OracleOptions(seed=args.seed, samples=getattr(args, "samples", 20)),
        s_max=args.s_max, m_max=args.m_max)


def _types(args):
    return [TensorType(p, q) for p, q in (args.type or DEFAULT_TYPES)]


def _input_echo(path, spec):
    return {"file": path, "variables": list(spec.names),
            "equations": [f"{nm}' = {format_expr(e)}" for nm, e in zip(spec.names, spec.equations)],
            "params": {k: scalar_str(v) for k, v in spec.params.items()},
            "declared_weights": list(spec.weights) if spec.weights else None,
            "declared_degree": spec.degree, "mode": spec.mode}


def _grading_section(F, ga, names):
    sec = {"candidates": [g.to_json() for g in ga.candidates], "grading": grading_json(ga.grading),
           "declared": ga.declared, "cut": None, "balances": [], "kovalevskaya": []}
    if ga.grading is None:
        return sec
    cut = ga.decomposition.cut
    sec["cut"] = [c.to_str(names) for c in cut]
    for b, k in zip(ga.balances, ga.kdata):
        sec["balances"].append(balance_json(
            b, ga.grading.weights, scale_invariant_solution_check(cut, ga.grading, b)))
        sec["kovalevskaya"].append(kdata_json(k))
    return sec


def _fixed_point_section(F):
    A = linear_part(F)
    spec = fixed_point_spectrum(F)
    return {"A": matrix(A), "spectrum": spec.to_json()}, spec


def _resonance_section(F, ga, types, cfg):
    out = []
    if ga.grading is None:
        _, spec = _fixed_point_section(F)
        orders = list(cfg.search.degrees) if cfg.search.degrees else \
            range(0, cfg.search.fixed_point_k_max + 1)
        for tt in types:
            w = fixed_point_window(spec, tt, cfg.search.fixed_point_k_max, cfg.resonance)
            per = []
            for k in orders:
                sols = enumerate_fixed_point(spec, tt, k, cfg.resonance)
                per.append({"degree": k, "certificates": [s.to_json() for s in sols],
                            "nontrivial": sum(not s.tautological for s in sols)})
            out.append({"type": [tt.p, tt.q], "mode": "fixed-point", "window": w.to_json(),
                        "bound": f"order k <= {max(orders) if orders else 0}", "per_degree": per})
        return out
    m = ga.grading.degree
    for tt in types:
        for i, (b, k) in enumerate(ga.nondegenerate()):
            sp = k.spectrum()
            w = admissible_degree_window(sp, m, tt, ga.grading.weights, cfg.resonance)
            degrees = list(cfg.search.degrees) if cfg.search.degrees else w.degrees
            per = []
            for l in degrees:
                sols = enumerate_semi_qh(sp, m, tt, l, cfg.resonance)
                per.append({"degree": l, "certificates": [s.to_json() for s in sols[:200]],
                            "total": len(sols),
                            "nontrivial": sum(not s.tautological for s in sols)})
            out.append({"type": [tt.p, tt.q], "mode": "graded", "balance": i,
                        "window": w.to_json(), "bound": f"sum k <= {cfg.resonance.k_max}",
                        "per_degree": per})
    return out


def _scans(F, ga, types, cfg, names):
    res = []
    for tt in types:
        rep = scan(F, ga, tt, cfg)
        res.append(rep.to_json(names))
    return res


def _verify(args, spec, F, cfg, names):
    T = load_tensor(args.tensor, spec)
    target = F
    which = args.field
    if which == "auto":
        which = "cut" if spec.weights is not None and spec.degree is not None else "full"
    if which == "cut":
        ga = analyze_grading(F, cfg, spec.weights, spec.degree)
        if ga.decomposition is None:
            raise KovaError("no grading available for --field cut")
        target = ga.decomposition.cut
    ok, res = is_invariant(T.to_float() if not target.exact else T, target)
    residual = flow_pullback_residual(target, T, cfg.oracle.samples, cfg.oracle)
    disagreement = oracle_disagreement(target, T, cfg.oracle.samples, cfg.oracle)
    if disagreement > INVARIANT_TOL * max(1.0, residual):
        raise VerificationFailure("numeric pullback disagrees with symbolic Lie derivative",
                                  disagreement=disagreement)
    return {"tensor": T.to_str(names), "type": [T.p, T.q], "field": which,
            "symbolic_invariant": ok, "symbolic_residual": res.to_str(names),
            "pullback_residual": residual, "oracle_disagreement": disagreement,
            "numeric_invariant": residual < INVARIANT_TOL, "samples": cfg.oracle.samples,
            "h": cfg.oracle.h}


def run(args) -> dict:
    spec = load_system(args.system, args.float_mode)
    F = to_vector_field(spec)
    names = list(spec.names)
    cfg = _config(args)
    report = {"schema_version": SCHEMA_VERSION, "tool": {"name": "kova", "version": __version__},
              "command": args.command, "input": _input_echo(args.system, spec),
              "tolerances": cfg.tolerances(), "seed": args.seed}
    if args.command == "verify":
        report["verification"] = _verify(args, spec, F, cfg, names)
        return report
    ga = analyze_grading(F, cfg, spec.weights, spec.degree, args.fixed_point)
    report["grading"] = _grading_section(F, ga, names)
    if ga.grading is None:
        report["fixed_point"], _ = _fixed_point_section(F)
    if args.command in ("balances", "kovalevskaya"):
        if args.command == "balances":
            report["grading"].pop("kovalevskaya")
        return report
    types = _types(args)
    if args.command in ("analyze", "resonances"):
        report["resonances"] = _resonance_section(F, ga, types, cfg)
    if args.command in ("analyze", "search"):
        report["scans"] = _scans(F, ga, types, cfg, names)
    return report


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        report = run(args)
    except ParseError as e:
        print(f"kova: {e.kind} error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except VerificationFailure as e:
        print(f"kova: internal verification failure: {e}", file=sys.stderr)
        return EXIT_VERIFY
    except KovaError as e:
        print(f"kova: {e.kind}: {e}", file=sys.stderr)
        return EXIT_ANALYSIS
    except (OSError, ValueError) as e:
        print(f"kova: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    text = dumps(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
