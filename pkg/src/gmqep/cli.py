"""Command-line front end.

Exit codes: 0 the inequalities hold (or the command succeeded), 1 a
verdict failed, 2 bad input, 3 numeric failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Optional, Sequence

from .checker import (GM_TOL, evaluate_instance, gm_report, gm_report_semibipartite,
                      assemble_spectrum, assemble_spectrum_degenerate, summarize, sweep,
                      verify_main_lemma, DegenerateRootError)
from .graph import EdgeListError, GraphError, read_edge_list
from .linalg import DEFAULT_JACOBI_TOL, DEFAULT_MAJORIZATION_TOL, ConvergenceError, majorizes
from .qep import BracketError, PencilParams, TrackingError, brackets, find_roots, track_all
from .report import SCHEMA_VERSION, ReportDocument, as_plain

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3
NUMERIC_ERRORS = (ConvergenceError, BracketError, TrackingError, DegenerateRootError)
CSV_COLUMNS = ("n", "j", "k", "min_margin", "tight_index", "cross_dev", "verdict")


def _num(x: Optional[float]) -> str:
    return "" if x is None or (isinstance(x, float) and math.isnan(x)) else repr(float(x))


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _margin_table(report, out) -> None:
    print(f"{'m':>4}  {'lambda_m':>20}  {'d^T_m':>6}  {'margin':>20}", file=out)
    tight = set(report.tight_indices)
    for i, (lam, d, mg) in enumerate(zip(report.eigenvalues, report.conjugate,
                                         report.prefix_margins), start=1):
        flag = "  tight" if i in tight else ""
        print(f"{i:>4}  {lam:>20.12f}  {d:>6}  {mg:>20.12e}{flag}", file=out)


def cmd_check(args) -> int:
    try:
        g = read_edge_list(args.path)
    except EdgeListError as exc:
        print(f"error: {args.path}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (OSError, GraphError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        report = gm_report(g, gm_tol=args.gm_tol, tol=args.tol)
    except ConvergenceError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if args.json:
        doc = ReportDocument(
            command="check",
            graph={"vertex_count": g.vertex_count, "edge_count": g.edge_count, "source": str(args.path)},
            eigenvalues=report.eigenvalues.tolist(), conjugate=list(report.conjugate),
            margins=list(report.prefix_margins), verdict=report.holds)
        print(doc.to_json())
    else:
        print(f"graph: {g.vertex_count} vertices, {g.edge_count} edges")
        _margin_table(report, sys.stdout)
        print(f"verdict: {'holds' if report.holds else 'FAILS'} (min margin {report.min_margin:.3e})")
    return EXIT_OK if report.holds else EXIT_FAIL


def cmd_analyze(args) -> int:
    try:
        p = PencilParams(args.n, tuple(args.k))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        table = brackets(p)
        roots = find_roots(p)
        assembled = assemble_spectrum_degenerate(p.ks, roots) if p.degenerate else assemble_spectrum(p, roots)
        report = gm_report_semibipartite(p, cross_check=args.cross_check, gm_tol=args.gm_tol)
        lemma = verify_main_lemma(p, roots)
        traces = None
        if args.trace:
            if p.degenerate:
                print("error: --trace needs a nondegenerate instance (j < n)", file=sys.stderr)
                return EXIT_INPUT
            a = args.a if args.a is not None else -float(p.n)
            if not a < 1 - p.n:
                print(f"error: --a must be < 1 - n = {1 - p.n}", file=sys.stderr)
                return EXIT_INPUT
            traces = track_all(p, a, steps=args.steps)
    except NUMERIC_ERRORS as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    verdict = report.holds and lemma.holds
    if args.json:
        extra = {
            "roots": {"values": list(roots.roots), "multiplicities": list(roots.multiplicities)},
            "brackets": {"r_minus": list(table.r_minus), "r_plus": list(table.r_plus),
                         "intervals": [{"lo": b.lo, "hi": b.hi, "zeros": b.zeros} for b in table.intervals]},
            "pieces": {k: list(v) for k, v in assembled.pieces.items()},
            "lemma_slack": lemma.slack,
        }
        if traces is not None:
            extra["traces"] = [as_plain(tr) for tr in traces]
        doc = ReportDocument(
            command="analyze", params={"n": p.n, "ks": list(p.ks)},
            eigenvalues=report.eigenvalues.tolist(), conjugate=list(report.conjugate),
            margins=list(report.prefix_margins), verdict=verdict,
            lemma_chain=list(lemma.chain), cross_check_deviation=report.cross_deviation,
            extra=extra)
        print(doc.to_json())
        return EXIT_OK if verdict else EXIT_FAIL

    print(f"instance: n={p.n} k={','.join(map(str, p.ks))} (j={p.j}"
          f"{', degenerate' if p.degenerate else ''})")
    print("poles of G:")
    for l, (rm, rp) in enumerate(zip(table.r_minus, table.r_plus), start=1):
        print(f"  l={l}  r-={rm:.12f}  r+={rp:.12f}")
    print("zero brackets:")
    for b in table.intervals:
        print(f"  ({b.lo:.12f}, {b.hi:.12f})  zeros={b.zeros}")
    print("roots of F:")
    for r, m in zip(roots.roots, roots.multiplicities):
        print(f"  {r:.12f}  x{m}")
    if p.degenerate:
        print(f"removed one copy of {assembled.removed:.12f} (multiplicity {assembled.multiplicity_at_j})")
    print("spectrum: " + ", ".join(f"{v:.12f}" for v in assembled.merged))
    _margin_table(report, sys.stdout)
    print(f"top-{p.j} sum {lemma.top_sum:.6f}  bound {lemma.bound}  slack {lemma.slack:.6e}")
    print("lemma chain: " + " >= ".join(f"{c:.9f}" for c in lemma.chain))
    if report.cross_deviation is not None:
        print(f"cross-check max deviation: {report.cross_deviation:.3e}")
    if traces is not None:
        print(f"homotopy a={traces[0].a}:")
        for tr in traces:
            print(f"  root {tr.root_index}: t=0 {tr.values[0]:.12f}  "
                  f"t={tr.t_grid[-1]:.4f} {tr.values[-1]:.12f}  t=1 {tr.endpoint:.12f}")
    print(f"verdict: {'holds' if verdict else 'FAILS'}")
    return EXIT_OK if verdict else EXIT_FAIL


def _record_dict(rec) -> dict:
    return {
        "params": {"n": rec.params.n, "ks": list(rec.params.ks)},
        "j": rec.params.j,
        "min_margin": None if math.isnan(rec.min_margin) else rec.min_margin,
        "tight_index": rec.tight_index,
        "cross_dev": rec.cross_dev,
        "verdict": rec.verdict,
        "error": rec.error,
    }


def cmd_sweep(args) -> int:
    if args.n_max < 1 or args.k_max < 1:
        print("error: bounds must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    records = sweep(args.n_max, args.k_max, mode=args.mode, workers=args.workers, gm_tol=args.gm_tol)
    out = sys.stdout
    summary = summarize([])
    docs = []
    if not args.json:
        print(",".join(CSV_COLUMNS), file=out)
    for rec in records:
        summary.add(rec)
        if args.json:
            docs.append(_record_dict(rec))
            continue
        p = rec.params
        row = [str(p.n), str(p.j), ";".join(map(str, p.ks)), _num(rec.min_margin),
               str(rec.tight_index), _num(rec.cross_dev),
               "holds" if rec.verdict else ("error" if rec.error else "fails")]
        print(",".join(row), file=out)
        if rec.error:
            print(f"# error n={p.n} k={';'.join(map(str, p.ks))}: {rec.error}", file=out)
    finite_min = summary.min_margin if math.isfinite(summary.min_margin) else None
    if args.json:
        doc = {
            "schema_version": SCHEMA_VERSION, "command": "sweep", "mode": args.mode,
            "records": docs,
            "summary": {
                "instances": summary.instances, "failures": summary.failures,
                "errors": summary.errors, "min_margin": finite_min,
                "argmin": None if summary.argmin is None else
                {"n": summary.argmin.n, "ks": list(summary.argmin.ks)},
                "max_cross_dev": summary.max_cross_dev, "verdict": summary.all_hold,
            },
        }
        print(json.dumps(doc, allow_nan=False), file=out)
    else:
        argmin = summary.argmin
        print(f"# summary instances={summary.instances} failures={summary.failures} "
              f"errors={summary.errors} min_margin={_num(finite_min)} "
              f"argmin_n={argmin.n if argmin else ''} "
              f"argmin_k={';'.join(map(str, argmin.ks)) if argmin else ''} "
              f"max_cross_dev={_num(summary.max_cross_dev)} "
              f"verdict={'holds' if summary.all_hold else 'fails'}", file=out)
    return EXIT_OK if summary.all_hold else EXIT_FAIL


def cmd_majorize(args) -> int:
    try:
        rep = majorizes(args.a, args.b, tol=args.tol)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.json:
        print(json.dumps({
            "schema_version": SCHEMA_VERSION, "command": "majorize", "a": list(map(float, args.a)),
            "b": list(map(float, args.b)), "margins": list(rep.prefix_margins),
            "verdict": rep.holds, "first_violation": rep.first_violation}))
    else:
        for l, mg in enumerate(rep.prefix_margins, start=1):
            print(f"{l:>4}  {mg:>20.12e}")
        if rep.holds:
            print("a majorizes b")
        else:
            print(f"a does not majorize b (first violation at prefix {rep.first_violation})")
    return EXIT_OK if rep.holds else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gmqep", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="check every Grone-Merris inequality for an edge-list graph")
    check.add_argument("path")
    check.add_argument("--json", action="store_true")
    check.add_argument("--tol", type=float, default=DEFAULT_JACOBI_TOL, help="Jacobi off-diagonal tolerance")
    check.add_argument("--gm-tol", type=float, default=GM_TOL)
    check.set_defaults(func=cmd_check)

    analyze = sub.add_parser("analyze", help="analyse a 1-regular semi-bipartite instance")
    analyze.add_argument("--n", type=int, required=True, help="clique size")
    analyze.add_argument("--k", type=_int_list, required=True, help="pendant counts, e.g. 3,1,1")
    analyze.add_argument("--cross-check", action="store_true", help="also run the dense eigensolver")
    analyze.add_argument("--trace", action="store_true", help="track the top roots along the homotopy")
    analyze.add_argument("--a", type=float, default=None, help="homotopy constant (default -n)")
    analyze.add_argument("--steps", type=int, default=64)
    analyze.add_argument("--json", action="store_true")
    analyze.add_argument("--gm-tol", type=float, default=GM_TOL)
    analyze.set_defaults(func=cmd_analyze)

    sw = sub.add_parser("sweep", help="sweep all instances up to the given bounds")
    sw.add_argument("--n-max", type=int, required=True)
    sw.add_argument("--k-max", type=int, required=True)
    sw.add_argument("--mode", choices=("pipeline", "oracle", "both"), default="pipeline")
    sw.add_argument("--workers", type=int, default=1)
    sw.add_argument("--json", action="store_true")
    sw.add_argument("--gm-tol", type=float, default=GM_TOL)
    sw.set_defaults(func=cmd_sweep)

    maj = sub.add_parser("majorize", help="test whether sequence a majorizes sequence b")
    maj.add_argument("--a", type=_float_list, required=True)
    maj.add_argument("--b", type=_float_list, required=True)
    maj.add_argument("--tol", type=float, default=DEFAULT_MAJORIZATION_TOL)
    maj.add_argument("--json", action="store_true")
    maj.set_defaults(func=cmd_majorize)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors already; keep --help at 0
        return int(exc.code or 0)
    return args.func(args)


def main_exit() -> None:
    sys.exit(main())
