"""Command-line entry point: ``mdsp {generate,solve,compare,bench,export-ilp}``.

Exit codes:

    0  success
    1  bench found a bound violation or an infeasible output
    2  bad command-line usage
    3  instance / sweep file could not be parsed or is malformed
    4  variant mismatch (dp-unit on an instance with non-unit costs)
    5  resource limit (solver cap exceeded)
    6  generation infeasible (rejection sampling exhausted)
"""
from __future__ import annotations

import argparse
import io
import json
import sys
from pathlib import Path

from . import bench
from .errors import (
    GenerationInfeasibleError,
    InstanceFormatError,
    ResourceLimitError,
    StructuralError,
    VariantMismatchError,
)
from .exact import export_lp
from .generate import GenParams, generate
from .greedy import solve_greedy13, solve_greedy14
from .model import dumps_instance, load_instance, save_instance, validate_instance
from .solvers import ALGORITHMS, run

EXIT_OK = 0
EXIT_BOUND_VIOLATION = 1
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_VARIANT = 4
EXIT_RESOURCE = 5
EXIT_GENERATION = 6


def _range(text: str) -> tuple[float, float]:
    try:
        lo, hi = text.split(":")
        return float(lo), float(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected MIN:MAX, got {text!r}") from None


def _load(path: str):
    inst = load_instance(path)
    inst, dropped = validate_instance(inst)
    if dropped:
        print(f"warning: dropped jobs with cost > budget: {dropped}", file=sys.stderr)
    return inst


def _write_text(path: str, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def cmd_generate(args) -> int:
    params = GenParams(
        n=args.n, m=args.m, budget=args.budget, horizon=args.horizon,
        duration_range=args.dur, cost_range=args.cost or (1.0, 4.0), profit_range=args.profit,
        unit_cost=args.unit_cost, require_delta_le_m=args.require_delta_le_m, seed=args.seed,
        max_retries=args.max_retries,
    )
    try:
        params.check()
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    inst = generate(params)
    if args.out:
        save_instance(inst, args.out)
    else:
        sys.stdout.write(dumps_instance(inst))
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = _load(args.instance)
    trace = None
    if args.algorithm == "greedy14":
        report, trace = solve_greedy14(inst)
    elif args.algorithm == "greedy13":
        report, trace = solve_greedy13(inst)
    else:
        report = run(args.algorithm, inst)
    text = json.dumps(report.to_dict(), indent=2) + "\n"
    if args.out:
        _write_text(args.out, text)
    else:
        sys.stdout.write(text)
    if args.trace:
        if trace is None:
            print("warning: --trace only applies to greedy14/greedy13", file=sys.stderr)
        else:
            _write_text(args.trace, json.dumps(trace.to_dict(), indent=2) + "\n")
    if args.export_ilp:
        _write_text(args.export_ilp, export_lp(inst))
    return EXIT_OK


def _table(rows) -> str:
    head = ["alg", "profit", "opt", "ratio", "bound_ok", "feasible", "wall_ms"]
    body = []
    for r in rows:
        c = dict(zip(bench.CSV_HEADER, r.cells(timing=True)))
        body.append([r.alg, c["profit"], c["opt"] or "-", c["ratio"] or "-",
                     c["bound_ok"] or "-", str(r.feasible).lower(), c["wall_ms"]])
    widths = [max(len(x) for x in col) for col in zip(head, *body)]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    return "\n".join(fmt.format(*line) for line in [head, *body]) + "\n"


def cmd_compare(args) -> int:
    inst = _load(args.instance)
    algs = [a.strip() for a in args.algorithms.split(",") if a.strip()]
    unknown = [a for a in algs if a not in ALGORITHMS]
    if unknown:
        print(f"error: unknown algorithms {unknown}", file=sys.stderr)
        return EXIT_USAGE
    res = bench.evaluate(inst, algs, Path(args.instance).stem)
    for alg, why in res.skipped.items():
        print(f"warning: {alg} skipped: {why}", file=sys.stderr)
    s = res.rows[0] if res.rows else None
    if s is not None:
        print(f"n={s.n} m={s.m} B={s.B!r} delta_deg={s.delta_deg} delta_conc={s.delta_conc}")
    sys.stdout.write(_table(res.rows))
    if args.csv:
        buf = io.StringIO()
        bench.write_csv(res.rows, buf, timing=True)
        _write_text(args.csv, buf.getvalue())
    return EXIT_OK


def cmd_bench(args) -> int:
    sweep = bench.load_sweep(args.sweep)
    result = bench.run_bench(sweep, args.out_dir, bench.resolve_workers(args.workers), args.timing)
    s = result.summary
    print(f"instances={s['instances']} rows={s['rows']} "
          f"bound_violations={s['bound_violations']} infeasible={s['infeasible_outputs']}")
    for alg, st in s["algorithms"].items():
        print(f"  {alg:9s} min_ratio={st['min_ratio']} mean_ratio={st['mean_ratio']} "
              f"checked={st['bound_checked']} violations={st['bound_violations']}")
    if result.violations:
        print(f"violating seeds: {' '.join(s['violating_seeds'])}", file=sys.stderr)
        return EXIT_BOUND_VIOLATION
    return EXIT_OK


def cmd_export_ilp(args) -> int:
    text = export_lp(_load(args.instance))
    if args.out:
        _write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mdsp", description="Multiple drone-delivery scheduling solvers")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a seeded random instance")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--budget", type=float, required=True)
    g.add_argument("--horizon", type=float, required=True)
    g.add_argument("--dur", type=_range, default=(1.0, 4.0), metavar="MIN:MAX")
    cost = g.add_mutually_exclusive_group()
    cost.add_argument("--cost", type=_range, metavar="MIN:MAX")
    cost.add_argument("--unit-cost", action="store_true")
    g.add_argument("--profit", type=_range, default=(1.0, 10.0), metavar="MIN:MAX")
    g.add_argument("--require-delta-le-m", action="store_true")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--max-retries", type=int, default=10_000)
    g.add_argument("--out", help="output file (default: stdout)")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", help="solve one instance and write a report")
    s.add_argument("instance")
    s.add_argument("--algorithm", "-a", choices=sorted(ALGORITHMS), default="greedy13")
    s.add_argument("--out", help="report file (default: stdout)")
    s.add_argument("--trace", help="greedy trace JSON output")
    s.add_argument("--export-ilp", metavar="PATH", help="also write the LP model")
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("compare", help="run several algorithms on one instance")
    c.add_argument("instance")
    c.add_argument("--algorithms", default="greedy14,greedy13,mr-s,mr-m,oracle,dp-unit")
    c.add_argument("--csv", help="also write rows as CSV")
    c.set_defaults(func=cmd_compare)

    b = sub.add_parser("bench", help="run a parameter sweep")
    b.add_argument("sweep")
    b.add_argument("--out-dir", required=True)
    b.add_argument("--workers", type=int, help=f"worker processes (env {bench.WORKERS_ENV}, default 1)")
    b.add_argument("--timing", action="store_true", help="fill wall_ms (CSV no longer reproducible)")
    b.set_defaults(func=cmd_bench)

    e = sub.add_parser("export-ilp", help="write the integer program in LP format")
    e.add_argument("instance")
    e.add_argument("--out")
    e.set_defaults(func=cmd_export_ilp)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InstanceFormatError, StructuralError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except VariantMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VARIANT
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except GenerationInfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GENERATION


if __name__ == "__main__":
    sys.exit(main())
