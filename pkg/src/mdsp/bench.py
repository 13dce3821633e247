"""Benchmark harness: run solvers on generated instances, check ratio bounds.

CSV columns (header always written, fixed order)::

    instance_id, seed, n, m, B, delta_deg, delta_conc, alg, profit, opt, ratio, bound_ok, wall_ms

``opt`` and ``ratio`` are blank when the oracle did not run. ``bound_ok`` is
filled only for greedy14 / greedy13 rows whose instance has max degree <= m
and a known optimum. ``wall_ms`` is blank unless timing was requested, which
keeps the file byte-reproducible by default. Rows are sorted by (sweep set
index, repetition, algorithm position in the sweep's list).

A sweep file is JSON::

    {"base_seed": 1,
     "algorithms": ["greedy14", "greedy13", "mr-s", "mr-m", "oracle", "dp-unit"],
     "oracle_max_jobs": 12, "oracle_max_drones": 4,
     "sets": [{"name": "small", "repetitions": 100,
               "params": {"n": 10, "m": 3, "budget": 6, "horizon": 20,
                          "duration": [1, 4], "cost": [1, 4], "profit": [1, 10],
                          "unit_cost": false, "require_delta_le_m": true}}]}

Instance seeds are ``mix_seed(base_seed, set_index, repetition)``.
"""
from __future__ import annotations

import csv
import io
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable

from .conflicts import delta_stats
from .errors import InstanceFormatError, ResourceLimitError, VariantMismatchError
from .exact import SearchLimits, solve_exact
from .generate import GenParams, generate, mix_seed
from .model import Instance, SolveReport, audit_family, exact_profit, validate_instance
from .solvers import ALGORITHMS, run

CSV_HEADER = ["instance_id", "seed", "n", "m", "B", "delta_deg", "delta_conc", "alg",
              "profit", "opt", "ratio", "bound_ok", "wall_ms"]
WORKERS_ENV = "MDSP_WORKERS"


def bound_threshold(alg: str, m: int, delta: int) -> Fraction | None:
    """Guaranteed fraction of OPT for the greedy solvers, else None."""
    if alg == "greedy14":
        return Fraction(m, 2 * (m + delta))
    if alg == "greedy13":
        return Fraction(m, 2 * m + delta)
    return None


@dataclass
class BenchRow:
    instance_id: str
    seed: int | str
    n: int
    m: int
    B: float
    delta_deg: int
    delta_conc: int
    alg: str
    profit: Fraction
    opt: Fraction | None
    feasible: bool
    wall_ms: float | None = None

    @property
    def ratio(self) -> Fraction | None:
        if self.opt is None or self.opt == 0:
            return None
        return self.profit / self.opt

    @property
    def bound_ok(self) -> bool | None:
        t = bound_threshold(self.alg, self.m, self.delta_deg)
        if t is None or self.opt is None or self.delta_deg > self.m:
            return None
        return self.profit >= t * self.opt

    def cells(self, timing: bool = True) -> list[str]:
        def num(x):
            return "" if x is None else repr(float(x))

        bound = self.bound_ok
        return [
            self.instance_id, str(self.seed), str(self.n), str(self.m), repr(float(self.B)),
            str(self.delta_deg), str(self.delta_conc), self.alg,
            num(self.profit), num(self.opt), num(self.ratio),
            "" if bound is None else str(bound).lower(),
            f"{self.wall_ms:.3f}" if timing and self.wall_ms is not None else "",
        ]


@dataclass
class InstanceResult:
    rows: list[BenchRow]
    opt: Fraction | None
    reports: dict[str, SolveReport] = field(default_factory=dict)
    skipped: dict[str, str] = field(default_factory=dict)


def evaluate(
    inst: Instance,
    algorithms: Iterable[str],
    instance_id: str = "instance",
    seed: int | str = "",
    limits: SearchLimits | None = None,
) -> InstanceResult:
    """Run every algorithm on one instance and the oracle when within caps.

    Algorithms that do not apply (dp-unit on non-unit costs, any cap
    exceeded) are recorded in ``skipped`` and produce no row.
    """
    inst, _ = validate_instance(inst)
    stats = delta_stats(inst)
    limits = limits or SearchLimits()
    reports: dict[str, SolveReport] = {}
    skipped: dict[str, str] = {}
    opt = None
    try:
        oracle = solve_exact(inst, limits)
        reports["oracle"] = oracle
        opt = exact_profit(oracle.family, inst)
    except ResourceLimitError as exc:
        skipped["oracle"] = str(exc)
    rows = []
    for alg in algorithms:
        if alg not in reports:
            if alg in skipped:
                continue
            try:
                reports[alg] = run(alg, inst, limits)
            except (VariantMismatchError, ResourceLimitError) as exc:
                skipped[alg] = str(exc)
                continue
        rep = reports[alg]
        ok, _ = audit_family(rep.family, inst, max_drones=1 if alg == "mr-s" else inst.m)
        rows.append(BenchRow(
            instance_id, seed, inst.n, inst.m, inst.budget,
            stats["delta_degree"], stats["delta_concurrency"], alg,
            exact_profit(rep.family, inst), opt, ok and rep.feasible, rep.wall_time * 1000,
        ))
    return InstanceResult(rows, opt, reports, skipped)


def write_csv(rows: Iterable[BenchRow], fh, timing: bool = True) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(r.cells(timing))


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

_SWEEP_KEYS = {"base_seed", "algorithms", "sets", "oracle_max_jobs", "oracle_max_drones"}
_SET_KEYS = {"name", "repetitions", "params"}
_PARAM_KEYS = {"n", "m", "budget", "horizon", "duration", "cost", "profit",
               "unit_cost", "require_delta_le_m", "max_retries"}


@dataclass
class SweepSet:
    name: str
    repetitions: int
    params: GenParams


@dataclass
class Sweep:
    base_seed: int
    algorithms: list[str]
    sets: list[SweepSet]
    limits: SearchLimits


def _pair(v, what) -> tuple[float, float]:
    if not (isinstance(v, list) and len(v) == 2):
        raise InstanceFormatError(f"{what} must be a [min, max] pair")
    return float(v[0]), float(v[1])


def sweep_from_dict(data: dict[str, Any]) -> Sweep:
    if not isinstance(data, dict) or set(data) - _SWEEP_KEYS or "sets" not in data:
        raise InstanceFormatError(f"sweep keys must be a subset of {sorted(_SWEEP_KEYS)} incl. 'sets'")
    algs = list(data.get("algorithms", ["greedy14", "greedy13", "mr-s", "mr-m", "oracle"]))
    unknown = [a for a in algs if a not in ALGORITHMS]
    if unknown:
        raise InstanceFormatError(f"unknown algorithms {unknown}")
    sets = []
    for k, s in enumerate(data["sets"]):
        if not isinstance(s, dict) or set(s) - _SET_KEYS or "params" not in s:
            raise InstanceFormatError(f"sets[{k}] keys must be a subset of {sorted(_SET_KEYS)}")
        p = s["params"]
        if set(p) - _PARAM_KEYS:
            raise InstanceFormatError(f"sets[{k}].params has unknown keys {sorted(set(p) - _PARAM_KEYS)}")
        params = GenParams(
            n=int(p["n"]), m=int(p["m"]), budget=float(p["budget"]), horizon=float(p["horizon"]),
            duration_range=_pair(p.get("duration", [1, 4]), "duration"),
            cost_range=_pair(p.get("cost", [1, 4]), "cost"),
            profit_range=_pair(p.get("profit", [1, 10]), "profit"),
            unit_cost=bool(p.get("unit_cost", False)),
            require_delta_le_m=bool(p.get("require_delta_le_m", False)),
            max_retries=int(p.get("max_retries", 10_000)),
        )
        params.check()
        sets.append(SweepSet(str(s.get("name", f"set{k}")), int(s.get("repetitions", 1)), params))
    limits = SearchLimits(
        max_jobs=int(data.get("oracle_max_jobs", 14)),
        max_drones=int(data.get("oracle_max_drones", 4)),
    )
    return Sweep(int(data.get("base_seed", 0)), algs, sets, limits)


def load_sweep(path) -> Sweep:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"invalid sweep JSON: {exc}") from exc
    try:
        return sweep_from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InstanceFormatError):
            raise
        raise InstanceFormatError(f"malformed sweep: {exc}") from exc


def _task(args) -> tuple[int, int, list[BenchRow], dict[str, str]]:
    set_index, rep, name, params, seed, algorithms, limits = args
    p = GenParams(**{**params.__dict__, "seed": seed})
    inst = generate(p)
    res = evaluate(inst, algorithms, f"{name}-{rep:04d}", seed, limits)
    return set_index, rep, res.rows, res.skipped


def resolve_workers(flag: int | None) -> int:
    if flag is not None:
        return max(1, flag)
    return max(1, int(os.environ.get(WORKERS_ENV, "1")))


@dataclass
class BenchResult:
    rows: list[BenchRow]
    summary: dict[str, Any]

    @property
    def violations(self) -> int:
        return self.summary["bound_violations"] + self.summary["infeasible_outputs"]


def run_sweep(sweep: Sweep, workers: int = 1) -> BenchResult:
    t0 = time.perf_counter()
    tasks = [
        (si, rep, s.name, s.params, mix_seed(sweep.base_seed, si, rep), sweep.algorithms, sweep.limits)
        for si, s in enumerate(sweep.sets)
        for rep in range(s.repetitions)
    ]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_task, tasks, chunksize=8))
    else:
        results = [_task(t) for t in tasks]
    results.sort(key=lambda r: (r[0], r[1]))
    rows = [row for r in results for row in r[2]]
    return BenchResult(rows, summarize(rows, sweep.algorithms, time.perf_counter() - t0))


def summarize(rows: list[BenchRow], algorithms: list[str], elapsed: float | None = None) -> dict[str, Any]:
    per_alg: dict[str, Any] = {}
    for alg in algorithms:
        mine = [r for r in rows if r.alg == alg]
        ratios = [r.ratio for r in mine if r.ratio is not None]
        per_alg[alg] = {
            "rows": len(mine),
            "min_ratio": float(min(ratios)) if ratios else None,
            "mean_ratio": float(sum(ratios) / len(ratios)) if ratios else None,
            "bound_checked": sum(r.bound_ok is not None for r in mine),
            "bound_violations": sum(r.bound_ok is False for r in mine),
            "infeasible": sum(not r.feasible for r in mine),
        }
    bad = [r for r in rows if r.bound_ok is False or not r.feasible]
    summary = {
        "instances": len({r.instance_id for r in rows}),
        "rows": len(rows),
        "bound_violations": sum(r.bound_ok is False for r in rows),
        "infeasible_outputs": sum(not r.feasible for r in rows),
        "violating_seeds": sorted({str(r.seed) for r in bad}),
        "algorithms": per_alg,
    }
    g13, g14 = per_alg.get("greedy13", {}), per_alg.get("greedy14", {})
    if g13.get("mean_ratio") is not None and g14.get("mean_ratio") is not None:
        summary["greedy13_mean_ratio_ge_greedy14"] = g13["mean_ratio"] >= g14["mean_ratio"]
    if elapsed is not None:
        summary["elapsed_seconds"] = round(elapsed, 3)
    return summary


def run_bench(sweep: Sweep, out_dir, workers: int = 1, timing: bool = False) -> BenchResult:
    """Run a sweep and write ``bench.csv`` and ``summary.json`` into ``out_dir``."""
    result = run_sweep(sweep, workers)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    write_csv(result.rows, buf, timing)
    (out / "bench.csv").write_text(buf.getvalue(), encoding="utf-8")
    summary = dict(result.summary)
    if not timing:
        summary.pop("elapsed_seconds", None)
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return result
