"""Exact MDSP solver for small instances and an ILP text exporter.

The search visits jobs in id order. Each job is tried on every drone that
stays conflict-free and within budget, then left out. A branch is cut when its
profit plus all remaining profit cannot beat the incumbent. Empty drones are
interchangeable, so by default a job may only open the first empty drone.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction

from .errors import ResourceLimitError
from .model import (
    AssignmentFamily,
    DroneSchedule,
    Instance,
    SolveReport,
    audit_family,
    conflicts,
    scale_to_ints,
    validate_instance,
)


@dataclass(frozen=True)
class SearchLimits:
    max_jobs: int = 14
    max_drones: int = 4
    max_nodes: int | None = None
    max_seconds: float | None = None


@dataclass
class SearchNode:
    """Mutable search frontier; the solver keeps one and backtracks in place."""
    next_job_index: int
    masks: list[int]          # per drone: bitmask of held job positions
    loads: list[int]          # per drone: scaled cost
    profit: int               # scaled partial profit
    remaining_bound: int      # scaled profit of jobs not yet decided


def _check_caps(inst: Instance, limits: SearchLimits) -> None:
    if inst.n > limits.max_jobs:
        raise ResourceLimitError(f"exact oracle cap max_jobs={limits.max_jobs} exceeded (n={inst.n})")
    if inst.m > limits.max_drones:
        raise ResourceLimitError(f"exact oracle cap max_drones={limits.max_drones} exceeded (m={inst.m})")


def solve_exact(
    inst: Instance,
    limits: SearchLimits | None = None,
    symmetry_pruning: bool = True,
) -> SolveReport:
    limits = limits or SearchLimits()
    t0 = time.perf_counter()
    inst, dropped = validate_instance(inst)
    _check_caps(inst, limits)

    jobs = sorted(inst.jobs, key=lambda j: j.id)
    n, m = len(jobs), inst.m
    scaled_costs, _ = scale_to_ints([j.cost for j in jobs] + [inst.budget])
    budget = scaled_costs.pop()
    profits, pscale = scale_to_ints([j.profit for j in jobs])
    conflict_mask = [0] * n
    for a in range(n):
        for b in range(n):
            if a != b and conflicts(jobs[a], jobs[b]):
                conflict_mask[a] |= 1 << b
    suffix = [0] * (n + 1)
    for k in range(n - 1, -1, -1):
        suffix[k] = suffix[k + 1] + profits[k]

    node = SearchNode(0, [0] * m, [0] * m, 0, suffix[0])
    best_profit = 0
    best_masks = [0] * m
    nodes = 0
    deadline = None if limits.max_seconds is None else t0 + limits.max_seconds

    def visit(k: int) -> None:
        nonlocal best_profit, best_masks, nodes
        nodes += 1
        if limits.max_nodes is not None and nodes > limits.max_nodes:
            raise ResourceLimitError(f"exact oracle cap max_nodes={limits.max_nodes} exceeded")
        if deadline is not None and nodes % 4096 == 0 and time.perf_counter() > deadline:
            raise ResourceLimitError(f"exact oracle cap max_seconds={limits.max_seconds} exceeded")
        if node.profit > best_profit:
            best_profit = node.profit
            best_masks = list(node.masks)
        if k == n or node.profit + suffix[k] <= best_profit:
            return
        node.next_job_index = k
        node.remaining_bound = suffix[k]
        bit, c, p = 1 << k, scaled_costs[k], profits[k]
        for d in range(m):
            if node.masks[d] & conflict_mask[k] or node.loads[d] + c > budget:
                continue
            node.masks[d] |= bit
            node.loads[d] += c
            node.profit += p
            visit(k + 1)
            node.masks[d] ^= bit
            node.loads[d] -= c
            node.profit -= p
            if symmetry_pruning and node.masks[d] == 0:
                break  # later empty drones would give a mirror image of this branch
        visit(k + 1)

    visit(0)

    family = AssignmentFamily(
        tuple(
            DroneSchedule.build(d + 1, [jobs[k] for k in range(n) if best_masks[d] >> k & 1])
            for d in range(m)
        ),
        inst.fingerprint(),
    )
    wall = time.perf_counter() - t0
    ok, violations = audit_family(family, inst, max_drones=m)
    return SolveReport(
        algorithm="oracle",
        profit=float(Fraction(best_profit, pscale)),
        per_drone=list(family.schedules),
        feasible=ok,
        wall_time=wall,
        params={
            "nodes": nodes,
            "symmetry_pruning": symmetry_pruning,
            "max_jobs": limits.max_jobs,
            "max_drones": limits.max_drones,
            "dropped_jobs": dropped,
        },
        instance_ref=inst.fingerprint(),
        violations=violations,
    )


def _num(x: float) -> str:
    """Shortest round-trip decimal, without a trailing ``.0`` for integers."""
    x = float(x)
    return str(int(x)) if x.is_integer() and abs(x) < 1e16 else repr(x)


def _term(coef: float, var: str) -> str:
    return var if coef == 1 else f"{_num(coef)} {var}"


def _wrap(prefix: str, terms: list[str], suffix: str = "") -> list[str]:
    """Join ``terms`` with `` + ``; continuation lines start with ``+``."""
    lines, cur = [], prefix + terms[0]
    for t in terms[1:]:
        if len(cur) + len(t) > 250:
            lines.append(cur)
            cur = "    + " + t
        else:
            cur += " + " + t
    lines.append(cur + suffix)
    return lines


def export_lp(inst: Instance) -> str:
    """Write the MDSP integer program in CPLEX LP text format.

    Variables ``x_<drone>_<job>`` are binary. Rows: ``budget_<i>`` (per drone
    cost), ``assign_<j>`` (each job at most once) and ``conflict_<i>_<j>_<k>``
    for every drone and every *conflicting* job pair ``j < k``. Drones are
    numbered from 1, jobs use their ids, rows and columns come in ascending
    order.
    """
    inst, _ = validate_instance(inst)
    jobs = sorted(inst.jobs, key=lambda j: j.id)
    drones = range(1, inst.m + 1)

    def x(i: int, j: int) -> str:
        return f"x_{i}_{j}"

    out = ["\\ MDSP integer program", f"\\ m = {inst.m}, n = {len(jobs)}, B = {_num(inst.budget)}",
           "Maximize"]
    obj = [_term(j.profit, x(i, j.id)) for i in drones for j in jobs]
    out += _wrap(" obj: ", obj or ["0 x_dummy"])
    out.append("Subject To")
    for i in drones:
        if jobs:
            out += _wrap(f" budget_{i}: ", [_term(j.cost, x(i, j.id)) for j in jobs],
                         f" <= {_num(inst.budget)}")
    for j in jobs:
        out += _wrap(f" assign_{j.id}: ", [x(i, j.id) for i in drones], " <= 1")
    for i in drones:
        for a in range(len(jobs)):
            for b in range(a + 1, len(jobs)):
                if conflicts(jobs[a], jobs[b]):
                    ja, jb = jobs[a].id, jobs[b].id
                    out.append(f" conflict_{i}_{ja}_{jb}: {x(i, ja)} + {x(i, jb)} <= 1")
    out.append("Bounds")
    for i in drones:
        for j in jobs:
            out.append(f" 0 <= {x(i, j.id)} <= 1")
    if not jobs:
        out.append(" x_dummy = 0")
    out.append("Binary")
    for i in drones:
        for j in jobs:
            out.append(f" {x(i, j.id)}")
    out.append("End")
    return "\n".join(out) + "\n"
