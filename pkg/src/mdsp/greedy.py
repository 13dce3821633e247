"""Density-greedy approximation for MDSP, in two correction variants.

Both variants share one fill phase over ``m + Δ`` drones (Δ = max degree of
the conflict graph): jobs are taken in non-increasing profit/cost density and
placed on the lowest-indexed drone that is not critical and holds no
conflicting job. A drone whose load strictly exceeds the budget after an
addition becomes *critical*, remembering the job that tipped it over. The fill
stops once ``m`` drones are critical.

* ``solve_greedy14`` discards, on each critical drone, the cheaper (by profit)
  of the last job and the rest of the schedule, then keeps the ``m`` most
  profitable drones. Guarantee: ``m / (2(m + Δ)) * OPT``.
* ``solve_greedy13`` moves the discarded part to one of ``m`` extra overflow
  drones instead, so no profit is lost before selection. Guarantee:
  ``m / (2m + Δ) * OPT``.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any

from .conflicts import build_conflict_graph, max_concurrency, max_degree_delta
from .model import (
    AssignmentFamily,
    DroneSchedule,
    Instance,
    Job,
    SolveReport,
    audit_family,
    conflicts,
    scale_to_ints,
    validate_instance,
)


@dataclass(frozen=True)
class Density:
    job_id: int
    value: float  # +inf for zero-cost jobs


def density_key(job: Job) -> tuple:
    """Sort key: zero-cost first, then density desc, profit desc, id asc."""
    if job.cost == 0:
        return (0, Fraction(0), -Fraction(job.profit), job.id)
    return (1, -(Fraction(job.profit) / Fraction(job.cost)), -Fraction(job.profit), job.id)


def density_order(jobs) -> list[Job]:
    return sorted(jobs, key=density_key)


def densities(inst: Instance) -> list[Density]:
    return [
        Density(j.id, math.inf if j.cost == 0 else j.profit / j.cost)
        for j in density_order(inst.jobs)
    ]


@dataclass(frozen=True)
class FillEvent:
    job_id: int
    drone_id: int
    cumulative_cost: float
    critical: bool


@dataclass(frozen=True)
class Correction:
    drone_id: int
    last_job: int
    branch: str  # "drop_last" keeps S_i minus L_i, "keep_last" keeps only L_i
    kept: tuple[int, ...]
    removed: tuple[int, ...]
    target: int | None  # overflow drone receiving the removed jobs, None when discarded


@dataclass
class GreedyTrace:
    m: int
    delta: int
    pool_size: int
    order: list[int]
    events: list[FillEvent]
    pre_correction_family: AssignmentFamily
    critical_set: list[int]
    last_added: dict[int, int]
    unassigned: list[int]
    anomalies: list[int] = field(default_factory=list)
    corrections: list[Correction] = field(default_factory=list)
    final_family: AssignmentFamily | None = None
    selected: AssignmentFamily | None = None

    def to_dict(self) -> dict[str, Any]:
        def fam(f: AssignmentFamily | None):
            if f is None:
                return None
            return [{"drone_id": s.drone_id, "job_ids": s.sorted_ids(),
                     "cost": s.cached_cost, "profit": s.cached_profit} for s in f]

        return {
            "m": self.m,
            "delta": self.delta,
            "pool_size": self.pool_size,
            "order": self.order,
            "events": [
                {"job_id": e.job_id, "drone_id": e.drone_id,
                 "cumulative_cost": e.cumulative_cost, "critical": e.critical}
                for e in self.events
            ],
            "critical_set": self.critical_set,
            "last_added": {str(k): v for k, v in self.last_added.items()},
            "unassigned": self.unassigned,
            "anomalies": self.anomalies,
            "corrections": [
                {"drone_id": c.drone_id, "last_job": c.last_job, "branch": c.branch,
                 "kept": list(c.kept), "removed": list(c.removed), "target": c.target}
                for c in self.corrections
            ],
            "pre_correction_family": fam(self.pre_correction_family),
            "final_family": fam(self.final_family),
            "selected": fam(self.selected),
        }


def greedy_fill(inst: Instance, pool_size: int, m: int | None = None) -> GreedyTrace:
    """Run the fill phase over drones ``1..pool_size``.

    ``m`` (default ``inst.m``) is the number of critical drones that ends the
    fill. Jobs left over after the early stop are listed in ``unassigned``;
    jobs for which no drone was eligible are listed in ``anomalies``.
    """
    m = inst.m if m is None else m
    order = density_order(inst.jobs)
    scaled, _ = scale_to_ints([j.cost for j in order] + [inst.budget])
    cost_of = {j.id: c for j, c in zip(order, scaled)}
    budget = scaled[-1]

    held: list[list[Job]] = [[] for _ in range(pool_size)]
    load = [0] * pool_size
    critical: list[int] = []
    is_critical = [False] * pool_size
    last_added: dict[int, int] = {}
    events: list[FillEvent] = []
    anomalies: list[int] = []
    unassigned: list[int] = []

    for pos, job in enumerate(order):
        if len(critical) >= m:
            unassigned = [j.id for j in order[pos:]]
            break
        target = next(
            (d for d in range(pool_size)
             if not is_critical[d] and not any(conflicts(job, k) for k in held[d])),
            None,
        )
        if target is None:
            anomalies.append(job.id)
            continue
        held[target].append(job)
        load[target] += cost_of[job.id]
        tipped = load[target] > budget
        if tipped:
            is_critical[target] = True
            critical.append(target + 1)
            last_added[target + 1] = job.id
        events.append(FillEvent(job.id, target + 1, math.fsum(k.cost for k in held[target]), tipped))

    family = AssignmentFamily(
        tuple(DroneSchedule.build(d + 1, held[d]) for d in range(pool_size)),
        inst.fingerprint(),
    )
    return GreedyTrace(
        m=m,
        delta=max(pool_size - m, 0),
        pool_size=pool_size,
        order=[j.id for j in order],
        events=events,
        pre_correction_family=family,
        critical_set=critical,
        last_added=last_added,
        unassigned=unassigned,
        anomalies=anomalies,
    )


def _split(schedule: DroneSchedule, last: int, inst: Instance) -> tuple[str, list[int], list[int]]:
    """Decide which side of a critical drone survives: returns (branch, kept, removed)."""
    rest = sorted(schedule.job_ids - {last})
    p_last = Fraction(inst.job(last).profit)
    p_rest = sum((Fraction(inst.job(i).profit) for i in rest), Fraction(0))
    if p_rest >= p_last:
        return "drop_last", rest, [last]
    return "keep_last", [last], rest


def correct_discard(trace: GreedyTrace, inst: Instance) -> GreedyTrace:
    schedules = {s.drone_id: s for s in trace.pre_correction_family}
    corrections = []
    for d in trace.critical_set:
        last = trace.last_added[d]
        branch, kept, removed = _split(schedules[d], last, inst)
        schedules[d] = DroneSchedule.from_ids(d, kept, inst)
        corrections.append(Correction(d, last, branch, tuple(kept), tuple(removed), None))
    final = AssignmentFamily(
        tuple(schedules[s.drone_id] for s in trace.pre_correction_family),
        trace.pre_correction_family.instance_ref,
    )
    return replace(trace, corrections=corrections, final_family=final)


def correct_reassign(trace: GreedyTrace, inst: Instance) -> GreedyTrace:
    """Like ``correct_discard`` but park the removed part on overflow drones.

    The ``i``-th drone to go critical sends its removed jobs to drone
    ``pool_size + i``; there are ``m`` overflow drones in total.
    """
    schedules = {s.drone_id: s for s in trace.pre_correction_family}
    overflow = {trace.pool_size + i: DroneSchedule.empty(trace.pool_size + i)
                for i in range(1, trace.m + 1)}
    corrections = []
    for i, d in enumerate(trace.critical_set, start=1):
        last = trace.last_added[d]
        branch, kept, removed = _split(schedules[d], last, inst)
        target = trace.pool_size + i
        schedules[d] = DroneSchedule.from_ids(d, kept, inst)
        overflow[target] = DroneSchedule.from_ids(target, removed, inst)
        corrections.append(Correction(d, last, branch, tuple(kept), tuple(removed), target))
    final = AssignmentFamily(
        tuple(schedules[s.drone_id] for s in trace.pre_correction_family)
        + tuple(overflow[k] for k in sorted(overflow)),
        trace.pre_correction_family.instance_ref,
    )
    return replace(trace, corrections=corrections, final_family=final)


def select_top_m(family: AssignmentFamily, m: int) -> AssignmentFamily:
    """Keep the ``m`` most profitable schedules, ties to the lower drone id."""
    ranked = sorted(family.schedules, key=lambda s: (-Fraction(s.cached_profit), s.drone_id))
    chosen = ranked[:m]
    next_id = max((s.drone_id for s in family.schedules), default=0) + 1
    while len(chosen) < m:
        chosen.append(DroneSchedule.empty(next_id))
        next_id += 1
    return AssignmentFamily(tuple(chosen), family.instance_ref)


def _solve(inst: Instance, algorithm: str, reassign: bool) -> tuple[SolveReport, GreedyTrace]:
    t0 = time.perf_counter()
    inst, dropped = validate_instance(inst)
    delta = max_degree_delta(build_conflict_graph(inst))
    trace = greedy_fill(inst, inst.m + delta)
    trace = correct_reassign(trace, inst) if reassign else correct_discard(trace, inst)
    trace.selected = select_top_m(trace.final_family, inst.m)
    wall = time.perf_counter() - t0
    ok, violations = audit_family(trace.selected, inst, max_drones=inst.m)
    report = SolveReport(
        algorithm=algorithm,
        profit=trace.selected.profit,
        per_drone=list(trace.selected.schedules),
        feasible=ok,
        wall_time=wall,
        params={
            "delta_degree": delta,
            "delta_concurrency": max_concurrency(inst),
            "pool_size": trace.pool_size,
            "overflow_drones": inst.m if reassign else 0,
            "critical_drones": len(trace.critical_set),
            "anomalies": len(trace.anomalies),
            "dropped_jobs": dropped,
        },
        instance_ref=inst.fingerprint(),
        violations=violations,
    )
    return report, trace


def solve_greedy14(inst: Instance) -> tuple[SolveReport, GreedyTrace]:
    return _solve(inst, "greedy14", reassign=False)


def solve_greedy13(inst: Instance) -> tuple[SolveReport, GreedyTrace]:
    return _solve(inst, "greedy13", reassign=True)
