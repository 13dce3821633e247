"""Reconstructed MR-S / MR-M comparison heuristics.

MR-S scans jobs once in density order and takes a job whenever it fits the
remaining budget and overlaps nothing already taken. MR-M runs MR-S drone by
drone on whatever jobs are still free.
"""
from __future__ import annotations

import time

from .greedy import density_order
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


def _single_drone(jobs: list[Job], budget: float) -> list[Job]:
    order = density_order(jobs)
    scaled, _ = scale_to_ints([j.cost for j in order] + [budget])
    cap = scaled.pop()
    taken: list[Job] = []
    load = 0
    for job, c in zip(order, scaled):
        if load + c > cap or any(conflicts(job, k) for k in taken):
            continue
        taken.append(job)
        load += c
    return taken


def _report(algorithm: str, inst: Instance, drones: list[list[Job]], t0: float, dropped) -> SolveReport:
    family = AssignmentFamily(
        tuple(DroneSchedule.build(d + 1, js) for d, js in enumerate(drones)), inst.fingerprint()
    )
    ok, violations = audit_family(family, inst, max_drones=inst.m)
    return SolveReport(
        algorithm=algorithm,
        profit=family.profit,
        per_drone=list(family.schedules),
        feasible=ok,
        wall_time=time.perf_counter() - t0,
        params={"reconstructed": True, "drones_used": len(drones), "dropped_jobs": dropped},
        instance_ref=inst.fingerprint(),
        violations=violations,
    )


def solve_mr_s(inst: Instance) -> SolveReport:
    """Single-drone density greedy; ``inst.m`` is ignored."""
    t0 = time.perf_counter()
    inst, dropped = validate_instance(inst)
    return _report("mr-s", inst, [_single_drone(list(inst.jobs), inst.budget)], t0, dropped)


def solve_mr_m(inst: Instance) -> SolveReport:
    t0 = time.perf_counter()
    inst, dropped = validate_instance(inst)
    free = list(inst.jobs)
    drones = []
    for _ in range(inst.m):
        taken = _single_drone(free, inst.budget)
        ids = {j.id for j in taken}
        free = [j for j in free if j.id not in ids]
        drones.append(taken)
    return _report("mr-m", inst, drones, t0, dropped)
