"""Exact dynamic program for unit-cost MDSP with a small, fixed drone count.

A state records, for every drone, the rank of its latest job end time (0 for
an empty drone) and how many jobs it holds. Drones are identical, so states
are kept canonical: the per-drone ``(rank, load)`` slots sorted ascending.

For each state the table stores the best profit over all *fitting* families,
i.e. families whose drones match the state slot by slot, plus one witness.
A state is solved from its predecessors: every *top* slot (those at the
state's largest rank) gives up its last job, which ends exactly at the top
end time, and drops to any smaller rank with one job less. Extending a
predecessor means picking one distinct job ending at that time for each top
slot, each starting no earlier than the slot's previous end.

With ``n`` jobs the table has at most ``(n+1)^m (min(n,B)+1)^m`` states and
the whole run is ``O(n^(4m))``.
"""
from __future__ import annotations

import bisect
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, combinations_with_replacement, permutations, product
from typing import Iterator

from .errors import EmptyTopError, ResourceLimitError, VariantMismatchError
from .model import (
    AssignmentFamily,
    DroneSchedule,
    Instance,
    Job,
    SolveReport,
    audit_family,
    validate_instance,
)

Slot = tuple[int, int]           # (latest_end_rank, load)
DpState = tuple[Slot, ...]

DEFAULT_MAX_DRONES = 3


def canonical(slots) -> DpState:
    return tuple(sorted(slots))


def slot_ok(slot: Slot) -> bool:
    rank, load = slot
    return rank >= 0 and load >= 0 and (rank == 0) == (load == 0)


def top_of_state(q) -> set[int]:
    """Indices (0-based) of the slots at the state's largest end rank."""
    top_rank = max((r for r, _ in q), default=0)
    if top_rank == 0:
        raise EmptyTopError("the all-empty state has no top")
    return {i for i, (r, _) in enumerate(q) if r == top_rank}


def predecessor_candidates(q: DpState) -> Iterator[list[Slot]]:
    """Raw predecessor slot lists, aligned with ``q``'s slot order.

    Every top slot loses one job and drops to each smaller rank. Nothing is
    filtered or canonicalized here.
    """
    top = sorted(top_of_state(q))
    for drops in product(*(range(q[i][0]) for i in top)):
        slots = list(q)
        for i, r in zip(top, drops):
            slots[i] = (r, q[i][1] - 1)
        yield slots


def predecessors(q: DpState) -> list[DpState]:
    seen: dict[DpState, None] = {}
    for slots in predecessor_candidates(q):
        if all(slot_ok(s) for s in slots):
            seen.setdefault(canonical(slots), None)
    return list(seen)


@dataclass
class MpffaEntry:
    profit: Fraction = Fraction(0)
    witness: tuple[tuple[int, ...], ...] = ()   # job ids per canonical slot, in end order
    reachable: bool = False


@dataclass
class UnitCostDP:
    """Table builder for one instance. Call ``run()`` once, then query."""

    inst: Instance
    max_drones: int = DEFAULT_MAX_DRONES
    table: dict[DpState, MpffaEntry] = field(default_factory=dict)
    ends: list[float] = field(default_factory=list)
    by_rank: dict[int, list[Job]] = field(default_factory=dict)
    capacity: int = 0
    fill_time: float = 0.0

    def __post_init__(self) -> None:
        if not self.inst.is_unit_cost:
            bad = [j.id for j in self.inst.jobs if j.cost != 1]
            raise VariantMismatchError(f"unit-cost DP needs every cost == 1; jobs {bad[:5]} differ")
        if self.inst.m > self.max_drones:
            raise ResourceLimitError(
                f"unit-cost DP cap max_drones={self.max_drones} exceeded (m={self.inst.m})"
            )
        self.ends = sorted({j.end for j in self.inst.jobs})
        self.by_rank = {r: [] for r in range(1, len(self.ends) + 1)}
        for j in sorted(self.inst.jobs, key=lambda j: j.id):
            self.by_rank[self.rank_of(j.end)].append(j)
        self.capacity = min(self.inst.n, math.floor(self.inst.budget))

    def rank_of(self, t: float) -> int:
        return bisect.bisect_left(self.ends, t) + 1

    def end_of(self, rank: int) -> float:
        return -math.inf if rank == 0 else self.ends[rank - 1]

    def states(self) -> list[DpState]:
        values = [(0, 0)] + [
            (r, l) for r in range(1, len(self.ends) + 1) for l in range(1, self.capacity + 1)
        ]
        out = list(combinations_with_replacement(values, self.inst.m))
        out.sort(key=lambda q: (max(r for r, _ in q), sum(l for _, l in q), q))
        return out

    @property
    def state_bound(self) -> int:
        n, m = self.inst.n, self.inst.m
        return (n + 1) ** m * (min(n, self.capacity) + 1) ** m

    def extend(
        self, entry: MpffaEntry, q: DpState, prev_ranks: dict[int, int]
    ) -> Iterator[tuple[Fraction, dict[int, Job]]]:
        """Yield ``(profit, {top slot: job})`` for each feasible way to fill the top.

        ``prev_ranks`` maps each top slot of ``q`` to its rank in the predecessor.
        """
        top = sorted(prev_ranks)
        used = {i for slot in entry.witness for i in slot}
        candidates = self.by_rank.get(q[top[0]][0], [])
        for subset in combinations(candidates, len(top)):
            if any(j.id in used for j in subset):
                continue
            gain = sum((Fraction(j.profit) for j in subset), Fraction(0))
            for perm in permutations(subset):
                if all(j.start >= self.end_of(prev_ranks[i]) for i, j in zip(top, perm)):
                    yield entry.profit + gain, dict(zip(top, perm))

    def solve_state(self, q: DpState) -> MpffaEntry:
        if all(r == 0 for r, _ in q):
            return MpffaEntry(Fraction(0), tuple(() for _ in q), True)
        best = MpffaEntry()
        top = sorted(top_of_state(q))
        for slots in predecessor_candidates(q):
            if not all(slot_ok(s) for s in slots):
                continue
            order = sorted(range(len(slots)), key=lambda i: (slots[i], i))
            prev = tuple(slots[i] for i in order)
            entry = self.table.get(prev)
            if entry is None or not entry.reachable:
                continue
            pos = {i: k for k, i in enumerate(order)}
            prev_ranks = {i: slots[i][0] for i in top}
            for profit, placed in self.extend(entry, q, prev_ranks):
                if not best.reachable or profit > best.profit:
                    witness = tuple(
                        entry.witness[pos[i]] + ((placed[i].id,) if i in placed else ())
                        for i in range(len(q))
                    )
                    best = MpffaEntry(profit, witness, True)
        return best

    def run(self) -> tuple[DpState, MpffaEntry]:
        t0 = time.perf_counter()
        for q in self.states():
            self.table[q] = self.solve_state(q)
        self.fill_time = time.perf_counter() - t0
        best_state, best = None, None
        for q, e in self.table.items():
            if e.reachable and all(l <= self.capacity for _, l in q):
                if best is None or e.profit > best.profit:
                    best_state, best = q, e
        return best_state, best

    def state_of(self, witness) -> DpState:
        """Canonical state that a per-drone list of job ids fits."""
        slots = []
        for ids in witness:
            if not ids:
                slots.append((0, 0))
            else:
                slots.append((max(self.rank_of(self.inst.job(i).end) for i in ids), len(ids)))
        return canonical(slots)


def solve_unit_cost(inst: Instance, max_drones: int = DEFAULT_MAX_DRONES) -> SolveReport:
    report, _ = solve_unit_cost_with_table(inst, max_drones)
    return report


def solve_unit_cost_with_table(
    inst: Instance, max_drones: int = DEFAULT_MAX_DRONES
) -> tuple[SolveReport, UnitCostDP]:
    t0 = time.perf_counter()
    if not inst.is_unit_cost:
        bad = [j.id for j in inst.jobs if j.cost != 1]
        raise VariantMismatchError(f"unit-cost DP needs every cost == 1; jobs {bad[:5]} differ")
    inst, dropped = validate_instance(inst)
    dp = UnitCostDP(inst, max_drones=max_drones)
    _, best = dp.run()
    family = AssignmentFamily(
        tuple(DroneSchedule.from_ids(d + 1, ids, inst) for d, ids in enumerate(best.witness)),
        inst.fingerprint(),
    )
    ok, violations = audit_family(family, inst, max_drones=inst.m)
    report = SolveReport(
        algorithm="dp-unit",
        profit=family.profit,
        per_drone=list(family.schedules),
        feasible=ok,
        wall_time=time.perf_counter() - t0,
        params={
            "states": len(dp.table),
            "reachable_states": sum(e.reachable for e in dp.table.values()),
            "state_bound": dp.state_bound,
            "capacity": dp.capacity,
            "fill_time": dp.fill_time,
            "max_drones": max_drones,
            "dropped_jobs": dropped,
        },
        instance_ref=inst.fingerprint(),
        violations=violations,
    )
    return report, dp
