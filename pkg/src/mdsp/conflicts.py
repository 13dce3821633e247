"""Interval conflict graph and the two Δ statistics.

``max_degree_delta`` sizes the greedy drone pool; ``max_concurrency`` is the
largest number of simultaneously open intervals. They differ whenever one long
job overlaps several short, mutually disjoint ones.
"""
from __future__ import annotations

from dataclasses import dataclass

from .model import Instance, conflicts


@dataclass(frozen=True)
class ConflictGraph:
    adjacency: dict[int, frozenset[int]]

    @property
    def degree(self) -> dict[int, int]:
        return {j: len(nb) for j, nb in self.adjacency.items()}

    def edges(self) -> set[tuple[int, int]]:
        return {(a, b) for a, nb in self.adjacency.items() for b in nb if a < b}


def build_conflict_graph(inst: Instance) -> ConflictGraph:
    adj: dict[int, set[int]] = {j.id: set() for j in inst.jobs}
    jobs = inst.jobs
    for x in range(len(jobs)):
        for y in range(x + 1, len(jobs)):
            if conflicts(jobs[x], jobs[y]):
                adj[jobs[x].id].add(jobs[y].id)
                adj[jobs[y].id].add(jobs[x].id)
    return ConflictGraph({j: frozenset(nb) for j, nb in adj.items()})


def max_degree_delta(g: ConflictGraph) -> int:
    return max((len(nb) for nb in g.adjacency.values()), default=0)


def max_concurrency(inst: Instance) -> int:
    # end events (0) sort before start events (1) at equal times: open intervals
    events = sorted([(j.start, 1) for j in inst.jobs] + [(j.end, 0) for j in inst.jobs])
    open_now = best = 0
    for _, kind in events:
        if kind:
            open_now += 1
            best = max(best, open_now)
        else:
            open_now -= 1
    return best


def delta_stats(inst: Instance) -> dict[str, int]:
    return {
        "delta_degree": max_degree_delta(build_conflict_graph(inst)),
        "delta_concurrency": max_concurrency(inst),
    }
