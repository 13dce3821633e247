from fractions import Fraction

import pytest
from hypothesis import given, settings

from mdsp.errors import EmptyTopError, ResourceLimitError, VariantMismatchError
from mdsp.model import AssignmentFamily, DroneSchedule, Instance, Job, audit_family, exact_profit
from mdsp.unit_dp import (
    MpffaEntry,
    UnitCostDP,
    predecessor_candidates,
    predecessors,
    solve_unit_cost,
    solve_unit_cost_with_table,
    top_of_state,
)

from oracles import instances, naive_optimum


def unit(*rows, m=1, budget=1):
    return Instance(tuple(Job(k, s, e, 1, p) for k, (s, e, p) in enumerate(rows, 1)), m, float(budget))


class TestSolve:
    def test_two_drones_three_jobs(self):
        inst = unit((1, 2, 5), (1.5, 3, 4), (2.5, 4, 3), m=2, budget=1)
        rep = solve_unit_cost(inst)
        assert rep.profit == 9 and rep.feasible
        assert sorted(s.sorted_ids() for s in rep.per_drone) == [[1], [2]]
        assert naive_optimum(inst)[0] == 9

    def test_empty(self):
        rep = solve_unit_cost(Instance((), 2, 3.0))
        assert rep.profit == 0 and rep.params["states"] == 1

    def test_single_drone(self):
        inst = unit((0, 1, 2), (0.5, 2, 5), m=1, budget=1)
        assert solve_unit_cost(inst).profit == 5 == naive_optimum(inst)[0]

    def test_touching_jobs_chain(self):
        inst = unit((0, 1, 1), (1, 2, 1), (2, 3, 1), m=1, budget=3)
        assert solve_unit_cost(inst).profit == 3

    def test_rejects_non_unit(self):
        inst = Instance((Job(1, 0, 1, 2, 1),), 1, 1.0)
        with pytest.raises(VariantMismatchError):
            solve_unit_cost(inst)

    def test_drone_cap(self):
        with pytest.raises(ResourceLimitError):
            solve_unit_cost(unit((0, 1, 1), m=4))
        assert solve_unit_cost(unit((0, 1, 1), m=4), max_drones=4).profit == 1


class TestStateOps:
    def test_top(self):
        assert top_of_state(((3, 1), (3, 1), (1, 1))) == {0, 1}
        assert top_of_state(((2, 1), (0, 0))) == {0}
        with pytest.raises(EmptyTopError):
            top_of_state(((0, 0), (0, 0)))

    def test_predecessors_single(self):
        assert predecessors(((2, 1),)) == [((0, 0),)]
        assert len(list(predecessor_candidates(((2, 1),)))) == 2

    def test_predecessors_one_top(self):
        assert predecessors(((1, 1), (2, 1))) == [((0, 0), (1, 1))]

    def test_predecessors_two_tops(self):
        q = ((2, 2), (2, 2))
        raw = list(predecessor_candidates(q))
        assert len(raw) == 4
        assert predecessors(q) == [((1, 1), (1, 1))]

    def test_top_slot_without_load_has_no_predecessors(self):
        assert predecessors(((2, 0),)) == []


class TestExtend:
    def setup_method(self):
        # end ranks: 1 -> t=1, 2 -> t=3
        self.inst = unit((0, 1, 1), (1, 3, 4), (2, 3, 6), m=2, budget=2)
        self.dp = UnitCostDP(self.inst)

    def test_single_top(self):
        base = MpffaEntry(Fraction(1), ((1,), ()), True)
        q = ((1, 1), (2, 1))
        out = list(self.dp.extend(base, q, {1: 0}))
        assert sorted((p, tuple(j.id for j in d.values())) for p, d in out) == [(5, (2,)), (7, (3,))]

    def test_not_enough_jobs_for_top(self):
        base = MpffaEntry(Fraction(0), ((), ()), True)
        assert list(self.dp.extend(base, ((1, 1), (1, 1)), {0: 0, 1: 0})) == []

    def test_two_jobs_two_tops_both_orders(self):
        base = MpffaEntry(Fraction(0), ((), ()), True)
        out = list(self.dp.extend(base, ((2, 1), (2, 1)), {0: 0, 1: 0}))
        assert len(out) == 2 and {p for p, _ in out} == {10}

    def test_start_must_clear_previous_end(self):
        base = MpffaEntry(Fraction(1), ((1,), ()), True)
        # job 3 starts at 2 >= 1, job 2 starts at 1 >= 1 (touching is fine)
        out = list(self.dp.extend(base, ((0, 0), (2, 2)), {1: 1}))
        assert len(out) == 2


def witness_predecessor_violations(dp: UnitCostDP) -> int:
    bad = 0
    for q, e in dp.table.items():
        if not e.reachable or all(r == 0 for r, _ in q):
            continue
        top = top_of_state(q)
        reduced = [ids[:-1] if i in top else ids for i, ids in enumerate(e.witness)]
        prev = dp.state_of(reduced)
        value = sum((Fraction(dp.inst.job(j).profit) for ids in reduced for j in ids), Fraction(0))
        if dp.table[prev].profit != value:
            bad += 1
    return bad


def witness_matches_state(dp: UnitCostDP) -> bool:
    for q, e in dp.table.items():
        if not e.reachable:
            continue
        for (rank, load), ids in zip(q, e.witness):
            if len(ids) != load:
                return False
            if ids and max(dp.rank_of(dp.inst.job(j).end) for j in ids) != rank:
                return False
        fam = AssignmentFamily(tuple(DroneSchedule.from_ids(k, ids, dp.inst) for k, ids in enumerate(e.witness)))
        if not audit_family(fam, dp.inst)[0] or exact_profit(fam, dp.inst) != e.profit:
            return False
    return True


@settings(max_examples=120, deadline=None)
@given(instances(max_n=7, max_m=2, unit_cost=True))
def test_matches_naive_and_structure(inst):
    rep, dp = solve_unit_cost_with_table(inst)
    opt, _ = naive_optimum(inst)
    assert exact_profit(rep.family, dp.inst) == opt
    assert rep.feasible
    assert witness_predecessor_violations(dp) == 0
    assert witness_matches_state(dp)
    assert rep.params["states"] <= rep.params["state_bound"]


@settings(max_examples=25, deadline=None)
@given(instances(max_n=5, max_m=3, unit_cost=True))
def test_three_drones(inst):
    rep, dp = solve_unit_cost_with_table(inst)
    assert exact_profit(rep.family, dp.inst) == naive_optimum(inst)[0]


def test_state_sufficiency_on_witnesses():
    # a job is compatible with a slot iff it starts at or after the slot's latest end
    inst = unit((0, 2, 3), (2, 4, 3), (1, 3, 9), (3, 5, 2), (4, 6, 1), m=2, budget=3)
    _, dp = solve_unit_cost_with_table(inst)
    for e in dp.table.values():
        if not e.reachable:
            continue
        for ids in e.witness:
            if not ids:
                continue
            last = max(dp.inst.job(j).end for j in ids)
            for other in dp.inst.jobs:
                if other.id in ids or other.end <= last:
                    continue
                pairwise = all(not (other.start < dp.inst.job(j).end and dp.inst.job(j).start < other.end) for j in ids)
                assert pairwise == (other.start >= last)
