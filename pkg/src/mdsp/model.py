"""Core MDSP domain types: jobs, instances, drone schedules and families.

Intervals are open, ``(start, end)``. Two jobs that merely touch at an
endpoint do not conflict.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Iterable, Sequence

from .errors import InstanceFormatError, StructuralError, UnknownJobError


@dataclass(frozen=True)
class Job:
    id: int
    start: float
    end: float
    cost: float
    profit: float

    @property
    def interval(self) -> tuple[float, float]:
        return (self.start, self.end)


@dataclass(frozen=True)
class Instance:
    jobs: tuple[Job, ...]
    m: int
    budget: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "jobs", tuple(self.jobs))

    @property
    def n(self) -> int:
        return len(self.jobs)

    @cached_property
    def by_id(self) -> dict[int, Job]:
        return {j.id: j for j in self.jobs}

    def job(self, job_id: int) -> Job:
        try:
            return self.by_id[job_id]
        except KeyError:
            raise UnknownJobError(f"job {job_id} is not part of the instance") from None

    @property
    def is_unit_cost(self) -> bool:
        return all(j.cost == 1 for j in self.jobs)

    def fingerprint(self) -> str:
        """Short content hash used as ``instance_ref`` on families and reports."""
        return hashlib.sha256(dumps_instance(self).encode()).hexdigest()[:16]


@dataclass(frozen=True)
class DroneSchedule:
    drone_id: int
    job_ids: frozenset[int]
    cached_cost: float
    cached_profit: float

    @classmethod
    def build(cls, drone_id: int, jobs: Iterable[Job]) -> DroneSchedule:
        jobs = list(jobs)
        return cls(
            drone_id=drone_id,
            job_ids=frozenset(j.id for j in jobs),
            cached_cost=math.fsum(j.cost for j in jobs),
            cached_profit=math.fsum(j.profit for j in jobs),
        )

    @classmethod
    def from_ids(cls, drone_id: int, job_ids: Iterable[int], inst: Instance) -> DroneSchedule:
        return cls.build(drone_id, (inst.job(i) for i in job_ids))

    @classmethod
    def empty(cls, drone_id: int) -> DroneSchedule:
        return cls(drone_id, frozenset(), 0.0, 0.0)

    def __len__(self) -> int:
        return len(self.job_ids)

    def sorted_ids(self) -> list[int]:
        return sorted(self.job_ids)


@dataclass(frozen=True)
class AssignmentFamily:
    schedules: tuple[DroneSchedule, ...]
    instance_ref: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "schedules", tuple(self.schedules))

    def __iter__(self):
        return iter(self.schedules)

    def __len__(self) -> int:
        return len(self.schedules)

    @property
    def profit(self) -> float:
        return family_profit(self)

    def assigned_ids(self) -> set[int]:
        return {j for s in self.schedules for j in s.job_ids}


@dataclass(frozen=True)
class Violation:
    drone_id: int | None
    kind: str  # "conflict" | "budget" | "duplicate" | "unknown_job" | "cache" | "drone_count"
    job_ids: tuple[int, ...] = ()
    detail: str = ""


@dataclass
class SolveReport:
    algorithm: str
    profit: float
    per_drone: list[DroneSchedule]
    feasible: bool
    wall_time: float
    params: dict[str, Any] = field(default_factory=dict)
    instance_ref: str = ""
    violations: list[Violation] = field(default_factory=list)

    @property
    def family(self) -> AssignmentFamily:
        return AssignmentFamily(tuple(self.per_drone), self.instance_ref)

    def to_dict(self) -> dict[str, Any]:
        return {
            "algorithm": self.algorithm,
            "instance_ref": self.instance_ref,
            "profit": self.profit,
            "feasible": self.feasible,
            "wall_time": self.wall_time,
            "per_drone": [
                {
                    "drone_id": s.drone_id,
                    "job_ids": s.sorted_ids(),
                    "cost": s.cached_cost,
                    "profit": s.cached_profit,
                }
                for s in self.per_drone
            ],
            "violations": [
                {"drone_id": v.drone_id, "kind": v.kind, "job_ids": list(v.job_ids), "detail": v.detail}
                for v in self.violations
            ],
            "params": self.params,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> SolveReport:
        try:
            per_drone = [
                DroneSchedule(
                    int(d["drone_id"]), frozenset(int(i) for i in d["job_ids"]),
                    float(d["cost"]), float(d["profit"]),
                )
                for d in data["per_drone"]
            ]
            violations = [
                Violation(v["drone_id"], v["kind"], tuple(v["job_ids"]), v.get("detail", ""))
                for v in data.get("violations", [])
            ]
            return cls(
                algorithm=str(data["algorithm"]),
                profit=float(data["profit"]),
                per_drone=per_drone,
                feasible=bool(data["feasible"]),
                wall_time=float(data["wall_time"]),
                params=dict(data.get("params", {})),
                instance_ref=str(data.get("instance_ref", "")),
                violations=violations,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InstanceFormatError(f"malformed report: {exc}") from exc


# ---------------------------------------------------------------------------
# validation and predicates
# ---------------------------------------------------------------------------

def check_structure(inst: Instance) -> None:
    """Raise StructuralError naming the first malformed job, if any."""
    if not isinstance(inst.m, int) or isinstance(inst.m, bool) or inst.m < 1:
        raise StructuralError(f"drone count m must be a positive integer, got {inst.m!r}")
    if not math.isfinite(inst.budget) or inst.budget < 0:
        raise StructuralError(f"budget must be finite and non-negative, got {inst.budget!r}")
    seen: set[int] = set()
    for j in inst.jobs:
        if j.id in seen:
            raise StructuralError(f"duplicate job id {j.id}")
        seen.add(j.id)
        if j.id < 0:
            raise StructuralError(f"job {j.id}: id must be non-negative")
        values = (j.start, j.end, j.cost, j.profit)
        if not all(math.isfinite(v) for v in values):
            raise StructuralError(f"job {j.id}: non-finite field")
        if not j.start < j.end:
            raise StructuralError(f"job {j.id}: empty interval ({j.start}, {j.end})")
        if j.cost < 0 or j.profit < 0:
            raise StructuralError(f"job {j.id}: cost and profit must be non-negative")


def validate_instance(raw: Instance) -> tuple[Instance, list[int]]:
    """Check structure and drop every job that alone exceeds the budget.

    Returns the filtered instance (job order preserved) and the dropped ids.
    """
    check_structure(raw)
    kept = [j for j in raw.jobs if j.cost <= raw.budget]
    dropped = [j.id for j in raw.jobs if j.cost > raw.budget]
    if not dropped:
        return raw, []
    return Instance(tuple(kept), raw.m, raw.budget), dropped


def conflicts(a: Job, b: Job) -> bool:
    return a.start < b.end and b.start < a.end


def is_compatible(s: DroneSchedule, inst: Instance) -> bool:
    jobs = sorted((inst.job(i) for i in s.job_ids), key=lambda j: (j.start, j.end))
    # sorted by start: any overlap shows up between neighbours once we track the max end
    reach = -math.inf
    for j in jobs:
        if j.start < reach:
            return False
        reach = max(reach, j.end)
    return True


def exact_sum(values: Iterable[float]) -> Fraction:
    return sum((Fraction(v) for v in values), Fraction(0))


def is_feasible(s: DroneSchedule, inst: Instance) -> bool:
    return exact_sum(inst.job(i).cost for i in s.job_ids) <= Fraction(inst.budget)


def audit_family(
    f: AssignmentFamily, inst: Instance, max_drones: int | None = None
) -> tuple[bool, list[Violation]]:
    """Check every schedule for conflicts, budget, duplicates and stale caches."""
    violations: list[Violation] = []
    if max_drones is not None and len(f.schedules) > max_drones:
        violations.append(Violation(None, "drone_count", (), f"{len(f.schedules)} > {max_drones}"))
    owner: dict[int, int] = {}
    for s in f.schedules:
        unknown = sorted(i for i in s.job_ids if i not in inst.by_id)
        if unknown:
            violations.append(Violation(s.drone_id, "unknown_job", tuple(unknown)))
            continue
        jobs = sorted((inst.by_id[i] for i in s.job_ids), key=lambda j: j.id)
        for x in range(len(jobs)):
            for y in range(x + 1, len(jobs)):
                if conflicts(jobs[x], jobs[y]):
                    violations.append(Violation(s.drone_id, "conflict", (jobs[x].id, jobs[y].id)))
        if not is_feasible(s, inst):
            violations.append(Violation(s.drone_id, "budget", tuple(j.id for j in jobs)))
        if (s.cached_cost != math.fsum(j.cost for j in jobs)
                or s.cached_profit != math.fsum(j.profit for j in jobs)):
            violations.append(Violation(s.drone_id, "cache", tuple(j.id for j in jobs)))
        for j in jobs:
            if j.id in owner:
                violations.append(
                    Violation(s.drone_id, "duplicate", (j.id,), f"also on drone {owner[j.id]}")
                )
            else:
                owner[j.id] = s.drone_id
    return not violations, violations


def family_profit(f: AssignmentFamily) -> float:
    return math.fsum(s.cached_profit for s in f.schedules)


def exact_profit(f: AssignmentFamily, inst: Instance) -> Fraction:
    """Profit of ``f`` in exact rational arithmetic, recomputed from the jobs."""
    return exact_sum(inst.job(i).profit for s in f.schedules for i in s.job_ids)


def scale_to_ints(values: Sequence[float]) -> tuple[list[int], int]:
    """Map floats onto integers sharing one power-of-two denominator.

    Every finite float is a dyadic rational, so the scaling is exact and
    comparisons on the integers agree with exact rational comparisons.
    """
    fracs = [Fraction(v) for v in values]
    scale = max((f.denominator for f in fracs), default=1)
    return [int(f * scale) for f in fracs], scale


# ---------------------------------------------------------------------------
# JSON interchange
# ---------------------------------------------------------------------------

_TOP_KEYS = {"m", "budget", "jobs"}
_JOB_KEYS = {"id", "start", "end", "cost", "profit"}


def _number(value: Any, what: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InstanceFormatError(f"{what} must be a number, got {value!r}")
    return float(value)


def instance_from_dict(data: Any) -> Instance:
    if not isinstance(data, dict):
        raise InstanceFormatError("instance must be a JSON object")
    extra = set(data) - _TOP_KEYS
    missing = _TOP_KEYS - set(data)
    if extra or missing:
        raise InstanceFormatError(f"bad instance keys: unknown={sorted(extra)} missing={sorted(missing)}")
    m = data["m"]
    if isinstance(m, bool) or not isinstance(m, int):
        raise InstanceFormatError(f"m must be an integer, got {m!r}")
    if not isinstance(data["jobs"], list):
        raise InstanceFormatError("jobs must be a list")
    jobs = []
    for k, raw in enumerate(data["jobs"]):
        if not isinstance(raw, dict) or set(raw) != _JOB_KEYS:
            raise InstanceFormatError(f"jobs[{k}] must have exactly the keys {sorted(_JOB_KEYS)}")
        jid = raw["id"]
        if isinstance(jid, bool) or not isinstance(jid, int):
            raise InstanceFormatError(f"jobs[{k}].id must be an integer")
        jobs.append(Job(
            jid,
            _number(raw["start"], f"jobs[{k}].start"),
            _number(raw["end"], f"jobs[{k}].end"),
            _number(raw["cost"], f"jobs[{k}].cost"),
            _number(raw["profit"], f"jobs[{k}].profit"),
        ))
    return Instance(tuple(jobs), m, _number(data["budget"], "budget"))


def instance_to_dict(inst: Instance) -> dict[str, Any]:
    return {
        "m": inst.m,
        "budget": float(inst.budget),
        "jobs": [
            {"id": j.id, "start": float(j.start), "end": float(j.end),
             "cost": float(j.cost), "profit": float(j.profit)}
            for j in inst.jobs
        ],
    }


def dumps_instance(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst), indent=2) + "\n"


def loads_instance(text: str) -> Instance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"invalid JSON: {exc}") from exc
    return instance_from_dict(data)


def load_instance(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return loads_instance(fh.read())


def save_instance(inst: Instance, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_instance(inst))
