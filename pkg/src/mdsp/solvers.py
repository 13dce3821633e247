"""Name -> solver lookup used by the CLI and the bench harness."""
from __future__ import annotations

from typing import Callable

from .baselines import solve_mr_m, solve_mr_s
from .exact import SearchLimits, solve_exact
from .greedy import solve_greedy13, solve_greedy14
from .model import Instance, SolveReport
from .unit_dp import solve_unit_cost

ALGORITHMS: dict[str, Callable[[Instance], SolveReport]] = {
    "greedy14": lambda inst: solve_greedy14(inst)[0],
    "greedy13": lambda inst: solve_greedy13(inst)[0],
    "dp-unit": solve_unit_cost,
    "oracle": solve_exact,
    "mr-s": solve_mr_s,
    "mr-m": solve_mr_m,
}


def run(name: str, inst: Instance, limits: SearchLimits | None = None) -> SolveReport:
    if name not in ALGORITHMS:
        raise KeyError(f"unknown algorithm {name!r}; choose from {sorted(ALGORITHMS)}")
    if name == "oracle" and limits is not None:
        return solve_exact(inst, limits)
    return ALGORITHMS[name](inst)
