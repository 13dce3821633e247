"""Solvers for the multiple drone-delivery scheduling problem (MDSP)."""
from .baselines import solve_mr_m, solve_mr_s
from .conflicts import ConflictGraph, build_conflict_graph, max_concurrency, max_degree_delta
from .errors import (
    EmptyTopError,
    GenerationInfeasibleError,
    InstanceFormatError,
    MdspError,
    ResourceLimitError,
    StructuralError,
    UnknownJobError,
    VariantMismatchError,
)
from .exact import SearchLimits, export_lp, solve_exact
from .generate import GenParams, SplitMix64, generate
from .greedy import (
    GreedyTrace,
    correct_discard,
    correct_reassign,
    greedy_fill,
    select_top_m,
    solve_greedy13,
    solve_greedy14,
)
from .model import (
    AssignmentFamily,
    DroneSchedule,
    Instance,
    Job,
    SolveReport,
    Violation,
    audit_family,
    conflicts,
    exact_profit,
    family_profit,
    is_compatible,
    is_feasible,
    load_instance,
    save_instance,
    validate_instance,
)
from .unit_dp import solve_unit_cost

__version__ = "0.1.0"
