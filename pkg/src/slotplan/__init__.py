"""slotplan: an interactive timetabling engine.

A partial schedule that satisfies every hard constraint is maintained at all
times while an iterative forward search (pick an activity, pick a location,
place and evict) drives it toward completeness.  Users can pause the search,
place or pin activities by hand, change the problem, and resume from the
repaired schedule.

The WebSocket service lives in `slotplan.service` and is imported lazily
(`slotplan serve` on the command line, or `slotplan.service.create_app`);
it is the one piece with dependencies beyond the scientific stack.
"""

from .model import (
    Activity,
    DepKind,
    Dependency,
    GroupMode,
    Location,
    Mark,
    ModelError,
    Problem,
    Resource,
    ResourceGroup,
    Schedule,
    TimeGrid,
    TimePreference,
    conjunctive,
    disjunctive,
)
from .feasibility import (
    Violation,
    check_schedule,
    conflicts,
    enumerate_locations,
    hard_feasible,
    resource_selections,
    soft_violations,
)
from .solver import (
    ContractViolation,
    HeuristicWeights,
    IterationReport,
    LocationRule,
    NoLocationError,
    SolverError,
    SolverState,
    Strategy,
    iterate,
    solve,
)
from .generator import GenParams, GenerationError, generate
from .session import (
    AddActivity,
    AddDependency,
    Detach,
    Edit,
    PlaceAndFix,
    RemoveActivity,
    RemoveDependency,
    RepairReport,
    Session,
    SetDuration,
    SetSlotMark,
    SetWeights,
    SnapshotView,
    Unfix,
    apply_edit,
    repair,
    repair_schedule,
    snapshot,
)
from .serialize import (
    FormatError,
    StaleScheduleError,
    UnsoundScheduleError,
    canonical_bytes,
    load_genparams,
    load_problem,
    load_schedule,
    load_weights,
    problem_hash,
    save_genparams,
    save_problem,
    save_schedule,
    save_weights,
)
from .bench import BenchConfig, BenchResult, load_bench_config, run_experiment, save_bench_config

__all__ = [
    "Activity",
    "AddActivity",
    "AddDependency",
    "BenchConfig",
    "BenchResult",
    "ContractViolation",
    "DepKind",
    "Dependency",
    "Detach",
    "Edit",
    "FormatError",
    "GenParams",
    "GenerationError",
    "GroupMode",
    "HeuristicWeights",
    "IterationReport",
    "Location",
    "LocationRule",
    "Mark",
    "ModelError",
    "NoLocationError",
    "PlaceAndFix",
    "Problem",
    "RemoveActivity",
    "RemoveDependency",
    "RepairReport",
    "Resource",
    "ResourceGroup",
    "Schedule",
    "Session",
    "SetDuration",
    "SetSlotMark",
    "SetWeights",
    "SnapshotView",
    "SolverError",
    "SolverState",
    "StaleScheduleError",
    "Strategy",
    "TimeGrid",
    "TimePreference",
    "Unfix",
    "UnsoundScheduleError",
    "Violation",
    "apply_edit",
    "canonical_bytes",
    "check_schedule",
    "conflicts",
    "conjunctive",
    "disjunctive",
    "enumerate_locations",
    "generate",
    "hard_feasible",
    "iterate",
    "load_bench_config",
    "load_genparams",
    "load_problem",
    "load_schedule",
    "load_weights",
    "problem_hash",
    "repair",
    "repair_schedule",
    "resource_selections",
    "save_bench_config",
    "save_genparams",
    "save_problem",
    "save_schedule",
    "save_weights",
    "snapshot",
    "soft_violations",
    "solve",
]

__version__ = "0.1.0"
