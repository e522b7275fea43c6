"""Editable solving sessions.

A session owns a solver state and accepts live edits between iterations:
manual placements, constraint changes, activity surgery.  Every edit either
lands cleanly (with a repair pass detaching whatever the change broke) or is
rejected wholesale, leaving the state exactly as it was.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, replace

from .feasibility import (
    check_schedule,
    conflicts as find_conflicts,
    hard_feasible,
    resource_selections,
)
from .model import (
    Activity,
    Dependency,
    Location,
    Mark,
    ModelError,
    Problem,
    Schedule,
    TimePreference,
)
from .solver import (
    HeuristicWeights,
    IterationReport,
    SolverState,
    activity_score,
    iterate,
    solve,
)


class Edit:
    """Base of all user edits; concrete kinds below."""

    kind: str = ""


@dataclass(frozen=True)
class PlaceAndFix(Edit):
    activity: str
    location: Location
    kind = "place_and_fix"


@dataclass(frozen=True)
class Unfix(Edit):
    activity: str
    kind = "unfix"


@dataclass(frozen=True)
class Detach(Edit):
    activity: str
    kind = "detach"


@dataclass(frozen=True)
class SetDuration(Edit):
    activity: str
    duration: int
    kind = "set_duration"


@dataclass(frozen=True)
class AddDependency(Edit):
    dependency: Dependency
    kind = "add_dependency"


@dataclass(frozen=True)
class RemoveDependency(Edit):
    dependency: Dependency
    kind = "remove_dependency"


@dataclass(frozen=True)
class SetSlotMark(Edit):
    entity: str  # resource or activity id
    slot: int
    mark: Mark
    kind = "set_slot_mark"


@dataclass(frozen=True)
class AddActivity(Edit):
    activity: Activity
    kind = "add_activity"


@dataclass(frozen=True)
class RemoveActivity(Edit):
    activity: str
    kind = "remove_activity"


@dataclass(frozen=True)
class SetWeights(Edit):
    weights: HeuristicWeights
    kind = "set_weights"


@dataclass(frozen=True)
class RepairReport:
    """Outcome of one edit: what landed and what had to give way."""

    edit: Edit
    applied: bool
    reason: str | None
    detached: tuple[str, ...]
    scheduled_count: int

    def to_doc(self) -> dict:
        return {
            "edit": self.edit.kind,
            "applied": self.applied,
            "reason": self.reason,
            "detached": list(self.detached),
            "scheduled_count": self.scheduled_count,
        }


class _Rejected(Exception):
    """Internal: the edit cannot apply; carries the user-facing reason."""


class _RepairImpossible(Exception):
    """Internal: a violation sits entirely on fixed activities."""


def repair(state: SolverState) -> set[str]:
    """Detach non-fixed activities until the schedule audits clean.

    Victims are picked worst-first: most violations, then fewest
    dependencies, then a random draw.  A violation whose every participant
    is fixed cannot be repaired this way and aborts the caller's edit.
    """
    detached: set[str] = set()
    while True:
        violations = check_schedule(state.problem, state.schedule)
        if not violations:
            if detached:
                # Overlapping activities share board cells, so removing one
                # may have wiped a survivor's cells.  Repaint from scratch.
                state.occupancy.rebuild(state.problem, state.schedule)
            return detached
        counts: Counter[str] = Counter()
        for v in violations:
            movable = [
                a
                for a in v.activities
                if a in state.schedule.assignment and not state.schedule.is_fixed(a)
            ]
            if not movable:
                raise _RepairImpossible(
                    f"cannot repair: {v.detail or v.kind} involves only fixed activities"
                )
            counts.update(movable)
        top = max(counts.values())
        pool = [a for a, n in counts.items() if n == top]
        n_deps = {a: len(state.problem.dependencies_of.get(a, ())) for a in pool}
        fewest = min(n_deps.values())
        pool = state.problem.sort_activities(a for a in pool if n_deps[a] == fewest)
        victim = pool[0] if len(pool) == 1 else state.rng.choice(pool)
        state.unassign(victim, count=True)
        detached.add(victim)


def repair_schedule(
    problem: Problem, schedule: Schedule, seed: int = 0
) -> tuple[Schedule, set[str]]:
    """Detach offenders from a stored schedule until it audits clean.

    The input may be arbitrarily unsound (hand-edited files included).
    Fixed assignments are honored; a violation living entirely on fixed
    activities raises ModelError instead.  Returns the sound schedule and
    the ids that were taken off it.
    """
    state = SolverState(problem, seed=seed)
    state.schedule = schedule.copy()
    # swap_problem rebuilds every mirror from the adopted schedule and is
    # documented to tolerate a transiently unsound board.  Assignments of
    # ids the problem does not know are dropped there; report them as
    # detached rather than losing them silently.
    stray = set(schedule.assignment) - set(problem.activity_by_id)
    state.swap_problem(problem)
    try:
        detached = repair(state)
    except _RepairImpossible as e:
        raise ModelError(str(e)) from None
    return state.schedule, detached | stray


def _replace_activity(problem: Problem, activity: Activity) -> Problem:
    acts = tuple(activity if a.id == activity.id else a for a in problem.activities)
    return replace(problem, activities=acts)


def _entity_with_mark(problem: Problem, entity_id: str, slot: int, mark: Mark) -> Problem:
    total = problem.grid.total_slots
    if not 0 <= slot < total:
        raise _Rejected(f"slot {slot} is outside the grid (0..{total - 1})")
    if entity_id in problem.resource_by_id:
        res = problem.resource(entity_id)
        prefs = res.prefs or TimePreference.neutral(total)
        marks = list(prefs.marks)
        marks[slot] = Mark(mark)
        new_res = replace(res, prefs=TimePreference(tuple(marks)))
        resources = tuple(new_res if r.id == entity_id else r for r in problem.resources)
        return replace(problem, resources=resources)
    if entity_id in problem.activity_by_id:
        act = problem.activity(entity_id)
        prefs = act.prefs or TimePreference.neutral(total)
        marks = list(prefs.marks)
        marks[slot] = Mark(mark)
        return _replace_activity(problem, replace(act, prefs=TimePreference(tuple(marks))))
    raise _Rejected(f"no resource or activity with id {entity_id!r}")


def _apply_place_and_fix(state: SolverState, edit: PlaceAndFix) -> list[str]:
    a_id = edit.activity
    if a_id not in state.problem.activity_by_id:
        raise _Rejected(f"no activity with id {a_id!r}")
    act = state.problem.activity(a_id)
    loc = edit.location
    if loc.selection not in resource_selections(act):
        raise _Rejected(
            f"{sorted(loc.selection)} is not a valid resource choice for {a_id!r}"
        )
    if not hard_feasible(state.problem, act, loc):
        raise _Rejected(f"start {loc.start} is hard-forbidden or out of grid for {a_id!r}")
    clash = find_conflicts(state.problem, state.schedule, act, loc)
    blocked = sorted(c for c in clash if state.schedule.is_fixed(c))
    if blocked:
        raise _Rejected(f"location clashes with fixed {blocked}")
    if a_id in state.schedule.assignment:
        state.unassign(a_id)
    evicted = state.problem.sort_activities(clash)
    for c_id in evicted:
        state.unassign(c_id, evictor=a_id, count=True)
    state.assign(a_id, loc, fixed=True)
    return evicted


def apply_edit(state: SolverState, edit: Edit) -> RepairReport:
    """Apply one edit and restore soundness, or back out without a trace."""
    backup = state.clone()
    directly_detached: list[str] = []
    try:
        if isinstance(edit, PlaceAndFix):
            directly_detached = _apply_place_and_fix(state, edit)
        elif isinstance(edit, Unfix):
            if edit.activity not in state.problem.activity_by_id:
                raise _Rejected(f"no activity with id {edit.activity!r}")
            if edit.activity in state.schedule.fixed:
                state.schedule.fixed.discard(edit.activity)
                loc = state.schedule.assignment[edit.activity]
                state.occupancy.set_fixed(state.problem.activity(edit.activity), loc, False)
        elif isinstance(edit, Detach):
            if edit.activity not in state.problem.activity_by_id:
                raise _Rejected(f"no activity with id {edit.activity!r}")
            if edit.activity in state.schedule.assignment:
                state.unassign(edit.activity, count=True)
                directly_detached = [edit.activity]
        elif isinstance(edit, SetDuration):
            if edit.activity not in state.problem.activity_by_id:
                raise _Rejected(f"no activity with id {edit.activity!r}")
            act = state.problem.activity(edit.activity)
            if edit.duration != act.duration:
                new_problem = _replace_activity(state.problem, replace(act, duration=edit.duration))
                state.swap_problem(new_problem)
        elif isinstance(edit, AddDependency):
            state.swap_problem(
                replace(state.problem, dependencies=state.problem.dependencies + (edit.dependency,))
            )
        elif isinstance(edit, RemoveDependency):
            if edit.dependency not in state.problem.dependencies:
                raise _Rejected(f"dependency {edit.dependency} is not part of the problem")
            deps = tuple(d for d in state.problem.dependencies if d != edit.dependency)
            state.swap_problem(replace(state.problem, dependencies=deps))
        elif isinstance(edit, SetSlotMark):
            state.swap_problem(
                _entity_with_mark(state.problem, edit.entity, edit.slot, edit.mark)
            )
        elif isinstance(edit, AddActivity):
            if edit.activity.id in state.problem.activity_by_id or (
                edit.activity.id in state.problem.resource_by_id
            ):
                raise _Rejected(f"id {edit.activity.id!r} is already taken")
            state.swap_problem(
                replace(state.problem, activities=state.problem.activities + (edit.activity,))
            )
        elif isinstance(edit, RemoveActivity):
            if edit.activity not in state.problem.activity_by_id:
                raise _Rejected(f"no activity with id {edit.activity!r}")
            if edit.activity in state.schedule.assignment:
                directly_detached = [edit.activity]
            acts = tuple(a for a in state.problem.activities if a.id != edit.activity)
            deps = tuple(
                d for d in state.problem.dependencies if edit.activity not in (d.first, d.second)
            )
            state.swap_problem(replace(state.problem, activities=acts, dependencies=deps))
        elif isinstance(edit, SetWeights):
            state.set_weights(edit.weights)
        else:
            raise _Rejected(f"unknown edit kind {type(edit).__name__}")

        repaired = repair(state)
        state.refresh_best()
    except _Rejected as e:
        state.restore_from(backup)
        return RepairReport(edit, False, str(e), (), state.schedule.scheduled_count)
    except _RepairImpossible as e:
        state.restore_from(backup)
        return RepairReport(edit, False, str(e), (), state.schedule.scheduled_count)
    except ModelError as e:
        state.restore_from(backup)
        return RepairReport(edit, False, str(e), (), state.schedule.scheduled_count)
    detached = tuple(directly_detached) + tuple(
        state.problem.sort_activities(repaired - set(directly_detached))
    )
    return RepairReport(edit, True, None, detached, state.schedule.scheduled_count)


@dataclass(frozen=True)
class SnapshotView:
    """Point-in-time, immutable view of a session."""

    iteration: int
    assignment: dict[str, Location]
    fixed: tuple[str, ...]
    unscheduled: tuple[str, ...]
    scheduled_count: int
    soft_total: int
    best_scheduled_count: int
    best_soft_total: int
    activity_scores: dict[str, float] | None

    def to_doc(self) -> dict:
        return {
            "iteration": self.iteration,
            "assignment": {
                a: {"start": loc.start, "selection": sorted(loc.selection)}
                for a, loc in sorted(self.assignment.items())
            },
            "fixed": list(self.fixed),
            "unscheduled": list(self.unscheduled),
            "scheduled_count": self.scheduled_count,
            "soft_total": self.soft_total,
            "best_scheduled_count": self.best_scheduled_count,
            "best_soft_total": self.best_soft_total,
            "activity_scores": self.activity_scores,
        }


def snapshot(state: SolverState, include_scores: bool = True) -> SnapshotView:
    scores = None
    if include_scores:
        scores = {a: activity_score(state, a)[0] for a in state.ordered_unscheduled()}
    return SnapshotView(
        iteration=state.iteration,
        assignment=dict(state.schedule.assignment),
        fixed=tuple(state.problem.sort_activities(state.schedule.fixed)),
        unscheduled=tuple(state.ordered_unscheduled()),
        scheduled_count=state.schedule.scheduled_count,
        soft_total=state.soft_total,
        best_scheduled_count=state.best.scheduled_count,
        best_soft_total=state.best.soft_total,
        activity_scores=scores,
    )


class Session:
    """One editable solving run: step, solve, edit, look."""

    def __init__(
        self,
        problem: Problem,
        weights: HeuristicWeights | None = None,
        seed: int = 0,
        schedule: Schedule | None = None,
    ) -> None:
        self.state = SolverState(problem, weights=weights, seed=seed, schedule=schedule)
        self.edit_log: list[RepairReport] = []

    def apply_edit(self, edit: Edit) -> RepairReport:
        report = apply_edit(self.state, edit)
        self.edit_log.append(report)
        return report

    def step(self, n: int = 1) -> list[IterationReport]:
        reports = []
        for _ in range(n):
            if not self.state.unscheduled:
                break
            reports.append(iterate(self.state))
        return reports

    def solve(self, stop=None) -> None:
        solve(self.state, stop=stop)

    def snapshot(self, include_scores: bool = True) -> SnapshotView:
        return snapshot(self.state, include_scores=include_scores)
