"""Pure feasibility, conflict, and audit computations over partial schedules.

Everything here is a pure function of its arguments.  The solver keeps
incremental indexes for speed; these functions are the reference semantics
and double as the auditor that the indexes are checked against.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .model import (
    Activity,
    DepKind,
    Dependency,
    GroupMode,
    Location,
    Problem,
    Schedule,
    dependency_satisfied,
    hard_slots_of,
    soft_slots_of,
)


@dataclass(frozen=True)
class Violation:
    """One broken soundness condition, reported by `check_schedule`."""

    kind: str  # selection | bounds | forbidden_time | resource_overlap | dependency | fixed_unassigned | unknown_activity | unknown_resource
    activities: tuple[str, ...]
    resource: str | None = None
    slots: tuple[int, ...] = ()
    detail: str = ""


def resource_selections(activity: Activity) -> list[frozenset[str]]:
    """All valid resource choices: conjunctive members plus one per disjunctive group.

    Order is deterministic: disjunctive groups vary in declaration order, the
    last one fastest; duplicate selections (overlapping groups) are dropped,
    first occurrence kept.
    """
    base: list[str] = []
    alternatives: list[tuple[str, ...]] = []
    for g in activity.groups:
        if g.mode is GroupMode.CONJUNCTIVE:
            base.extend(g.members)
        else:
            alternatives.append(g.members)
    out: list[frozenset[str]] = []
    seen: set[frozenset[str]] = set()
    for choice in itertools.product(*alternatives):
        sel = frozenset(base) | frozenset(choice)
        if sel not in seen:
            seen.add(sel)
            out.append(sel)
    return out


def covered_slots(activity: Activity, loc: Location) -> range:
    return range(loc.start, loc.start + activity.duration)


def hard_feasible(problem: Problem, activity: Activity, loc: Location) -> bool:
    """True iff the location stays in the grid and hits no hard-forbidden slot.

    Soft marks never block.  Unknown resources in the selection are a model
    error, not infeasibility.
    """
    if loc.start < 0 or loc.start + activity.duration > problem.grid.total_slots:
        return False
    slots = covered_slots(activity, loc)
    act_hard = hard_slots_of(activity.prefs)
    if any(t in act_hard for t in slots):
        return False
    for rid in loc.selection:
        res_hard = hard_slots_of(problem.resource(rid).prefs)
        if any(t in res_hard for t in slots):
            return False
    return True


def _overlap(start_a: int, end_a: int, start_b: int, end_b: int) -> bool:
    return max(start_a, start_b) < min(end_a, end_b)


def _dependency_holds(
    problem: Problem, dep: Dependency, placed: dict[str, tuple[int, int]]
) -> bool:
    """Check a dependency against (start, end) pairs for its two endpoints."""
    first_start, first_end = placed[dep.first]
    second_start, _ = placed[dep.second]
    return dependency_satisfied(dep.kind, first_start, first_end, second_start)


def conflicts(
    problem: Problem, schedule: Schedule, activity: Activity, loc: Location
) -> set[str]:
    """Scheduled activities that placing `activity` at `loc` would clash with.

    Covers both shared-resource overlaps and dependencies that the placement
    would violate.  The activity's own current assignment, if any, is ignored.
    """
    out: set[str] = set()
    start_a = loc.start
    end_a = loc.start + activity.duration
    for b_id, b_loc in schedule.assignment.items():
        if b_id == activity.id:
            continue
        if loc.selection & b_loc.selection:
            b = problem.activity(b_id)
            if _overlap(start_a, end_a, b_loc.start, b_loc.start + b.duration):
                out.add(b_id)
    for dep in problem.dependencies_of.get(activity.id, ()):
        other = dep.second if dep.first == activity.id else dep.first
        if other == activity.id or other not in schedule.assignment:
            continue
        b = problem.activity(other)
        b_loc = schedule.assignment[other]
        placed = {
            activity.id: (start_a, end_a),
            other: (b_loc.start, b_loc.start + b.duration),
        }
        if not _dependency_holds(problem, dep, placed):
            out.add(other)
    return out


def enumerate_locations(
    problem: Problem, schedule: Schedule, activity: Activity
) -> list[Location]:
    """All hard-feasible locations whose conflicts include no fixed activity.

    Order: start ascending, then selections in `resource_selections` order.
    """
    out: list[Location] = []
    selections = resource_selections(activity)
    last_start = problem.grid.total_slots - activity.duration
    for start in range(last_start + 1):
        for sel in selections:
            loc = Location(start, sel)
            if not hard_feasible(problem, activity, loc):
                continue
            clash = conflicts(problem, schedule, activity, loc)
            if any(schedule.is_fixed(c) for c in clash):
                continue
            out.append(loc)
    return out


def soft_violations(problem: Problem, activity: Activity, loc: Location) -> int:
    """Count of (entity, slot) pairs with a soft mark under this placement."""
    slots = covered_slots(activity, loc)
    count = sum(1 for t in slots if t in soft_slots_of(activity.prefs))
    for rid in loc.selection:
        res_soft = soft_slots_of(problem.resource(rid).prefs)
        count += sum(1 for t in slots if t in res_soft)
    return count


def check_schedule(problem: Problem, schedule: Schedule) -> list[Violation]:
    """Audit a schedule; empty result iff every soundness condition holds.

    Reports instead of raising, one record per broken condition, in a
    deterministic order.
    """
    violations: list[Violation] = []
    order = problem.activity_order

    known = [a for a in schedule.assignment if a in order]
    unknown = [a for a in schedule.assignment if a not in order]
    for a_id in sorted(unknown):
        violations.append(
            Violation("unknown_activity", (a_id,), detail=f"assigned activity {a_id!r} is not in the problem")
        )
    for f in sorted(schedule.fixed):
        if f not in schedule.assignment:
            violations.append(
                Violation("fixed_unassigned", (f,), detail=f"fixed activity {f!r} has no assignment")
            )

    known.sort(key=lambda a: order[a])
    res_set = set(problem.resource_by_id)
    selections_cache: dict[str, list[frozenset[str]]] = {}

    for a_id in known:
        act = problem.activity(a_id)
        loc = schedule.assignment[a_id]
        bad_resources = sorted(loc.selection - res_set)
        if bad_resources:
            violations.append(
                Violation(
                    "unknown_resource",
                    (a_id,),
                    resource=bad_resources[0],
                    detail=f"selection of {a_id!r} names unknown resources {bad_resources}",
                )
            )
            continue
        if a_id not in selections_cache:
            selections_cache[a_id] = resource_selections(act)
        if loc.selection not in selections_cache[a_id]:
            violations.append(
                Violation(
                    "selection",
                    (a_id,),
                    detail=f"selection {sorted(loc.selection)} is not a valid choice over the groups of {a_id!r}",
                )
            )
        if loc.start < 0 or loc.start + act.duration > problem.grid.total_slots:
            violations.append(
                Violation(
                    "bounds",
                    (a_id,),
                    slots=(loc.start,),
                    detail=f"{a_id!r} at start {loc.start} leaves the grid",
                )
            )
            continue
        slots = list(covered_slots(act, loc))
        act_hard = hard_slots_of(act.prefs)
        hit = tuple(t for t in slots if t in act_hard)
        if hit:
            violations.append(
                Violation("forbidden_time", (a_id,), slots=hit, detail=f"{a_id!r} covers its own forbidden slots {list(hit)}")
            )
        for rid in sorted(loc.selection, key=lambda r: problem.resource_order[r]):
            res_hard = hard_slots_of(problem.resource(rid).prefs)
            hit = tuple(t for t in slots if t in res_hard)
            if hit:
                violations.append(
                    Violation(
                        "forbidden_time",
                        (a_id,),
                        resource=rid,
                        slots=hit,
                        detail=f"{a_id!r} uses {rid!r} on its forbidden slots {list(hit)}",
                    )
                )

    # Resource overlaps: one record per clashing pair and resource.
    occupancy: dict[tuple[str, int], list[str]] = {}
    for a_id in known:
        act = problem.activity(a_id)
        loc = schedule.assignment[a_id]
        if loc.start < 0 or loc.start + act.duration > problem.grid.total_slots:
            continue
        for rid in loc.selection:
            if rid not in res_set:
                continue
            for t in covered_slots(act, loc):
                occupancy.setdefault((rid, t), []).append(a_id)
    pair_slots: dict[tuple[str, str, str], list[int]] = {}
    for (rid, t), users in occupancy.items():
        if len(users) < 2:
            continue
        users = sorted(users, key=lambda a: order[a])
        for x, y in itertools.combinations(users, 2):
            pair_slots.setdefault((x, y, rid), []).append(t)
    for (x, y, rid) in sorted(
        pair_slots, key=lambda k: (order[k[0]], order[k[1]], problem.resource_order[k[2]])
    ):
        slots_hit = tuple(sorted(pair_slots[(x, y, rid)]))
        violations.append(
            Violation(
                "resource_overlap",
                (x, y),
                resource=rid,
                slots=slots_hit,
                detail=f"{x!r} and {y!r} both use {rid!r} at slots {list(slots_hit)}",
            )
        )

    for dep in problem.dependencies:
        if dep.first in schedule.assignment and dep.second in schedule.assignment:
            if dep.first not in order or dep.second not in order:
                continue
            f_act = problem.activity(dep.first)
            s_act = problem.activity(dep.second)
            f_loc = schedule.assignment[dep.first]
            s_loc = schedule.assignment[dep.second]
            placed = {
                dep.first: (f_loc.start, f_loc.start + f_act.duration),
                dep.second: (s_loc.start, s_loc.start + s_act.duration),
            }
            if not _dependency_holds(problem, dep, placed):
                violations.append(
                    Violation(
                        "dependency",
                        (dep.first, dep.second),
                        detail=f"{dep.kind.value}({dep.first}, {dep.second}) is violated",
                    )
                )
    return violations
