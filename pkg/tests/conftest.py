"""Shared fixtures: the canonical tiny instance and random tiny problems."""

from __future__ import annotations

import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from slotplan.model import (
    Activity,
    DepKind,
    Dependency,
    Location,
    Problem,
    Resource,
    Schedule,
    TimeGrid,
    TimePreference,
    conjunctive,
    disjunctive,
)

from oracles import brute_conflicts, brute_hard_feasible, brute_selections


def tiny_problem(
    *,
    teacher_hard: tuple[int, ...] = (),
    teacher_soft: tuple[int, ...] = (),
    a_soft: tuple[int, ...] = (),
) -> Problem:
    """1 day x 6 slots; teacher t1, class c1, rooms r1/r2; A (dur 2) and B (dur 1).

    Both activities need t1 and c1 plus one of the rooms; before(B, A) links them.
    """
    grid = TimeGrid(days=1, slots_per_day=6)
    prefs_t1 = (
        TimePreference.from_sets(6, soft=teacher_soft, hard=teacher_hard)
        if (teacher_hard or teacher_soft)
        else None
    )
    prefs_a = TimePreference.from_sets(6, soft=a_soft) if a_soft else None
    return Problem(
        grid=grid,
        resources=(
            Resource("t1", kind="teacher", prefs=prefs_t1),
            Resource("c1", kind="class"),
            Resource("r1", kind="room"),
            Resource("r2", kind="room"),
        ),
        activities=(
            Activity("A", duration=2, groups=(conjunctive("t1", "c1"), disjunctive("r1", "r2")), prefs=prefs_a),
            Activity("B", duration=1, groups=(conjunctive("t1", "c1"), disjunctive("r1", "r2"))),
        ),
        dependencies=(Dependency(DepKind.BEFORE, "B", "A"),),
    )


@pytest.fixture
def tiny() -> Problem:
    return tiny_problem()


def random_tiny_problem(rng: random.Random) -> Problem:
    """Arbitrary instance with <= 8 slots, <= 3 resources, <= 4 activities."""
    days = rng.choice([1, 1, 2])
    spd = rng.randint(2, 8 // days)
    grid = TimeGrid(days=days, slots_per_day=spd)
    total = grid.total_slots
    n_res = rng.randint(1, 3)
    resources = []
    for i in range(n_res):
        marks_hard = [t for t in range(total) if rng.random() < 0.12]
        marks_soft = [t for t in range(total) if t not in marks_hard and rng.random() < 0.2]
        prefs = (
            TimePreference.from_sets(total, soft=marks_soft, hard=marks_hard)
            if (marks_hard or marks_soft)
            else None
        )
        resources.append(Resource(f"res{i}", kind=rng.choice(["teacher", "room", "class"]), prefs=prefs))
    res_ids = [r.id for r in resources]
    n_act = rng.randint(1, 4)
    activities = []
    for i in range(n_act):
        duration = rng.randint(1, min(3, total))
        shuffled = res_ids[:]
        rng.shuffle(shuffled)
        groups = []
        remaining = shuffled[:]
        n_conj = rng.randint(0, min(1, len(remaining)))
        if n_conj and rng.random() < 0.7:
            groups.append(conjunctive(remaining.pop(0)))
        if remaining and rng.random() < 0.7:
            k = rng.randint(1, len(remaining))
            groups.append(disjunctive(*remaining[:k]))
        if not groups:
            groups.append(conjunctive(shuffled[0]))
        marks_hard = [t for t in range(total) if rng.random() < 0.08]
        marks_soft = [t for t in range(total) if t not in marks_hard and rng.random() < 0.15]
        prefs = (
            TimePreference.from_sets(total, soft=marks_soft, hard=marks_hard)
            if (marks_hard or marks_soft)
            else None
        )
        loc_prefs = {rng.randrange(total): float(rng.randint(1, 3))} if rng.random() < 0.3 else None
        activities.append(
            Activity(f"act{i}", duration=duration, groups=tuple(groups), prefs=prefs, location_prefs=loc_prefs)
        )
    deps = []
    seen = set()
    for _ in range(rng.randint(0, 2)):
        if n_act < 2:
            break
        x, y = rng.sample([a.id for a in activities], 2)
        kind = rng.choice(list(DepKind))
        if (kind, x, y) in seen:
            continue
        seen.add((kind, x, y))
        deps.append(Dependency(kind, x, y))
    return Problem(grid=grid, resources=tuple(resources), activities=tuple(activities), dependencies=tuple(deps))


def random_sound_schedule(problem: Problem, rng: random.Random, fix_probability: float = 0.2) -> Schedule:
    """Greedy random sound partial schedule built with the brute oracles only."""
    schedule = Schedule()
    ids = [a.id for a in problem.activities]
    rng.shuffle(ids)
    for a_id in ids:
        if rng.random() < 0.35:
            continue
        act = problem.activity_by_id[a_id]
        options = []
        for start in range(problem.grid.total_slots - act.duration + 1):
            for sel in brute_selections(act):
                loc = Location(start, sel)
                if not brute_hard_feasible(problem, act, loc):
                    continue
                if brute_conflicts(problem, schedule, act, loc):
                    continue
                options.append(loc)
        if not options:
            continue
        schedule.assignment[a_id] = rng.choice(options)
        if rng.random() < fix_probability:
            schedule.fixed.add(a_id)
    return schedule
