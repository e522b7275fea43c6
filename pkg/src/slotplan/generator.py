"""Random feasible instances, built witness-first.

A complete collision-free timetable (the witness) is packed greedily onto
teacher x class x room triples until the requested share of class-slot
capacity is used.  The problem is then read off the witness: room groups are
disjunctive over the witness room plus random alternatives, and dependencies
and soft marks are only added where the witness already satisfies them.  The
witness ships with the problem as a feasibility certificate.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .model import (
    Activity,
    DepKind,
    Dependency,
    Location,
    Mark,
    ModelError,
    Problem,
    Resource,
    Schedule,
    TimeGrid,
    TimePreference,
    conjunctive,
    disjunctive,
)

_MAX_ATTEMPTS = 20


class GenerationError(RuntimeError):
    """The requested fill could not be packed after repeated attempts."""


@dataclass(frozen=True)
class GenParams:
    """Knobs for one random instance."""

    n_teachers: int = 20
    n_classes: int = 20
    n_rooms: int = 20
    days: int = 5
    slots_per_day: int = 10
    fill_percent: float = 50.0
    durations: tuple[int, int] = (1, 3)
    dependency_density: float = 0.1
    soft_density: float = 0.1
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("n_teachers", "n_classes", "n_rooms", "days", "slots_per_day"):
            if getattr(self, name) < 1:
                raise ModelError(f"{name} must be at least 1")
        if not 0 < self.fill_percent <= 100:
            raise ModelError(f"fill_percent must be in (0, 100], got {self.fill_percent}")
        lo, hi = self.durations
        if not 1 <= lo <= hi:
            raise ModelError(f"duration range must satisfy 1 <= lo <= hi, got {self.durations}")
        if hi > self.slots_per_day:
            raise ModelError("longest duration cannot exceed slots_per_day")
        for name in ("dependency_density", "soft_density"):
            if not 0 <= getattr(self, name) < 1:
                raise ModelError(f"{name} must be in [0, 1)")


@dataclass
class _Placed:
    teacher: int
    cls: int
    room: int
    start: int
    duration: int


def _window_free(busy: np.ndarray, dur: int) -> np.ndarray:
    """[n, S-dur+1] true where all dur slots starting there are free."""
    free = (~busy).astype(np.int32)
    if dur == 1:
        return free.astype(bool)
    csum = np.cumsum(free, axis=1)
    full = csum[:, dur - 1 :].copy()
    full[:, 1:] -= csum[:, : -dur]
    return full == dur


def _pack_witness(params: GenParams, rng: random.Random) -> list[_Placed] | None:
    """One greedy packing attempt; None when it falls short of the target."""
    total = params.days * params.slots_per_day
    capacity = params.n_classes * total
    target = max(1, round(capacity * params.fill_percent / 100))
    tolerance = capacity * 2 // 100
    lo, hi = params.durations

    t_busy = np.zeros((params.n_teachers, total), dtype=bool)
    c_busy = np.zeros((params.n_classes, total), dtype=bool)
    r_busy = np.zeros((params.n_rooms, total), dtype=bool)
    slot_in_day = np.arange(total) % params.slots_per_day

    placed: list[_Placed] = []
    used = 0
    while used < target:
        remaining = target - used
        if remaining < lo:
            break
        drawn = rng.randint(lo, min(hi, remaining))
        chosen = None
        for dur in range(drawn, lo - 1, -1):
            day_ok = slot_in_day[: total - dur + 1] + dur <= params.slots_per_day
            t_win = _window_free(t_busy, dur)
            r_win = _window_free(r_busy, dur)
            open_starts = day_ok & t_win.any(axis=0) & r_win.any(axis=0)
            spots = _window_free(c_busy, dur) & open_starts
            flat = np.flatnonzero(spots)
            if flat.size:
                pick = int(flat[rng.randrange(flat.size)])
                cls, start = divmod(pick, spots.shape[1])
                teacher = int(rng.choice(list(np.flatnonzero(t_win[:, start]))))
                room = int(rng.choice(list(np.flatnonzero(r_win[:, start]))))
                chosen = _Placed(teacher, cls, room, start, dur)
                break
        if chosen is None:
            break
        t_busy[chosen.teacher, chosen.start : chosen.start + chosen.duration] = True
        c_busy[chosen.cls, chosen.start : chosen.start + chosen.duration] = True
        r_busy[chosen.room, chosen.start : chosen.start + chosen.duration] = True
        placed.append(chosen)
        used += chosen.duration

    if target - used > tolerance:
        return None
    return placed


def generate(params: GenParams) -> tuple[Problem, Schedule]:
    """Produce one instance plus the witness timetable it was packed around."""
    rng = random.Random(params.seed)
    placed = None
    for _ in range(_MAX_ATTEMPTS):
        placed = _pack_witness(params, rng)
        if placed is not None:
            break
    if placed is None:
        raise GenerationError(
            f"could not pack {params.fill_percent}% of class-slot capacity "
            f"with durations {params.durations} after {_MAX_ATTEMPTS} attempts"
        )

    teachers = [f"t{i:02d}" for i in range(params.n_teachers)]
    classes = [f"c{i:02d}" for i in range(params.n_classes)]
    rooms = [f"r{i:02d}" for i in range(params.n_rooms)]
    total = params.days * params.slots_per_day

    width = max(3, len(str(max(len(placed) - 1, 0))))
    activities = []
    assignment: dict[str, Location] = {}
    for i, p in enumerate(placed):
        a_id = f"a{i:0{width}d}"
        room_pool = [r for r in range(params.n_rooms) if r != p.room]
        n_alts = rng.randint(0, min(2, len(room_pool)))
        alts = sorted(rng.sample(room_pool, n_alts))
        group_rooms = [rooms[p.room]] + [rooms[r] for r in alts]
        activities.append(
            Activity(
                a_id,
                duration=p.duration,
                groups=(
                    conjunctive(teachers[p.teacher], classes[p.cls]),
                    disjunctive(*group_rooms),
                ),
            )
        )
        assignment[a_id] = Location(
            p.start, frozenset({teachers[p.teacher], classes[p.cls], rooms[p.room]})
        )

    # Dependencies between witness-ordered neighbors of one class are
    # satisfied by construction; meets() additionally needs them touching.
    dependencies = []
    by_class: dict[int, list[tuple[int, str]]] = {}
    for i, p in enumerate(placed):
        by_class.setdefault(p.cls, []).append((p.start, activities[i].id))
    for cls in sorted(by_class):
        row = sorted(by_class[cls])
        for (s1, first), (s2, second) in zip(row, row[1:]):
            if rng.random() >= params.dependency_density:
                continue
            end1 = s1 + activities[int(first[1:])].duration
            kinds = [DepKind.BEFORE] + ([DepKind.MEETS] if end1 == s2 else [])
            dependencies.append(Dependency(rng.choice(kinds), first, second))

    # Soft marks go only where the witness leaves the resource idle, so the
    # witness stays violation-free on both hard and soft counts.
    idle = {rid: np.ones(total, dtype=bool) for rid in teachers + classes + rooms}
    for i, p in enumerate(placed):
        for rid in assignment[activities[i].id].selection:
            idle[rid][p.start : p.start + p.duration] = False
    resources = []
    for rid in teachers + classes + rooms:
        kind = {"t": "teacher", "c": "class", "r": "room"}[rid[0]]
        marks = [Mark.NEUTRAL] * total
        toggled = False
        for s in range(total):
            if idle[rid][s] and rng.random() < params.soft_density:
                marks[s] = Mark.SOFT
                toggled = True
        prefs = TimePreference(tuple(marks)) if toggled else None
        resources.append(Resource(rid, kind=kind, prefs=prefs))

    problem = Problem(
        grid=TimeGrid(days=params.days, slots_per_day=params.slots_per_day),
        resources=tuple(resources),
        activities=tuple(activities),
        dependencies=tuple(dependencies),
    )
    witness = Schedule(assignment=assignment)
    return problem, witness
