"""Domain model for slot-grid timetabling.

A problem is a uniform grid of time slots, a set of unit-capacity resources,
a set of activities that each occupy a run of consecutive slots on a chosen
set of resources, and binary temporal dependencies between activities.  All
types here are immutable once constructed; structural validation happens when
a :class:`Problem` is assembled, so the solving layers can trust the data.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum, IntEnum
from functools import cached_property
from typing import Iterable, Mapping, Sequence


class ModelError(ValueError):
    """Domain data violates a structural invariant."""


class Mark(IntEnum):
    """Per-slot availability mark: soft marks discourage, hard marks forbid."""

    NEUTRAL = 0
    SOFT = 1
    HARD = 2


@dataclass(frozen=True)
class TimeGrid:
    """Uniform scheduling grid of ``days * slots_per_day`` equal slots."""

    days: int
    slots_per_day: int

    def __post_init__(self) -> None:
        if self.days < 1 or self.slots_per_day < 1:
            raise ModelError("grid needs at least one day and one slot per day")

    @property
    def total_slots(self) -> int:
        return self.days * self.slots_per_day

    def day_of(self, slot: int) -> int:
        return slot // self.slots_per_day


@dataclass(frozen=True)
class TimePreference:
    """One mark per slot of the grid.

    ``None`` is accepted anywhere a TimePreference is expected and means
    neutral everywhere.
    """

    marks: tuple[Mark, ...]

    @classmethod
    def neutral(cls, total_slots: int) -> "TimePreference":
        return cls(marks=(Mark.NEUTRAL,) * total_slots)

    @classmethod
    def from_sets(
        cls,
        total_slots: int,
        soft: Iterable[int] = (),
        hard: Iterable[int] = (),
    ) -> "TimePreference":
        marks = [Mark.NEUTRAL] * total_slots
        for s in soft:
            marks[s] = Mark.SOFT
        for s in hard:
            marks[s] = Mark.HARD
        return cls(marks=tuple(marks))

    @cached_property
    def hard_slots(self) -> frozenset[int]:
        return frozenset(i for i, m in enumerate(self.marks) if m is Mark.HARD)

    @cached_property
    def soft_slots(self) -> frozenset[int]:
        return frozenset(i for i, m in enumerate(self.marks) if m is Mark.SOFT)

    def mark(self, slot: int) -> Mark:
        return self.marks[slot]


def hard_slots_of(prefs: "TimePreference | None") -> frozenset[int]:
    return prefs.hard_slots if prefs is not None else frozenset()


def soft_slots_of(prefs: "TimePreference | None") -> frozenset[int]:
    return prefs.soft_slots if prefs is not None else frozenset()


@dataclass(frozen=True)
class Resource:
    """Unit-capacity entity (teacher, class, room, ...) with slot marks."""

    id: str
    name: str = ""
    kind: str = ""
    prefs: TimePreference | None = None


class GroupMode(str, Enum):
    CONJUNCTIVE = "conjunctive"
    DISJUNCTIVE = "disjunctive"


@dataclass(frozen=True)
class ResourceGroup:
    """All-of (conjunctive) or exactly-one-of (disjunctive) resource need."""

    mode: GroupMode
    members: tuple[str, ...]

    def __post_init__(self) -> None:
        if isinstance(self.members, list):
            object.__setattr__(self, "members", tuple(self.members))
        if not self.members:
            raise ModelError("resource group has no members")
        if len(set(self.members)) != len(self.members):
            raise ModelError(f"duplicate member in resource group: {self.members}")


def conjunctive(*members: str) -> ResourceGroup:
    return ResourceGroup(GroupMode.CONJUNCTIVE, tuple(members))


def disjunctive(*members: str) -> ResourceGroup:
    return ResourceGroup(GroupMode.DISJUNCTIVE, tuple(members))


@dataclass(frozen=True)
class Location:
    """A concrete placement option: a start slot plus chosen resources."""

    start: int
    selection: frozenset[str]

    def __post_init__(self) -> None:
        if not isinstance(self.selection, frozenset):
            object.__setattr__(self, "selection", frozenset(self.selection))

    def key(self) -> tuple[int, tuple[str, ...]]:
        """Canonical sortable identity, used for deterministic ordering."""
        return (self.start, tuple(sorted(self.selection)))


# location_prefs keys: either a bare start slot, or (start, selection).
LocationPrefKey = "int | tuple[int, frozenset[str]]"


@dataclass(frozen=True)
class Activity:
    """A schedulable unit occupying `duration` consecutive slots.

    `location_prefs` carries user-declared penalties for locations: an exact
    (start, selection) key wins, a bare start key is the fallback, anything
    else costs nothing.
    """

    id: str
    duration: int
    groups: tuple[ResourceGroup, ...]
    name: str = ""
    prefs: TimePreference | None = None
    location_prefs: Mapping[object, float] | None = None

    def __post_init__(self) -> None:
        if isinstance(self.groups, list):
            object.__setattr__(self, "groups", tuple(self.groups))
        if self.duration < 1:
            raise ModelError(f"activity {self.id!r}: duration must be >= 1")
        if not self.groups:
            raise ModelError(f"activity {self.id!r}: needs at least one resource group")

    def location_penalty(self, loc: Location) -> float:
        if not self.location_prefs:
            return 0.0
        exact = self.location_prefs.get((loc.start, loc.selection))
        if exact is not None:
            return float(exact)
        return float(self.location_prefs.get(loc.start, 0.0))


class DepKind(str, Enum):
    BEFORE = "before"
    MEETS = "meets"
    CONCURRENT = "concurrent"


@dataclass(frozen=True)
class Dependency:
    """Binary temporal relation between two activities.

    With end(a) = start(a) + duration(a):
      before:     end(first) <= start(second)
      meets:      end(first) == start(second)
      concurrent: start(first) == start(second)
    """

    kind: DepKind
    first: str
    second: str

    def __post_init__(self) -> None:
        if self.first == self.second:
            raise ModelError(f"dependency endpoints must differ: {self.first!r}")

    def involves(self, activity_id: str) -> bool:
        return activity_id in (self.first, self.second)


def dependency_satisfied(
    kind: DepKind,
    first_start: int,
    first_end: int,
    second_start: int,
) -> bool:
    if kind is DepKind.BEFORE:
        return first_end <= second_start
    if kind is DepKind.MEETS:
        return first_end == second_start
    return first_start == second_start


@dataclass(frozen=True)
class Problem:
    """Immutable problem description; validates all cross-references."""

    grid: TimeGrid
    resources: tuple[Resource, ...]
    activities: tuple[Activity, ...]
    dependencies: tuple[Dependency, ...] = ()

    def __post_init__(self) -> None:
        for name in ("resources", "activities", "dependencies"):
            value = getattr(self, name)
            if isinstance(value, list):
                object.__setattr__(self, name, tuple(value))
        self._validate()

    def _validate(self) -> None:
        total = self.grid.total_slots
        res_ids = [r.id for r in self.resources]
        if len(set(res_ids)) != len(res_ids):
            raise ModelError("duplicate resource ids")
        act_ids = [a.id for a in self.activities]
        if len(set(act_ids)) != len(act_ids):
            raise ModelError("duplicate activity ids")
        clash = set(res_ids) & set(act_ids)
        if clash:
            raise ModelError(f"ids used for both a resource and an activity: {sorted(clash)}")
        res_set = set(res_ids)
        for r in self.resources:
            if r.prefs is not None and len(r.prefs.marks) != total:
                raise ModelError(
                    f"resource {r.id!r}: preference has {len(r.prefs.marks)} marks, grid has {total} slots"
                )
        for a in self.activities:
            if a.duration > total:
                raise ModelError(f"activity {a.id!r}: duration {a.duration} exceeds grid ({total} slots)")
            if a.prefs is not None and len(a.prefs.marks) != total:
                raise ModelError(
                    f"activity {a.id!r}: preference has {len(a.prefs.marks)} marks, grid has {total} slots"
                )
            for g in a.groups:
                for m in g.members:
                    if m not in res_set:
                        raise ModelError(f"activity {a.id!r}: unknown resource {m!r} in group")
            if a.location_prefs:
                for key, penalty in a.location_prefs.items():
                    if not (float(penalty) >= 0.0):
                        raise ModelError(f"activity {a.id!r}: negative location penalty for {key!r}")
        seen: set[tuple[DepKind, str, str]] = set()
        for d in self.dependencies:
            for endpoint in (d.first, d.second):
                if endpoint not in set(act_ids):
                    raise ModelError(f"dependency references unknown activity {endpoint!r}")
            sig = (d.kind, d.first, d.second)
            if sig in seen:
                raise ModelError(f"duplicate dependency {d.kind.value}({d.first}, {d.second})")
            seen.add(sig)

    @cached_property
    def resource_by_id(self) -> dict[str, Resource]:
        return {r.id: r for r in self.resources}

    @cached_property
    def activity_by_id(self) -> dict[str, Activity]:
        return {a.id: a for a in self.activities}

    @cached_property
    def activity_order(self) -> dict[str, int]:
        return {a.id: i for i, a in enumerate(self.activities)}

    @cached_property
    def resource_order(self) -> dict[str, int]:
        return {r.id: i for i, r in enumerate(self.resources)}

    @cached_property
    def dependencies_of(self) -> dict[str, tuple[Dependency, ...]]:
        by_act: dict[str, list[Dependency]] = {a.id: [] for a in self.activities}
        for d in self.dependencies:
            by_act[d.first].append(d)
            by_act[d.second].append(d)
        return {k: tuple(v) for k, v in by_act.items()}

    def resource(self, resource_id: str) -> Resource:
        try:
            return self.resource_by_id[resource_id]
        except KeyError:
            raise ModelError(f"unknown resource {resource_id!r}") from None

    def activity(self, activity_id: str) -> Activity:
        try:
            return self.activity_by_id[activity_id]
        except KeyError:
            raise ModelError(f"unknown activity {activity_id!r}") from None

    def sort_activities(self, ids: Iterable[str]) -> list[str]:
        """Deterministic ordering helper: problem declaration order."""
        order = self.activity_order
        return sorted(ids, key=lambda i: order.get(i, len(order)))


@dataclass
class Schedule:
    """Partial assignment of activities to locations, with user-pinned ids.

    Soundness (every hard constraint satisfied on the assigned part) is the
    responsibility of whoever mutates a schedule; `check_schedule` audits it.
    """

    assignment: dict[str, Location] = field(default_factory=dict)
    fixed: set[str] = field(default_factory=set)

    def copy(self) -> "Schedule":
        return Schedule(assignment=dict(self.assignment), fixed=set(self.fixed))

    @property
    def scheduled_count(self) -> int:
        return len(self.assignment)

    def is_fixed(self, activity_id: str) -> bool:
        return activity_id in self.fixed
