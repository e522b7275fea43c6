"""Iterative repair search over partial schedules.

One iteration picks a troublesome unscheduled activity, scores its candidate
locations, and places it there, evicting whatever non-fixed activities clash.
A short tabu list of recent (activity, location) placements breaks two-cycles;
an aspiration rule lets a once-seen pair through when it is the current best.
The schedule stays sound after every step.
"""

from __future__ import annotations

import random
import time
from collections import Counter, deque
from dataclasses import dataclass, fields
from enum import Enum
from math import isfinite

import numpy as np

from .engine import (
    ActivityIndex,
    CandidateIndex,
    Occupancy,
    candidate_masks,
    dep_violation_mask,
    gather_occupants,
    has_free_location,
)
from .feasibility import check_schedule, conflicts as pure_conflicts, hard_feasible, soft_violations
from .model import Location, ModelError, Problem, Schedule


class SolverError(RuntimeError):
    pass


class ContractViolation(SolverError):
    """An operation was called outside its stated precondition."""


class NoLocationError(SolverError):
    """Every candidate location was filtered out; skip the activity this turn."""


class Strategy(str, Enum):
    RANDOM = "random"
    SAMPLED = "sampled"
    FULL = "full"


class LocationRule(str, Enum):
    THRESHOLD = "threshold"  # group = scores within location_group_factor of the best
    BEST_N = "best_n"  # group = the location_best_count lowest scores


@dataclass(frozen=True)
class HeuristicWeights:
    """Search configuration: scoring weights plus the knobs around them.

    Activity selection weights (minimal value wins):
    val = -w_removed*n_removed - w_deps*n_deps
          + w_places*n_places + w_places_free*n_places_no_conflict

    Location selection weights (minimal value wins, all terms >= 0):
    val = w_conflicts*n_conflicts + w_repeat_evict*n_repeat_evict
          + w_conflict_no_resched*n_conflict_no_resched + w_soft*n_soft
          + w_dist_prev*dist_prev + w_user_pref*user_pref
    """

    w_removed: float = 3.0
    w_deps: float = 1.0
    w_places: float = 0.05
    w_places_free: float = 0.2
    w_conflicts: float = 10.0
    w_repeat_evict: float = 3.0
    w_conflict_no_resched: float = 6.0
    w_soft: float = 1.0
    w_dist_prev: float = 0.1
    w_user_pref: float = 1.0
    sample_probability: float = 0.2
    location_group_factor: float = 2.0
    tabu_length: int = 20
    max_iterations: int = 10_000
    strategy: Strategy = Strategy.SAMPLED
    location_rule: LocationRule = LocationRule.THRESHOLD
    location_best_count: int = 5
    # Exact unmovable-conflict scoring is restricted to the minimal-conflict
    # candidates once this many locations are in play; the rest get the
    # pessimistic bound n_conflicts.
    resched_scan_limit: int = 200

    def __post_init__(self) -> None:
        for f in fields(self):
            if f.name.startswith("w_"):
                v = getattr(self, f.name)
                if not isfinite(v) or v < 0:
                    raise ModelError(f"{f.name} must be finite and >= 0, got {v!r}")
        if not 0 < self.sample_probability <= 1:
            raise ModelError(f"sample_probability must be in (0, 1], got {self.sample_probability!r}")
        if self.location_group_factor < 1:
            raise ModelError(f"location_group_factor must be >= 1, got {self.location_group_factor!r}")
        if self.tabu_length < 0:
            raise ModelError(f"tabu_length must be >= 0, got {self.tabu_length!r}")
        if self.max_iterations < 0:
            raise ModelError(f"max_iterations must be >= 0, got {self.max_iterations!r}")
        if self.location_best_count < 1:
            raise ModelError(f"location_best_count must be >= 1, got {self.location_best_count!r}")
        if self.resched_scan_limit < 0:
            raise ModelError(f"resched_scan_limit must be >= 0, got {self.resched_scan_limit!r}")


@dataclass(frozen=True)
class ActivityStats:
    n_removed: int
    n_deps: int
    n_places: int
    n_places_no_conflict: int

    def to_doc(self) -> dict:
        return {
            "n_removed": self.n_removed,
            "n_deps": self.n_deps,
            "n_places": self.n_places,
            "n_places_no_conflict": self.n_places_no_conflict,
        }


@dataclass(frozen=True)
class LocationStats:
    n_conflicts: int
    n_repeat_evict: int
    n_conflict_no_resched: int
    n_soft: int
    dist_prev: float
    user_pref: float

    def to_doc(self) -> dict:
        return {
            "n_conflicts": self.n_conflicts,
            "n_repeat_evict": self.n_repeat_evict,
            "n_conflict_no_resched": self.n_conflict_no_resched,
            "n_soft": self.n_soft,
            "dist_prev": self.dist_prev,
            "user_pref": self.user_pref,
        }


@dataclass
class ActivityHistory:
    last_location: Location | None = None
    last_evictor: str | None = None
    n_removed: int = 0

    def copy(self) -> "ActivityHistory":
        return ActivityHistory(self.last_location, self.last_evictor, self.n_removed)


class TabuStatus(str, Enum):
    FREE = "free"
    ONCE = "once"
    TWICE = "twice"


class TabuList:
    """FIFO of recent (activity id, Location) placements, bounded by capacity."""

    def __init__(self, capacity: int) -> None:
        self.capacity = capacity
        self._queue: deque[tuple[str, Location]] = deque()
        self._counts: Counter[tuple[str, Location]] = Counter()

    def __len__(self) -> int:
        return len(self._queue)

    def entries(self) -> tuple[tuple[str, Location], ...]:
        return tuple(self._queue)

    def push(self, activity_id: str, loc: Location) -> None:
        if self.capacity == 0:
            return
        key = (activity_id, loc)
        self._queue.append(key)
        self._counts[key] += 1
        # The selection rule never lets a twice-listed pair through again.
        assert self._counts[key] <= 2, f"pair {key} pushed a third time"
        while len(self._queue) > self.capacity:
            old = self._queue.popleft()
            self._counts[old] -= 1
            if self._counts[old] == 0:
                del self._counts[old]

    def count(self, activity_id: str, loc: Location) -> int:
        return self._counts.get((activity_id, loc), 0)

    def counts_for(self, activity_id: str) -> dict[Location, int]:
        return {loc: n for (aid, loc), n in self._counts.items() if aid == activity_id}

    def drop_activity(self, activity_id: str) -> None:
        kept = [e for e in self._queue if e[0] != activity_id]
        self._queue = deque(kept)
        self._counts = Counter(kept)

    def resize(self, capacity: int) -> None:
        self.capacity = capacity
        while len(self._queue) > capacity:
            old = self._queue.popleft()
            self._counts[old] -= 1
            if self._counts[old] == 0:
                del self._counts[old]

    def clone(self) -> "TabuList":
        other = TabuList(self.capacity)
        other._queue = deque(self._queue)
        other._counts = Counter(self._counts)
        return other


def tabu_status(tabu: TabuList, activity_id: str, loc: Location) -> TabuStatus:
    n = tabu.count(activity_id, loc)
    if n == 0:
        return TabuStatus.FREE
    if n == 1:
        return TabuStatus.ONCE
    return TabuStatus.TWICE


@dataclass(frozen=True)
class IterationReport:
    """What one search step did."""

    iteration: int
    activity: str
    n_activity_candidates: int
    n_location_candidates: int
    skipped: bool
    location: Location | None
    stats: LocationStats | None
    score: float | None
    evicted: tuple[str, ...]
    unscheduled_after: int

    def to_doc(self) -> dict:
        return {
            "iteration": self.iteration,
            "activity": self.activity,
            "activity_candidates": self.n_activity_candidates,
            "location_candidates": self.n_location_candidates,
            "skipped": self.skipped,
            "location": None
            if self.location is None
            else {"start": self.location.start, "selection": sorted(self.location.selection)},
            "stats": None if self.stats is None else self.stats.to_doc(),
            "score": self.score,
            "evicted": list(self.evicted),
            "unscheduled_after": self.unscheduled_after,
        }


@dataclass
class BestSnapshot:
    assignment: dict[str, Location]
    fixed: set[str]
    scheduled_count: int
    soft_total: int

    def key(self) -> tuple[int, int]:
        return (self.scheduled_count, -self.soft_total)

    def to_schedule(self) -> Schedule:
        return Schedule(assignment=dict(self.assignment), fixed=set(self.fixed))


@dataclass(frozen=True)
class ActivityChoice:
    activity: str
    n_candidates: int


@dataclass(frozen=True)
class LocationChoice:
    location: Location
    stats: LocationStats
    score: float
    n_candidates: int
    conflicts: frozenset[str]


class SolverState:
    """Everything one search run owns: schedule, history, tabu, RNG, indexes.

    The schedule is sound at every point where control leaves this module.
    """

    def __init__(
        self,
        problem: Problem,
        weights: HeuristicWeights | None = None,
        seed: int = 0,
        schedule: Schedule | None = None,
    ) -> None:
        self.problem = problem
        self.weights = weights or HeuristicWeights()
        self.rng = random.Random(seed)
        self.schedule = schedule.copy() if schedule is not None else Schedule()
        bad = check_schedule(problem, self.schedule)
        if bad:
            raise ModelError(f"initial schedule is unsound: {bad[0].detail or bad[0].kind}")
        self.index = CandidateIndex(problem)
        self.occupancy = Occupancy(self.index)
        self.occupancy.rebuild(problem, self.schedule)
        self.unscheduled: set[str] = {a.id for a in problem.activities} - set(self.schedule.assignment)
        self.history: dict[str, ActivityHistory] = {a.id: ActivityHistory() for a in problem.activities}
        for a_id, loc in self.schedule.assignment.items():
            self.history[a_id].last_location = loc
        self.tabu = TabuList(self.weights.tabu_length)
        self.iteration = 0
        self.assigned_soft: dict[str, int] = {
            a_id: soft_violations(problem, problem.activity(a_id), loc)
            for a_id, loc in self.schedule.assignment.items()
        }
        self.soft_total = sum(self.assigned_soft.values())
        self.partners: dict[str, set[str]] = {a.id: set() for a in problem.activities}
        for dep in problem.dependencies:
            self.partners[dep.first].add(dep.second)
            self.partners[dep.second].add(dep.first)
        self.timing: dict[str, float] = {}
        self.best = BestSnapshot(
            assignment=dict(self.schedule.assignment),
            fixed=set(self.schedule.fixed),
            scheduled_count=self.schedule.scheduled_count,
            soft_total=self.soft_total,
        )

    # -- bookkeeping ------------------------------------------------------

    def set_weights(self, weights: HeuristicWeights) -> None:
        self.weights = weights
        self.tabu.resize(weights.tabu_length)

    def place_counts(self, activity_id: str) -> tuple[int, int]:
        """(n_places, n_places_no_conflict) against the live board.

        Recomputed on every call: the full-scan strategy pays for scanning
        everything, exactly the cost the sampling strategy exists to dodge.
        """
        ai = self.index.activities[activity_id]
        masks = candidate_masks(ai, self.occupancy, self.problem, self.schedule)
        return int(masks.eligible.sum()), int(masks.conflict_free.sum())

    def assign(self, activity_id: str, loc: Location, fixed: bool = False) -> None:
        act = self.problem.activity(activity_id)
        self.schedule.assignment[activity_id] = loc
        if fixed:
            self.schedule.fixed.add(activity_id)
        self.occupancy.place(act, loc, fixed=fixed)
        self.unscheduled.discard(activity_id)
        ai = self.index.activities[activity_id]
        row = ai.row_for(loc)
        soft = int(ai.soft_by_row[row]) if row is not None else soft_violations(self.problem, act, loc)
        self.assigned_soft[activity_id] = soft
        self.soft_total += soft
        self.history[activity_id].last_location = loc

    def unassign(self, activity_id: str, evictor: str | None = None, count: bool = False) -> Location:
        """Take the activity off the board.

        `count` marks a real removal (eviction or detach): the removal counter
        goes up and the evictor, possibly None, is recorded.  Without it the
        unassignment is a silent half of a move.
        """
        loc = self.schedule.assignment.pop(activity_id)
        self.schedule.fixed.discard(activity_id)
        self.occupancy.remove(self.problem.activity(activity_id), loc)
        self.unscheduled.add(activity_id)
        self.soft_total -= self.assigned_soft.pop(activity_id, 0)
        hist = self.history[activity_id]
        hist.last_location = loc
        if count:
            hist.last_evictor = evictor
            hist.n_removed += 1
        return loc

    def ordered_unscheduled(self) -> list[str]:
        return [a_id for a_id in self.index.act_ids if a_id in self.unscheduled]

    def maybe_update_best(self) -> bool:
        key = (self.schedule.scheduled_count, -self.soft_total)
        if key > self.best.key():
            self.best = BestSnapshot(
                assignment=dict(self.schedule.assignment),
                fixed=set(self.schedule.fixed),
                scheduled_count=self.schedule.scheduled_count,
                soft_total=self.soft_total,
            )
            return True
        return False

    def _time(self, key: str, seconds: float) -> None:
        self.timing[key] = self.timing.get(key, 0.0) + seconds
        self.timing[key + "_calls"] = self.timing.get(key + "_calls", 0) + 1

    def swap_problem(self, problem: Problem) -> None:
        """Point the state at an edited problem.

        The carried-over schedule may be unsound under the new problem; the
        session's repair pass detaches the violated activities right after.
        Assignments of removed activities are dropped here.
        """
        ids = {a.id for a in problem.activities}
        self.problem = problem
        self.index = CandidateIndex(problem)
        self.occupancy = Occupancy(self.index)
        for a_id in [a for a in self.schedule.assignment if a not in ids]:
            del self.schedule.assignment[a_id]
        self.schedule.fixed &= ids
        self.occupancy.rebuild(problem, self.schedule)
        self.unscheduled = ids - set(self.schedule.assignment)
        for a_id in ids - set(self.history):
            self.history[a_id] = ActivityHistory()
        for a_id in set(self.history) - ids:
            del self.history[a_id]
            self.tabu.drop_activity(a_id)
        self.partners = {a_id: set() for a_id in ids}
        for dep in problem.dependencies:
            self.partners[dep.first].add(dep.second)
            self.partners[dep.second].add(dep.first)
        self.assigned_soft = {
            a_id: soft_violations(problem, problem.activity(a_id), loc)
            for a_id, loc in self.schedule.assignment.items()
        }
        self.soft_total = sum(self.assigned_soft.values())

    def refresh_best(self) -> None:
        """Re-anchor the best snapshot after an edit.

        A stored best that still stands under the current problem is kept,
        with its soft count refreshed; otherwise the live schedule becomes
        the new baseline.
        """
        stored = self.best.to_schedule()
        stored.assignment = {
            a: l for a, l in stored.assignment.items() if a in self.problem.activity_by_id
        }
        stored.fixed &= set(stored.assignment)
        honors_pins = all(
            stored.assignment.get(f) == self.schedule.assignment.get(f)
            for f in self.schedule.fixed
        )
        stored.fixed = {f for f in self.schedule.fixed if f in stored.assignment}
        if honors_pins and not check_schedule(self.problem, stored):
            soft_tot = sum(
                soft_violations(self.problem, self.problem.activity(a), l)
                for a, l in stored.assignment.items()
            )
            self.best = BestSnapshot(
                assignment=stored.assignment,
                fixed=stored.fixed,
                scheduled_count=len(stored.assignment),
                soft_total=soft_tot,
            )
            self.maybe_update_best()
            return
        self.best = BestSnapshot(
            assignment=dict(self.schedule.assignment),
            fixed=set(self.schedule.fixed),
            scheduled_count=self.schedule.scheduled_count,
            soft_total=self.soft_total,
        )

    def clone(self) -> "SolverState":
        other = SolverState.__new__(SolverState)
        other.problem = self.problem
        other.weights = self.weights
        other.rng = random.Random()
        other.rng.setstate(self.rng.getstate())
        other.schedule = self.schedule.copy()
        other.index = self.index
        other.occupancy = self.occupancy.clone()
        other.unscheduled = set(self.unscheduled)
        other.history = {k: h.copy() for k, h in self.history.items()}
        other.tabu = self.tabu.clone()
        other.iteration = self.iteration
        other.assigned_soft = dict(self.assigned_soft)
        other.soft_total = self.soft_total
        other.partners = self.partners
        other.timing = dict(self.timing)
        other.best = BestSnapshot(
            assignment=dict(self.best.assignment),
            fixed=set(self.best.fixed),
            scheduled_count=self.best.scheduled_count,
            soft_total=self.best.soft_total,
        )
        return other

    def restore_from(self, backup: "SolverState") -> None:
        """Adopt a private clone's contents wholesale, e.g. to roll back an edit."""
        self.problem = backup.problem
        self.weights = backup.weights
        self.rng.setstate(backup.rng.getstate())
        self.schedule = backup.schedule
        self.index = backup.index
        self.occupancy = backup.occupancy
        self.unscheduled = backup.unscheduled
        self.history = backup.history
        self.tabu = backup.tabu
        self.iteration = backup.iteration
        self.assigned_soft = backup.assigned_soft
        self.soft_total = backup.soft_total
        self.partners = backup.partners
        self.timing = backup.timing
        self.best = backup.best


# -- activity selection ---------------------------------------------------


def activity_score(state: SolverState, activity_id: str) -> tuple[float, ActivityStats]:
    """Lower is worse off, and worse off goes first."""
    if activity_id in state.schedule.assignment:
        raise ContractViolation(f"{activity_id!r} is already scheduled")
    w = state.weights
    n_places, n_free = state.place_counts(activity_id)
    stats = ActivityStats(
        n_removed=state.history[activity_id].n_removed,
        n_deps=len(state.problem.dependencies_of.get(activity_id, ())),
        n_places=n_places,
        n_places_no_conflict=n_free,
    )
    score = (
        -w.w_removed * stats.n_removed
        - w.w_deps * stats.n_deps
        + w.w_places * stats.n_places
        + w.w_places_free * stats.n_places_no_conflict
    )
    return score, stats


def select_activity(state: SolverState) -> ActivityChoice:
    t0 = time.perf_counter()
    try:
        ordered = state.ordered_unscheduled()
        if not ordered:
            raise ContractViolation("no unscheduled activity to select")
        w = state.weights
        if w.strategy is Strategy.RANDOM:
            return ActivityChoice(state.rng.choice(ordered), len(ordered))
        if w.strategy is Strategy.FULL:
            pool = ordered
        else:
            pool = [a for a in ordered if state.rng.random() < w.sample_probability]
            if not pool:
                pool = [state.rng.choice(ordered)]
        best_score = None
        best: list[str] = []
        for a_id in pool:
            score, _ = activity_score(state, a_id)
            if best_score is None or score < best_score:
                best_score = score
                best = [a_id]
            elif score == best_score:
                best.append(a_id)
        chosen = best[0] if len(best) == 1 else state.rng.choice(best)
        return ActivityChoice(chosen, len(pool))
    finally:
        state._time("select_activity", time.perf_counter() - t0)


# -- location selection ---------------------------------------------------


def _conflict_sets_for_row(
    state: SolverState, ai: ActivityIndex, row: int
) -> set[str]:
    by_ordinal = state.index.act_ids
    out = {by_ordinal[o] for o in gather_occupants(ai, state.occupancy, row)}
    for link in ai.deps:
        p_loc = state.schedule.assignment.get(link.partner)
        if p_loc is None:
            continue
        p_act = state.problem.activity(link.partner)
        start = np.array([ai.row_start[row]], dtype=np.int32)
        if dep_violation_mask(start, ai.duration, link, p_loc.start, p_loc.start + p_act.duration)[0]:
            out.add(link.partner)
    return out


def _hypothetical_occ(
    state: SolverState, moved_id: str, moved_loc: Location, removed: set[str]
) -> np.ndarray:
    """The board after `moved_id` goes to `moved_loc` and `removed` leave."""
    occ = state.occupancy.occ.copy()
    for c_id in removed:
        c_loc = state.schedule.assignment.get(c_id)
        if c_loc is None:
            continue
        cells = state.index.cells_for(state.problem.activity(c_id), c_loc)
        if cells is not None:
            occ[cells] = -1
    moved_cells = state.index.cells_for(state.problem.activity(moved_id), moved_loc)
    if moved_cells is not None:
        occ[moved_cells] = state.index.act_order[moved_id]
    return occ


def _free_on_board(
    state: SolverState,
    occ: np.ndarray,
    moved_id: str,
    moved_loc: Location,
    removed: set[str],
    target_id: str,
) -> bool:
    """has_free_location for `target_id`, seeing only its partners' positions."""
    assignment: dict[str, Location] = {}
    for p in state.partners.get(target_id, ()):
        if p == moved_id or p in removed:
            continue
        p_loc = state.schedule.assignment.get(p)
        if p_loc is not None:
            assignment[p] = p_loc
    if moved_id in state.partners.get(target_id, ()):
        assignment[moved_id] = moved_loc
    return has_free_location(
        state.index.activities[target_id], occ, state.problem, assignment
    )


def _reschedulable_exact(
    state: SolverState,
    moved_id: str,
    moved_loc: Location,
    removed: set[str],
    target_id: str,
) -> bool:
    """Can `target_id` land conflict-free after `moved_id` goes to `moved_loc`
    and everything in `removed` leaves the board?"""
    occ = _hypothetical_occ(state, moved_id, moved_loc, removed)
    return _free_on_board(state, occ, moved_id, moved_loc, removed, target_id)


def location_score(
    state: SolverState, activity_id: str, loc: Location
) -> tuple[float, LocationStats]:
    """Exact score of one candidate location, independent of any batch shortcuts."""
    ai = state.index.activities[activity_id]
    row = ai.row_for(loc)
    if row is None:
        raise ContractViolation(f"{loc} is not a hard-feasible candidate of {activity_id!r}")
    masks = candidate_masks(ai, state.occupancy, state.problem, state.schedule)
    if not masks.eligible[row]:
        raise ContractViolation(f"{loc} clashes with a fixed activity")
    clash = _conflict_sets_for_row(state, ai, row)
    clash.discard(activity_id)
    n_repeat = sum(1 for c in clash if state.history[c].last_evictor == activity_id)
    n_no_resched = sum(
        1
        for c in clash
        if not _reschedulable_exact(state, activity_id, loc, set(clash), c)
    )
    prev = state.history[activity_id].last_location
    if prev is None:
        dist = 0
    else:
        dist = abs(loc.start - prev.start) + len(loc.selection ^ prev.selection)
    stats = LocationStats(
        n_conflicts=len(clash),
        n_repeat_evict=n_repeat,
        n_conflict_no_resched=n_no_resched,
        n_soft=int(ai.soft_by_row[row]),
        dist_prev=dist,
        user_pref=state.problem.activity(activity_id).location_penalty(loc),
    )
    return _weighted_location_score(state.weights, stats), stats


def _weighted_location_score(w: HeuristicWeights, stats: LocationStats) -> float:
    return (
        w.w_conflicts * stats.n_conflicts
        + w.w_repeat_evict * stats.n_repeat_evict
        + w.w_conflict_no_resched * stats.n_conflict_no_resched
        + w.w_soft * stats.n_soft
        + w.w_dist_prev * stats.dist_prev
        + w.w_user_pref * stats.user_pref
    )


class _BatchScores:
    """Score components for every eligible candidate row of one activity."""

    __slots__ = (
        "rows", "starts", "ordinals", "presence", "n_conf", "n_rep",
        "no_resched", "soft", "user", "dist", "scores",
    )

    def __init__(self, rows, starts, ordinals, presence, n_conf, n_rep,
                 no_resched, soft, user, dist, scores):
        self.rows = rows
        self.starts = starts
        self.ordinals = ordinals
        self.presence = presence
        self.n_conf = n_conf
        self.n_rep = n_rep
        self.no_resched = no_resched
        self.soft = soft
        self.user = user
        self.dist = dist
        self.scores = scores

    def conflict_ids(self, pos: int) -> frozenset[str]:
        return frozenset(c for c, pres in self.presence.items() if pres[pos])

    def stats_at(self, pos: int) -> LocationStats:
        return LocationStats(
            n_conflicts=int(self.n_conf[pos]),
            n_repeat_evict=int(self.n_rep[pos]),
            n_conflict_no_resched=int(self.no_resched[pos]),
            n_soft=int(self.soft[pos]),
            dist_prev=float(self.dist[pos]) if self.dist is not None else 0,
            user_pref=float(self.user[pos]),
        )


def _evaluate_candidates(state: SolverState, activity_id: str) -> _BatchScores:
    problem = state.problem
    schedule = state.schedule
    ai = state.index.activities[activity_id]
    occ = state.occupancy.occ
    own = state.index.act_order[activity_id]
    n = ai.n_rows
    if n == 0:
        raise NoLocationError(f"{activity_id!r} has no hard-feasible location at all")

    vals = occ[ai.all_cells]
    conflict_cell = (vals >= 0) & (vals != own)
    if schedule.fixed:
        fvals = state.occupancy.fixed_occ[ai.all_cells]
        fixed_block = ((fvals >= 0) & (fvals != own)).any(axis=1)
    else:
        fixed_block = np.zeros(n, dtype=bool)

    dep_partner_masks: list[tuple[str, np.ndarray]] = []
    for link in ai.deps:
        p_loc = schedule.assignment.get(link.partner)
        if p_loc is None:
            continue
        p_act = problem.activity(link.partner)
        mask = dep_violation_mask(ai.row_start, ai.duration, link, p_loc.start, p_loc.start + p_act.duration)
        if not mask.any():
            continue
        dep_partner_masks.append((link.partner, mask))
        if link.partner in schedule.fixed:
            fixed_block |= mask

    eligible = ~fixed_block
    rows = np.flatnonzero(eligible)
    if rows.size == 0:
        raise NoLocationError(f"every location of {activity_id!r} clashes with a fixed activity")
    starts = ai.row_start[rows]
    ordinals = ai.row_ordinal[rows]
    m = rows.size

    # Presence of each clashing activity, per candidate row.
    act_ids = state.index.act_ids
    vals_rows = vals[rows]
    distinct = np.unique(vals_rows[conflict_cell[rows]])

    presence: dict[str, np.ndarray] = {}
    if distinct.size:
        pres_matrix = (vals_rows[:, :, None] == distinct[None, None, :]).any(axis=1)
        for k, c_ord in enumerate(distinct):
            presence[act_ids[int(c_ord)]] = pres_matrix[:, k]
    for partner, mask in dep_partner_masks:
        pm = mask[rows]
        if partner in presence:
            presence[partner] = presence[partner] | pm
        else:
            presence[partner] = pm

    n_conf = np.zeros(m, dtype=np.int64)
    for pres in presence.values():
        n_conf += pres
    n_rep = np.zeros(m, dtype=np.int64)
    for c_id, pres in presence.items():
        if state.history[c_id].last_evictor == activity_id:
            n_rep += pres

    no_resched = _no_resched_counts(state, activity_id, ai, rows, starts, ordinals, n_conf, presence)

    soft = ai.soft_by_row[rows]
    user = ai.user_by_row[rows]
    prev = state.history[activity_id].last_location
    if prev is None:
        dist = np.zeros(m, dtype=np.float64)
    else:
        symdiff = np.array(
            [len(block.selection ^ prev.selection) for block in ai.blocks], dtype=np.float64
        )
        dist = np.abs(starts.astype(np.float64) - prev.start) + symdiff[ordinals]

    w = state.weights
    scores = (
        w.w_conflicts * n_conf.astype(np.float64)
        + w.w_repeat_evict * n_rep.astype(np.float64)
        + w.w_conflict_no_resched * no_resched.astype(np.float64)
        + w.w_soft * soft.astype(np.float64)
        + w.w_dist_prev * dist
        + w.w_user_pref * user
    )
    return _BatchScores(rows, starts, ordinals, presence, n_conf, n_rep, no_resched, soft, user, dist, scores)


def _no_resched_counts(
    state: SolverState,
    activity_id: str,
    ai: ActivityIndex,
    rows: np.ndarray,
    starts: np.ndarray,
    ordinals: np.ndarray,
    n_conf: np.ndarray,
    presence: dict[str, np.ndarray],
) -> np.ndarray:
    """Per candidate row, how many of its conflicts would have nowhere to go.

    A conflict c is checked first against the locations of c that are free on
    the current board: if one of them dodges the hypothetical placement, c can
    move (exact).  When that fails and c was the only conflict, c is stuck
    (exact).  Everything else falls back to a full hypothetical board.  Beyond
    `resched_scan_limit` candidates, only the minimal-conflict rows get this
    treatment and the rest are charged the pessimistic bound n_conflicts.
    """
    m = rows.size
    out = np.zeros(m, dtype=np.int64)
    if not presence:
        return out
    w = state.weights
    if w.w_conflict_no_resched == 0:
        return out

    if m > w.resched_scan_limit:
        survivors = n_conf == n_conf.min()
    else:
        survivors = np.ones(m, dtype=bool)

    occ = state.occupancy.occ
    problem = state.problem
    index = state.index
    dur_a = ai.duration
    n_blocks_a = len(ai.blocks)

    # Bit per distinct conflictor, for subset tests of "who blocks this row
    # of c" against "who this placement would evict".
    names = sorted(presence)
    bit_of = {c: i for i, c in enumerate(names)}
    lanes = (len(names) + 63) // 64
    # Lookup tables over occupancy values shifted by one (index 0 = free).
    in_set = np.zeros(len(index.act_ids) + 1, dtype=bool)
    lane_bits = np.zeros((lanes, len(index.act_ids) + 1), dtype=np.uint64)
    for c, b in bit_of.items():
        o = index.act_order[c] + 1
        in_set[o] = True
        lane_bits[b >> 6, o] = 1 << (b & 63)
    evict_bits = np.zeros((m, lanes), dtype=np.uint64)
    for c, pres in presence.items():
        b = bit_of[c]
        evict_bits[pres, b >> 6] |= np.uint64(1 << (b & 63))

    escalate: dict[int, list[str]] = {}
    for c_id in names:
        active = presence[c_id] & survivors
        if not active.any():
            continue
        ci = index.activities[c_id]
        if ci.n_rows == 0:
            out += active
            continue
        links = ci.deps
        if any(l.partner == activity_id for l in links):
            # The placement itself shifts c's dependency window per row, so
            # only the full hypothetical board settles these.
            for pos in np.flatnonzero(active):
                escalate.setdefault(int(pos), []).append(c_id)
            continue
        c_ord = index.act_order[c_id]
        dur_c = ci.duration
        vals_c = occ[ci.all_cells]
        blocked_cell = (vals_c >= 0) & (vals_c != c_ord)
        good = ~blocked_cell.any(axis=1)
        if links:
            # rows of c that respect its dependencies against the partners'
            # current positions; evictions only ever relax these
            dep_ok = np.ones(ci.n_rows, dtype=bool)
            for link in links:
                p_loc = state.schedule.assignment.get(link.partner)
                if p_loc is None:
                    continue
                p_end = p_loc.start + problem.activity(link.partner).duration
                dep_ok &= ~dep_violation_mask(ci.row_start, dur_c, link, p_loc.start, p_end)
            good_pos = good & dep_ok
        else:
            dep_ok = None
            good_pos = good

        # Tier 1: a currently-free, dependency-clean row of c that dodges
        # the placement entirely, by time or by disjoint resources.
        reschedulable = np.zeros(m, dtype=bool)
        block_info: list[tuple[frozenset, int, int] | None] = []
        for o_c, cblock in enumerate(ci.blocks):
            sel_good = ci.row_start[good_pos & (ci.row_ordinal == o_c)]
            if sel_good.size == 0:
                block_info.append(None)
            else:
                block_info.append(
                    (cblock.selection, int(sel_good.min()), int(sel_good.max()))
                )
        for o_a in range(n_blocks_a):
            o_mask = active & (ordinals == o_a)
            if not o_mask.any():
                continue
            a_sel = ai.blocks[o_a].selection
            clear_everywhere = False
            ok = np.zeros(m, dtype=bool)
            for info in block_info:
                if info is None:
                    continue
                sel_c, lo, hi = info
                if not (sel_c & a_sel):
                    clear_everywhere = True
                    break
                ok |= (hi >= starts + dur_a) | (lo <= starts - dur_c)
            reschedulable |= o_mask if clear_everywhere else o_mask & ok
        stuck = active & ~reschedulable
        if not stuck.any():
            continue
        # One conflict only: the board after the move differs from the
        # current one just by the placement, so the dodge test was exact.
        out += stuck & (n_conf == 1)
        multi = stuck & (n_conf > 1)
        if not multi.any():
            continue

        sel_disjoint = np.array(
            [
                [not (cb.selection & ab.selection) for ab in ai.blocks]
                for cb in ci.blocks
            ],
            dtype=bool,
        )
        if links:
            # free rows of c held back only by a dependency: an eviction at
            # this position might unlock them, so if one dodges the
            # placement the position is ambiguous rather than charged
            esc_extra = np.zeros(m, dtype=bool)
            extra = good & ~dep_ok
            if extra.any():
                for o_c in range(len(ci.blocks)):
                    e_starts = ci.row_start[extra & (ci.row_ordinal == o_c)]
                    if e_starts.size == 0:
                        continue
                    lo, hi = int(e_starts.min()), int(e_starts.max())
                    esc_extra |= (
                        sel_disjoint[o_c, ordinals]
                        | (hi >= starts + dur_a)
                        | (lo <= starts - dur_c)
                    )
        else:
            esc_extra = None

        # Tier 2: rows of c whose every blocker would itself be evicted by
        # this same placement.  Rows blocked by any outsider are dead;
        # currently-free rows already failed the dodge above.
        alive = ~good & ~(blocked_cell & ~in_set[vals_c + 1]).any(axis=1)
        alive_idx = np.flatnonzero(alive)
        if alive_idx.size == 0:
            if esc_extra is None:
                out += multi
            else:
                out += multi & ~esc_extra
                for pos in np.flatnonzero(multi & esc_extra):
                    escalate.setdefault(int(pos), []).append(c_id)
            continue
        gather = np.where(blocked_cell[alive_idx], vals_c[alive_idx] + 1, 0)
        alive_masks = np.empty((alive_idx.size, lanes), dtype=np.uint64)
        for lane in range(lanes):
            alive_masks[:, lane] = np.bitwise_or.reduce(lane_bits[lane][gather], axis=1)
        alive_starts = ci.row_start[alive_idx]
        alive_ords = ci.row_ordinal[alive_idx]
        alive_dep = dep_ok[alive_idx] if links else None
        own_bit = np.zeros(lanes, dtype=np.uint64)
        own_bit[bit_of[c_id] >> 6] = 1 << (bit_of[c_id] & 63)
        multi_idx = np.flatnonzero(multi)
        need = evict_bits[multi_idx] & ~own_bit[None, :]
        fits = ((alive_masks[None, :, :] & ~need[:, None, :]) == 0).all(axis=2)
        r_starts = starts[multi_idx]
        dodge = (
            sel_disjoint[alive_ords[:, None], ordinals[multi_idx][None, :]]
            | (alive_starts[:, None] >= r_starts[None, :] + dur_a)
            | ((alive_starts + dur_c)[:, None] <= r_starts[None, :])
        )
        usable = fits & dodge.T
        if alive_dep is None:
            out[multi_idx] += ~usable.any(axis=1)
        else:
            certain_true = (usable & alive_dep[None, :]).any(axis=1)
            ambiguous = ~certain_true & (usable.any(axis=1) | esc_extra[multi_idx])
            out[multi_idx] += ~certain_true & ~ambiguous
            for pos in multi_idx[ambiguous]:
                escalate.setdefault(int(pos), []).append(c_id)

    for pos, targets in escalate.items():
        loc = ai.locations[rows[pos]]
        removed = {c for c, pres in presence.items() if pres[pos]}
        board = _hypothetical_occ(state, activity_id, loc, removed)
        for c_id in targets:
            if not _free_on_board(state, board, activity_id, loc, removed, c_id):
                out[pos] += 1

    charged = ~survivors
    if charged.any():
        out[charged] = n_conf[charged]
    return out


def select_location(state: SolverState, activity_id: str) -> LocationChoice:
    """Pick a location for the activity: tabu filter, aspiration, then a
    uniform draw from the near-best group."""
    t0 = time.perf_counter()
    try:
        ai = state.index.activities[activity_id]
        batch = _evaluate_candidates(state, activity_id)
        m = batch.rows.size
        status = np.zeros(m, dtype=np.int8)
        listed = state.tabu.counts_for(activity_id)
        if listed:
            row_pos = {int(r): i for i, r in enumerate(batch.rows)}
            for loc, count in listed.items():
                row = ai.row_for(loc)
                if row is None:
                    continue
                pos = row_pos.get(row)
                if pos is not None:
                    status[pos] = min(count, 2)
        keep = status < 2
        if not keep.any():
            raise NoLocationError(f"every location of {activity_id!r} is tabu")
        min_score = batch.scores[keep].min()
        keep &= ~((status == 1) & (batch.scores > min_score))

        if state.weights.location_rule is LocationRule.BEST_N:
            kept_pos = np.flatnonzero(keep)
            order = kept_pos[np.lexsort((kept_pos, batch.scores[kept_pos]))]
            group = order[: state.weights.location_best_count].tolist()
            group.sort()
        else:
            threshold = state.weights.location_group_factor * min_score
            group = np.flatnonzero(keep & (batch.scores <= threshold)).tolist()
        pos = group[0] if len(group) == 1 else state.rng.choice(group)
        row = int(batch.rows[pos])
        return LocationChoice(
            location=ai.locations[row],
            stats=batch.stats_at(pos),
            score=float(batch.scores[pos]),
            n_candidates=m,
            conflicts=batch.conflict_ids(pos),
        )
    finally:
        state._time("select_location", time.perf_counter() - t0)


# -- placement and the iteration kernel -----------------------------------


def place(state: SolverState, activity_id: str, loc: Location) -> set[str]:
    """Put the activity at the location, evicting whatever non-fixed
    activities clash; returns the evicted ids."""
    t0 = time.perf_counter()
    try:
        act = state.problem.activity(activity_id)
        ai = state.index.activities[activity_id]
        row = ai.row_for(loc)
        if row is not None:
            clash = _conflict_sets_for_row(state, ai, row)
        else:
            if not hard_feasible(state.problem, act, loc):
                raise ContractViolation(f"{loc} is not hard-feasible for {activity_id!r}")
            clash = pure_conflicts(state.problem, state.schedule, act, loc)
        clash.discard(activity_id)
        blocked = sorted(c for c in clash if state.schedule.is_fixed(c))
        if blocked:
            raise ContractViolation(
                f"placing {activity_id!r} at {loc} would clash with fixed {blocked}"
            )
        if activity_id in state.schedule.assignment:
            state.unassign(activity_id)
        for c_id in state.problem.sort_activities(clash):
            state.unassign(c_id, evictor=activity_id, count=True)
        state.assign(activity_id, loc)
        state.tabu.push(activity_id, loc)
        return set(clash)
    finally:
        state._time("place", time.perf_counter() - t0)


def iterate(state: SolverState) -> IterationReport:
    """One select-activity, select-location, place step."""
    if not state.unscheduled:
        raise ContractViolation("nothing to schedule")
    a_choice = select_activity(state)
    state.iteration += 1
    try:
        l_choice = select_location(state, a_choice.activity)
    except NoLocationError:
        report = IterationReport(
            iteration=state.iteration,
            activity=a_choice.activity,
            n_activity_candidates=a_choice.n_candidates,
            n_location_candidates=0,
            skipped=True,
            location=None,
            stats=None,
            score=None,
            evicted=(),
            unscheduled_after=len(state.unscheduled),
        )
        state.maybe_update_best()
        return report
    evicted = place(state, a_choice.activity, l_choice.location)
    state.maybe_update_best()
    return IterationReport(
        iteration=state.iteration,
        activity=a_choice.activity,
        n_activity_candidates=a_choice.n_candidates,
        n_location_candidates=l_choice.n_candidates,
        skipped=False,
        location=l_choice.location,
        stats=l_choice.stats,
        score=l_choice.score,
        evicted=tuple(state.problem.sort_activities(evicted)),
        unscheduled_after=len(state.unscheduled),
    )


def _normalize_stop(stop) -> callable:
    if stop is None:
        return lambda: False
    if hasattr(stop, "is_set"):
        return stop.is_set
    return stop


def solve(state: SolverState, stop=None) -> SolverState:
    """Iterate until complete, out of budget, or told to stop."""
    should_stop = _normalize_stop(stop)
    while (
        state.unscheduled
        and state.iteration < state.weights.max_iterations
        and not should_stop()
    ):
        iterate(state)
    return state
