"""Vectorized candidate geometry and occupancy indexes behind the solver.

The pure functions in `feasibility` define the semantics; this module
precomputes, per activity and per resource selection, the static grid of
hard-feasible start slots together with the flat resource-slot cells each
candidate covers, so the solver can evaluate whole candidate sets with a few
array operations.  Tests enforce equivalence with the pure route.

Cells are flattened as ``resource_index * total_slots + slot``.  Occupancy
arrays hold the activity's ordinal, or -1 for free.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .feasibility import resource_selections
from .model import (
    Activity,
    DepKind,
    Location,
    Problem,
    Schedule,
    hard_slots_of,
    soft_slots_of,
)


@dataclass(frozen=True)
class DepLink:
    """One dependency as seen from a particular activity."""

    kind: DepKind
    partner: str
    is_first: bool  # True when the viewing activity is the dependency's `first`


def dep_violation_mask(
    starts: np.ndarray,
    duration: int,
    link: DepLink,
    partner_start: int,
    partner_end: int,
) -> np.ndarray:
    """Boolean mask over candidate starts that would violate the dependency."""
    if link.kind is DepKind.BEFORE:
        if link.is_first:
            return starts + duration > partner_start
        return partner_end > starts
    if link.kind is DepKind.MEETS:
        if link.is_first:
            return starts + duration != partner_start
        return starts != partner_end
    return starts != partner_start


class SelectionBlock:
    """Static candidates of one activity for one resource selection."""

    __slots__ = ("ordinal", "selection", "member_idx", "starts", "cells", "soft", "user", "global_rows")

    def __init__(
        self,
        ordinal: int,
        selection: frozenset[str],
        member_idx: np.ndarray,
        starts: np.ndarray,
        cells: np.ndarray,
        soft: np.ndarray,
        user: np.ndarray,
    ) -> None:
        self.ordinal = ordinal
        self.selection = selection
        self.member_idx = member_idx
        self.starts = starts  # int32 [n], ascending
        self.cells = cells  # int32 [n, duration * len(members)]
        self.soft = soft  # int64 [n]
        self.user = user  # float64 [n]
        self.global_rows = np.empty(0, dtype=np.int32)  # filled by ActivityIndex


class ActivityIndex:
    """All static hard-feasible candidates of one activity.

    Global row order matches `enumerate_locations`: start ascending, then
    selection ordinal ascending.
    """

    __slots__ = (
        "activity_id",
        "duration",
        "blocks",
        "n_rows",
        "locations",
        "row_start",
        "row_ordinal",
        "row_local",
        "row_of",
        "ordinal_of",
        "deps",
        "soft_by_row",
        "user_by_row",
        "all_cells",
    )

    def __init__(self, problem: Problem, activity: Activity, res_order: dict[str, int],
                 res_hard: np.ndarray, res_soft: np.ndarray) -> None:
        S = problem.grid.total_slots
        dur = activity.duration
        self.activity_id = activity.id
        self.duration = dur
        act_hard = np.zeros(S, dtype=bool)
        act_soft = np.zeros(S, dtype=np.int64)
        for t in hard_slots_of(activity.prefs):
            act_hard[t] = True
        for t in soft_slots_of(activity.prefs):
            act_soft[t] = 1

        selections = resource_selections(activity)
        self.ordinal_of = {sel: o for o, sel in enumerate(selections)}
        self.blocks = []
        triples: list[tuple[int, int, int]] = []  # (start, ordinal, local_idx)
        for ordinal, sel in enumerate(selections):
            member_idx = np.array(sorted(res_order[r] for r in sel), dtype=np.int32)
            forbidden = act_hard | res_hard[member_idx].any(axis=0)
            cs = np.concatenate(([0], np.cumsum(forbidden)))
            ok = cs[dur:] - cs[:-dur] == 0  # length S - dur + 1
            starts = np.flatnonzero(ok).astype(np.int32)
            soft_row = act_soft + res_soft[member_idx].sum(axis=0)
            ss = np.concatenate(([0], np.cumsum(soft_row)))
            soft = (ss[dur:] - ss[:-dur])[starts]
            cells = (
                starts[:, None, None]
                + np.arange(dur, dtype=np.int32)[None, :, None]
                + (member_idx * S)[None, None, :]
            ).reshape(len(starts), dur * len(member_idx))
            if activity.location_prefs:
                user = np.array(
                    [activity.location_penalty(Location(int(s), sel)) for s in starts],
                    dtype=np.float64,
                )
            else:
                user = np.zeros(len(starts), dtype=np.float64)
            self.blocks.append(
                SelectionBlock(ordinal, sel, member_idx, starts, cells, soft, user)
            )
            triples.extend((int(s), ordinal, i) for i, s in enumerate(starts))

        triples.sort()
        self.n_rows = len(triples)
        self.row_start = np.array([t[0] for t in triples], dtype=np.int32)
        self.row_ordinal = np.array([t[1] for t in triples], dtype=np.int32)
        self.row_local = np.array([t[2] for t in triples], dtype=np.int32)
        self.locations = [Location(s, selections[o]) for s, o, _ in triples]
        self.row_of = {(s, o): r for r, (s, o, _) in enumerate(triples)}
        for block in self.blocks:
            rows = [self.row_of[(int(s), block.ordinal)] for s in block.starts]
            block.global_rows = np.array(rows, dtype=np.int32)
        self.soft_by_row = np.zeros(self.n_rows, dtype=np.int64)
        self.user_by_row = np.zeros(self.n_rows, dtype=np.float64)
        # Every selection has the same width (conjunctive members plus one
        # pick per disjunctive group), so rows stack into one cell matrix.
        width = self.blocks[0].cells.shape[1] if self.blocks else 0
        self.all_cells = np.empty((self.n_rows, width), dtype=np.int32)
        for block in self.blocks:
            self.soft_by_row[block.global_rows] = block.soft
            self.user_by_row[block.global_rows] = block.user
            if len(block.starts):
                self.all_cells[block.global_rows] = block.cells

        self.deps = tuple(
            DepLink(d.kind, d.second if d.first == activity.id else d.first, d.first == activity.id)
            for d in problem.dependencies_of.get(activity.id, ())
        )

    def row_for(self, loc: Location) -> int | None:
        ordinal = self.ordinal_of.get(loc.selection)
        if ordinal is None:
            return None
        return self.row_of.get((loc.start, ordinal))

    def cells_for_row(self, row: int) -> np.ndarray:
        block = self.blocks[self.row_ordinal[row]]
        return block.cells[self.row_local[row]]


class CandidateIndex:
    """Per-problem static index: one ActivityIndex per activity."""

    def __init__(self, problem: Problem) -> None:
        self.problem = problem
        self.S = problem.grid.total_slots
        self.R = len(problem.resources)
        self.res_order = problem.resource_order
        self.act_order = problem.activity_order
        self.act_ids = [a.id for a in problem.activities]
        res_hard = np.zeros((self.R, self.S), dtype=bool)
        res_soft = np.zeros((self.R, self.S), dtype=np.int64)
        for i, r in enumerate(problem.resources):
            for t in hard_slots_of(r.prefs):
                res_hard[i, t] = True
            for t in soft_slots_of(r.prefs):
                res_soft[i, t] = 1
        self.activities = {
            a.id: ActivityIndex(problem, a, self.res_order, res_hard, res_soft)
            for a in problem.activities
        }

    def cells_for(self, activity: Activity, loc: Location) -> np.ndarray | None:
        """Flat cells for any in-grid location, even one not on the static list.

        Returns None when the location leaves the grid (it then occupies no
        cells as far as the solver's occupancy is concerned; the auditor still
        reports it).
        """
        if loc.start < 0 or loc.start + activity.duration > self.S:
            return None
        member_idx = np.array(sorted(self.res_order[r] for r in loc.selection), dtype=np.int32)
        slots = loc.start + np.arange(activity.duration, dtype=np.int32)
        return (member_idx[:, None] * self.S + slots[None, :]).ravel()


class Occupancy:
    """Dynamic resource-slot ownership mirrors of a schedule."""

    def __init__(self, index: CandidateIndex) -> None:
        self.index = index
        size = index.R * index.S
        self.occ = np.full(size, -1, dtype=np.int32)
        self.fixed_occ = np.full(size, -1, dtype=np.int32)

    def rebuild(self, problem: Problem, schedule: Schedule) -> None:
        self.occ.fill(-1)
        self.fixed_occ.fill(-1)
        for a_id, loc in schedule.assignment.items():
            if a_id not in problem.activity_by_id:
                continue
            self.place(problem.activity(a_id), loc, fixed=a_id in schedule.fixed)

    def place(self, activity: Activity, loc: Location, fixed: bool) -> None:
        cells = self.index.cells_for(activity, loc)
        if cells is None:
            return
        ordinal = self.index.act_order[activity.id]
        self.occ[cells] = ordinal
        if fixed:
            self.fixed_occ[cells] = ordinal

    def remove(self, activity: Activity, loc: Location) -> None:
        cells = self.index.cells_for(activity, loc)
        if cells is None:
            return
        self.occ[cells] = -1
        self.fixed_occ[cells] = -1

    def set_fixed(self, activity: Activity, loc: Location, fixed: bool) -> None:
        cells = self.index.cells_for(activity, loc)
        if cells is None:
            return
        self.fixed_occ[cells] = self.index.act_order[activity.id] if fixed else -1

    def clone(self) -> "Occupancy":
        other = Occupancy.__new__(Occupancy)
        other.index = self.index
        other.occ = self.occ.copy()
        other.fixed_occ = self.fixed_occ.copy()
        return other


@dataclass
class CandidateMasks:
    """Per-candidate boolean masks over an activity's global rows."""

    eligible: np.ndarray  # not blocked by any fixed activity
    res_conflict: np.ndarray  # >= 1 scheduled activity overlaps on a resource
    dep_conflict: np.ndarray  # >= 1 scheduled partner's dependency violated
    dep_partners: list[tuple[str, np.ndarray]]  # (partner id, violation mask)

    @property
    def conflict_free(self) -> np.ndarray:
        return self.eligible & ~self.res_conflict & ~self.dep_conflict


def candidate_masks(
    ai: ActivityIndex,
    occupancy: Occupancy,
    problem: Problem,
    schedule: Schedule,
) -> CandidateMasks:
    """Compute conflict and fixed-exclusion masks for all static candidates.

    The activity's own current assignment never counts as a conflict.
    """
    n = ai.n_rows
    own = occupancy.index.act_order[ai.activity_id]
    if n:
        vals = occupancy.occ[ai.all_cells]
        res_conflict = ((vals >= 0) & (vals != own)).any(axis=1)
        if schedule.fixed:
            fvals = occupancy.fixed_occ[ai.all_cells]
            fixed_block = ((fvals >= 0) & (fvals != own)).any(axis=1)
        else:
            fixed_block = np.zeros(n, dtype=bool)
    else:
        res_conflict = np.zeros(0, dtype=bool)
        fixed_block = np.zeros(0, dtype=bool)
    dep_conflict = np.zeros(n, dtype=bool)
    partners: list[tuple[str, np.ndarray]] = []
    for link in ai.deps:
        p_loc = schedule.assignment.get(link.partner)
        if p_loc is None:
            continue
        p_act = problem.activity(link.partner)
        mask = dep_violation_mask(
            ai.row_start, ai.duration, link, p_loc.start, p_loc.start + p_act.duration
        )
        if not mask.any():
            continue
        partners.append((link.partner, mask))
        dep_conflict |= mask
        if link.partner in schedule.fixed:
            fixed_block |= mask
    return CandidateMasks(
        eligible=~fixed_block,
        res_conflict=res_conflict,
        dep_conflict=dep_conflict,
        dep_partners=partners,
    )


def gather_occupants(ai: ActivityIndex, occupancy: Occupancy, row: int) -> set[int]:
    """Distinct other-activity ordinals occupying the cells of one candidate row."""
    vals = occupancy.occ[ai.cells_for_row(row)]
    found = set(vals[vals >= 0].tolist())
    found.discard(occupancy.index.act_order[ai.activity_id])
    return found


def has_free_location(
    ai: ActivityIndex,
    occ: np.ndarray,
    problem: Problem,
    assignment: dict[str, Location],
) -> bool:
    """Any conflict-free hard-feasible candidate under the given occupancy?"""
    if ai.n_rows == 0:
        return False
    free = ~(occ[ai.all_cells] >= 0).any(axis=1)
    if not free.any():
        return False
    for link in ai.deps:
        p_loc = assignment.get(link.partner)
        if p_loc is None:
            continue
        p_act = problem.activity(link.partner)
        free &= ~dep_violation_mask(
            ai.row_start, ai.duration, link, p_loc.start, p_loc.start + p_act.duration
        )
        if not free.any():
            return False
    return True
