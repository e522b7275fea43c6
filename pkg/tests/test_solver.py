"""Search kernel: scoring, selection, tabu, placement, and the solve loop."""

from __future__ import annotations

import dataclasses
import json
import random

import pytest

from slotplan.feasibility import check_schedule, enumerate_locations
from slotplan.generator import GenParams, generate
from slotplan.model import (
    Activity,
    DepKind,
    Dependency,
    Location,
    ModelError,
    Problem,
    Resource,
    Schedule,
    TimeGrid,
    TimePreference,
    conjunctive,
    disjunctive,
)
from slotplan.solver import (
    ContractViolation,
    HeuristicWeights,
    LocationRule,
    NoLocationError,
    SolverState,
    Strategy,
    TabuList,
    TabuStatus,
    activity_score,
    iterate,
    location_score,
    place,
    select_activity,
    select_location,
    solve,
    tabu_status,
    _evaluate_candidates,
)

from conftest import random_sound_schedule, random_tiny_problem, tiny_problem


UNIT_ACTIVITY_WEIGHTS = HeuristicWeights(w_removed=1, w_deps=1, w_places=1, w_places_free=1)
UNIT_LOCATION_WEIGHTS = HeuristicWeights(
    w_conflicts=1, w_repeat_evict=1, w_conflict_no_resched=1, w_soft=1, w_dist_prev=1, w_user_pref=1
)
ZERO_WEIGHTS = HeuristicWeights(
    w_removed=0, w_deps=0, w_places=0, w_places_free=0,
    w_conflicts=0, w_repeat_evict=0, w_conflict_no_resched=0, w_soft=0,
    w_dist_prev=0, w_user_pref=0,
)


def lane_problem(n_slots: int, *, duration: int = 1, location_prefs=None, soft=()) -> Problem:
    """One activity A on one teacher over a single row of slots."""
    return Problem(
        grid=TimeGrid(days=1, slots_per_day=n_slots),
        resources=(Resource("t1", kind="teacher"),),
        activities=(
            Activity(
                "A",
                duration=duration,
                groups=(conjunctive("t1"),),
                prefs=TimePreference.from_sets(n_slots, soft=soft) if soft else None,
                location_prefs=location_prefs,
            ),
        ),
    )


class TestHeuristicWeights:
    def test_defaults_are_valid(self):
        HeuristicWeights()

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"w_conflicts": -1},
            {"w_soft": float("nan")},
            {"sample_probability": 0.0},
            {"sample_probability": 1.5},
            {"location_group_factor": 0.5},
            {"tabu_length": -1},
            {"max_iterations": -1},
            {"location_best_count": 0},
        ],
    )
    def test_bad_values_rejected(self, kwargs):
        with pytest.raises(ModelError):
            HeuristicWeights(**kwargs)


class TestTabuList:
    def test_fifo_eviction_at_capacity(self):
        tabu = TabuList(2)
        l1, l2, l3 = (Location(i, frozenset({"t1"})) for i in range(3))
        tabu.push("A", l1)
        tabu.push("A", l2)
        tabu.push("A", l3)
        assert tabu.count("A", l1) == 0
        assert tabu.count("A", l2) == 1
        assert tabu.count("A", l3) == 1

    def test_status_classification(self):
        tabu = TabuList(10)
        loc = Location(0, frozenset({"t1"}))
        assert tabu_status(tabu, "A", loc) is TabuStatus.FREE
        tabu.push("A", loc)
        assert tabu_status(tabu, "A", loc) is TabuStatus.ONCE
        tabu.push("A", loc)
        assert tabu_status(tabu, "A", loc) is TabuStatus.TWICE

    def test_third_push_is_rejected(self):
        tabu = TabuList(10)
        loc = Location(0, frozenset({"t1"}))
        tabu.push("A", loc)
        tabu.push("A", loc)
        with pytest.raises(AssertionError):
            tabu.push("A", loc)

    def test_zero_capacity_records_nothing(self):
        tabu = TabuList(0)
        loc = Location(0, frozenset({"t1"}))
        tabu.push("A", loc)
        assert len(tabu) == 0
        assert tabu.count("A", loc) == 0

    def test_resize_keeps_most_recent(self):
        tabu = TabuList(4)
        locs = [Location(i, frozenset({"t1"})) for i in range(4)]
        for loc in locs:
            tabu.push("A", loc)
        tabu.resize(2)
        assert tabu.entries() == (("A", locs[2]), ("A", locs[3]))


class TestActivityScore:
    def test_fresh_activity_on_tiny_instance(self):
        state = SolverState(tiny_problem(), weights=UNIT_ACTIVITY_WEIGHTS)
        score, stats = activity_score(state, "A")
        assert (stats.n_removed, stats.n_deps, stats.n_places, stats.n_places_no_conflict) == (0, 1, 10, 10)
        assert score == 19

    def test_all_zero_weights_give_zero(self):
        state = SolverState(tiny_problem(), weights=ZERO_WEIGHTS)
        for a_id in ("A", "B"):
            score, _ = activity_score(state, a_id)
            assert score == 0

    def test_no_places_leaves_only_negative_terms(self):
        n = 4
        problem = Problem(
            grid=TimeGrid(days=1, slots_per_day=n),
            resources=(Resource("t1"),),
            activities=(
                Activity(
                    "A",
                    duration=1,
                    groups=(conjunctive("t1"),),
                    prefs=TimePreference.from_sets(n, hard=range(n)),
                ),
            ),
        )
        state = SolverState(problem, weights=UNIT_ACTIVITY_WEIGHTS)
        state.history["A"].n_removed = 7
        score, stats = activity_score(state, "A")
        assert stats.n_places == 0 and stats.n_places_no_conflict == 0
        assert score == -7

    def test_scheduled_activity_is_rejected(self):
        state = SolverState(tiny_problem())
        state.assign("B", Location(0, frozenset({"t1", "c1", "r1"})))
        with pytest.raises(ContractViolation):
            activity_score(state, "B")

    def test_counts_react_to_board_changes(self):
        state = SolverState(tiny_problem())
        _, before = activity_score(state, "A")
        assert before.n_places_no_conflict == 10
        state.assign("B", Location(0, frozenset({"t1", "c1", "r1"})))
        _, after = activity_score(state, "A")
        assert after.n_places == 10  # B is movable, so no location is off the menu
        assert after.n_places_no_conflict < 10


class TestSelectActivity:
    def test_full_scan_returns_global_minimum(self):
        state = SolverState(tiny_problem(), weights=HeuristicWeights(strategy=Strategy.FULL))
        scores = {a: activity_score(state, a)[0] for a in ("A", "B")}
        choice = select_activity(state)
        assert choice.activity == min(scores, key=scores.get)
        assert choice.n_candidates == 2

    def test_worse_history_pulls_selection(self):
        state = SolverState(
            tiny_problem(),
            weights=HeuristicWeights(strategy=Strategy.FULL, w_removed=100),
        )
        state.history["B"].n_removed = 3
        assert select_activity(state).activity == "B"

    def test_random_mode_singleton(self):
        state = SolverState(tiny_problem(), weights=HeuristicWeights(strategy=Strategy.RANDOM))
        state.assign("B", Location(0, frozenset({"t1", "c1", "r1"})))
        choice = select_activity(state)
        assert choice.activity == "A"

    def test_sampled_replay_is_identical(self):
        rng = random.Random(5)
        for _ in range(20):
            problem = random_tiny_problem(rng)
            seed = rng.randrange(10_000)
            picks = []
            for _ in range(2):
                state = SolverState(problem, weights=HeuristicWeights(strategy=Strategy.SAMPLED), seed=seed)
                if not state.unscheduled:
                    break
                picks.append(select_activity(state).activity)
            assert len(set(picks)) <= 1

    def test_empty_unscheduled_is_rejected(self):
        problem = lane_problem(3)
        state = SolverState(problem)
        place(state, "A", Location(0, frozenset({"t1"})))
        with pytest.raises(ContractViolation):
            select_activity(state)


class TestLocationScore:
    def test_untouched_candidate_scores_zero(self):
        state = SolverState(tiny_problem(), weights=UNIT_LOCATION_WEIGHTS)
        score, stats = location_score(state, "A", Location(0, frozenset({"t1", "c1", "r1"})))
        assert score == 0
        assert stats == type(stats)(0, 0, 0, 0, 0, 0)

    def test_single_conflict_with_history_and_marks(self):
        problem = tiny_problem(teacher_soft=(4,))
        state = SolverState(problem, weights=UNIT_LOCATION_WEIGHTS)
        sel = frozenset({"t1", "c1", "r1"})
        state.assign("B", Location(3, sel))
        state.history["B"].last_evictor = "A"
        state.history["A"].last_location = Location(1, sel)
        score, stats = location_score(state, "A", Location(3, sel))
        assert stats.n_conflicts == 1
        assert stats.n_repeat_evict == 1
        assert stats.n_conflict_no_resched == 0  # B still fits before slot 3
        assert stats.n_soft == 1
        assert stats.dist_prev == 2
        assert stats.user_pref == 0
        assert score == 5

    def test_zero_weights_zero_score(self):
        problem = tiny_problem(teacher_soft=(4,))
        state = SolverState(problem, weights=ZERO_WEIGHTS)
        state.assign("B", Location(3, frozenset({"t1", "c1", "r1"})))
        score, _ = location_score(state, "A", Location(3, frozenset({"t1", "c1", "r1"})))
        assert score == 0

    def test_stranded_conflict_is_counted(self):
        # Placing A at 0 violates before(B, A) and leaves B nowhere to go.
        state = SolverState(tiny_problem(), weights=UNIT_LOCATION_WEIGHTS)
        sel = frozenset({"t1", "c1", "r1"})
        state.assign("B", Location(0, sel))
        _, stats = location_score(state, "A", Location(0, sel))
        assert stats.n_conflicts == 1
        assert stats.n_conflict_no_resched == 1

    def test_non_candidate_is_rejected(self):
        state = SolverState(tiny_problem(teacher_hard=(5,)))
        with pytest.raises(ContractViolation):
            location_score(state, "A", Location(4, frozenset({"t1", "c1", "r1"})))


class TestSelectLocation:
    def test_single_candidate_is_returned(self):
        n = 4
        problem = Problem(
            grid=TimeGrid(days=1, slots_per_day=n),
            resources=(Resource("t1"),),
            activities=(
                Activity(
                    "A",
                    duration=1,
                    groups=(conjunctive("t1"),),
                    prefs=TimePreference.from_sets(n, hard=(1, 2, 3)),
                ),
            ),
        )
        state = SolverState(problem)
        choice = select_location(state, "A")
        assert choice.location == Location(0, frozenset({"t1"}))
        assert choice.n_candidates == 1

    def test_zero_score_group_excludes_worse_candidates(self):
        problem = lane_problem(3, location_prefs={0: 0.0, 1: 0.0, 2: 5.0})
        hits = set()
        for seed in range(40):
            state = SolverState(problem, seed=seed)
            hits.add(select_location(state, "A").location.start)
        assert hits == {0, 1}

    def test_group_threshold_spans_near_best(self):
        problem = lane_problem(3, location_prefs={0: 1.0, 1: 2.0, 2: 2.5})
        hits = set()
        for seed in range(60):
            state = SolverState(problem, seed=seed)
            hits.add(select_location(state, "A").location.start)
        assert hits == {0, 1}  # 2.5 > 2 x 1.0 stays out

    def test_twice_tabu_candidate_is_dropped(self):
        problem = lane_problem(3, location_prefs={0: 1.0, 1: 2.0, 2: 10.0})
        best = Location(0, frozenset({"t1"}))
        for seed in range(30):
            state = SolverState(problem, seed=seed)
            state.tabu.push("A", best)
            state.tabu.push("A", best)
            assert select_location(state, "A").location.start == 1

    def test_once_tabu_best_survives_aspiration(self):
        problem = lane_problem(3, location_prefs={0: 1.0, 1: 3.0, 2: 3.0})
        state = SolverState(problem)
        state.tabu.push("A", Location(0, frozenset({"t1"})))
        assert select_location(state, "A").location.start == 0

    def test_once_tabu_non_best_is_dropped(self):
        problem = lane_problem(3, location_prefs={0: 1.0, 1: 1.5, 2: 10.0})
        listed = Location(1, frozenset({"t1"}))
        for seed in range(30):
            state = SolverState(problem, seed=seed)
            state.tabu.push("A", listed)
            assert select_location(state, "A").location.start == 0

    def test_all_candidates_tabu_raises(self):
        problem = lane_problem(2, location_prefs={0: 1.0, 1: 1.0})
        state = SolverState(problem)
        for start in (0, 1):
            state.tabu.push("A", Location(start, frozenset({"t1"})))
            state.tabu.push("A", Location(start, frozenset({"t1"})))
        with pytest.raises(NoLocationError):
            select_location(state, "A")

    def test_best_n_rule_limits_group(self):
        problem = lane_problem(6)
        weights = HeuristicWeights(
            location_rule=LocationRule.BEST_N, location_best_count=2, w_user_pref=1
        )
        prefs = {0: 0.0, 1: 1.0, 2: 2.0, 3: 3.0, 4: 4.0, 5: 5.0}
        problem = lane_problem(6, location_prefs=prefs)
        hits = set()
        for seed in range(40):
            state = SolverState(problem, weights=weights, seed=seed)
            hits.add(select_location(state, "A").location.start)
        assert hits == {0, 1}

    def test_fixed_blocked_everywhere_raises(self):
        problem = tiny_problem()
        schedule = Schedule(
            assignment={"B": Location(0, frozenset({"t1", "c1", "r1"}))}, fixed={"B"}
        )
        # B fixed at 0 only blocks starts overlapping slot 0 for t1/c1.
        state = SolverState(problem, schedule=schedule)
        choice = select_location(state, "A")
        assert choice.location.start != 0


class TestBatchAgainstExact:
    """The batched candidate evaluation must equal location_score everywhere."""

    @pytest.mark.parametrize("seed", range(6))
    def test_scores_and_stats_agree(self, seed):
        rng = random.Random(700 + seed)
        checked = 0
        while checked < 40:
            problem = random_tiny_problem(rng)
            schedule = random_sound_schedule(problem, rng, fix_probability=0.2)
            state = SolverState(problem, weights=UNIT_LOCATION_WEIGHTS, schedule=schedule)
            for a_id in state.ordered_unscheduled():
                for c_id in list(state.schedule.assignment):
                    if rng.random() < 0.3:
                        state.history[c_id].last_evictor = a_id
                try:
                    batch = _evaluate_candidates(state, a_id)
                except NoLocationError:
                    continue
                ai = state.index.activities[a_id]
                for pos, row in enumerate(batch.rows):
                    loc = ai.locations[int(row)]
                    score, stats = location_score(state, a_id, loc)
                    assert batch.stats_at(pos) == stats, (a_id, loc)
                    assert float(batch.scores[pos]) == score
                    checked += 1


class TestBatchOnGeneratedBoards:
    """Same agreement on dense generated boards, where candidates pick up
    multi-eviction conflicts, dependency partners, and soft marks."""

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_scores_and_stats_agree(self, seed):
        problem, witness = generate(
            GenParams(
                n_teachers=8,
                n_classes=8,
                n_rooms=8,
                days=3,
                slots_per_day=6,
                fill_percent=60.0,
                durations=(1, 3),
                dependency_density=0.15,
                soft_density=0.1,
                seed=900 + seed,
            )
        )
        rng = random.Random(900 + seed)
        ids = sorted(witness.assignment)
        detached = rng.sample(ids, len(ids) // 3)
        assignment = {a: loc for a, loc in witness.assignment.items() if a not in detached}
        fixed = {a for a in sorted(assignment) if rng.random() < 0.25}
        board = Schedule(assignment=assignment, fixed=fixed)
        state = SolverState(problem, weights=UNIT_LOCATION_WEIGHTS, schedule=board)
        checked = 0
        for a_id in detached:
            for c_id in sorted(assignment):
                if rng.random() < 0.05:
                    state.history[c_id].last_evictor = a_id
            try:
                batch = _evaluate_candidates(state, a_id)
            except NoLocationError:
                continue
            ai = state.index.activities[a_id]
            for pos, row in enumerate(batch.rows):
                loc = ai.locations[int(row)]
                score, stats = location_score(state, a_id, loc)
                assert batch.stats_at(pos) == stats, (a_id, loc)
                assert float(batch.scores[pos]) == score
                checked += 1
        assert checked > 100


class TestReschedScanLimit:
    """Past the candidate cap, only minimal-conflict rows keep the exact
    no-reschedule count; the rest are charged one per conflict."""

    def rooms(self):
        return tuple(Resource(f"r{i}", kind="room") for i in range(1, 5))

    def test_non_survivors_charged_per_conflict(self):
        # 28 candidate rows for A against a cap of 5.  B sits on t1 for
        # slots 2-3 but has the whole rest of the day to dodge into, so the
        # exact count would be zero everywhere.
        problem = Problem(
            grid=TimeGrid(days=1, slots_per_day=8),
            resources=(Resource("t1", kind="teacher"),) + self.rooms(),
            activities=(
                Activity("A", duration=2, groups=(conjunctive("t1"), disjunctive("r1", "r2", "r3", "r4"))),
                Activity("B", duration=2, groups=(conjunctive("t1"),)),
            ),
        )
        board = Schedule(assignment={"B": Location(2, frozenset({"t1"}))})
        weights = dataclasses.replace(UNIT_LOCATION_WEIGHTS, resched_scan_limit=5)
        state = SolverState(problem, weights=weights, schedule=board)
        batch = _evaluate_candidates(state, "A")
        assert batch.rows.size == 28
        ai = state.index.activities["A"]
        conflicted = 0
        for pos in range(batch.rows.size):
            if batch.n_conf[pos] == 0:
                assert batch.no_resched[pos] == 0
            else:
                # pessimistic: charged despite B being movable
                assert batch.no_resched[pos] == batch.n_conf[pos] == 1
                loc = ai.locations[int(batch.rows[pos])]
                _, exact = location_score(state, "A", loc)
                assert exact.n_conflict_no_resched == 0
                conflicted += 1
        assert conflicted == 12

    def test_minimal_conflict_rows_stay_exact(self):
        # every row of A hits B, so every row survives the pre-filter and
        # keeps the exact count even though the cap is exceeded
        problem = Problem(
            grid=TimeGrid(days=1, slots_per_day=8),
            resources=(
                Resource("t1", kind="teacher"),
                Resource("t2", kind="teacher"),
            ) + self.rooms(),
            activities=(
                Activity("A", duration=2, groups=(conjunctive("t1"), disjunctive("r1", "r2", "r3", "r4"))),
                Activity("B", duration=8, groups=(disjunctive("t1", "t2"),)),
            ),
        )
        board = Schedule(assignment={"B": Location(0, frozenset({"t1"}))})
        weights = dataclasses.replace(UNIT_LOCATION_WEIGHTS, resched_scan_limit=5)
        state = SolverState(problem, weights=weights, schedule=board)
        batch = _evaluate_candidates(state, "A")
        assert batch.rows.size == 28
        assert (batch.n_conf == 1).all()
        # B can always slide to t2, and the survivors prove it
        assert (batch.no_resched == 0).all()
        ai = state.index.activities["A"]
        for pos in range(batch.rows.size):
            loc = ai.locations[int(batch.rows[pos])]
            score, stats = location_score(state, "A", loc)
            assert batch.stats_at(pos) == stats
            assert float(batch.scores[pos]) == score


class TestPlace:
    def test_conflict_free_placement_grows_schedule(self):
        state = SolverState(tiny_problem())
        evicted = place(state, "B", Location(0, frozenset({"t1", "c1", "r1"})))
        assert evicted == set()
        assert state.schedule.assignment["B"].start == 0
        assert "B" not in state.unscheduled
        assert state.tabu.count("B", Location(0, frozenset({"t1", "c1", "r1"}))) == 1

    def test_resource_overlap_evicts_holder(self):
        state = SolverState(tiny_problem())
        sel = frozenset({"t1", "c1", "r1"})
        place(state, "B", Location(3, sel))
        evicted = place(state, "A", Location(3, sel))
        assert evicted == {"B"}
        assert "B" in state.unscheduled
        assert state.history["B"].n_removed == 1
        assert state.history["B"].last_evictor == "A"
        assert state.history["B"].last_location == Location(3, sel)

    def test_dependency_violation_evicts_partner(self):
        state = SolverState(tiny_problem())
        place(state, "B", Location(3, frozenset({"t1", "c1", "r1"})))
        # A at 0 on the other room: no resource overlap, but before(B, A) breaks.
        evicted = place(state, "A", Location(0, frozenset({"t1", "c1", "r2"})))
        assert evicted == {"B"}

    def test_wait_no_overlap_no_eviction(self):
        state = SolverState(tiny_problem())
        place(state, "B", Location(0, frozenset({"t1", "c1", "r1"})))
        evicted = place(state, "A", Location(1, frozenset({"t1", "c1", "r2"})))
        assert evicted == set()
        assert check_schedule(state.problem, state.schedule) == []

    def test_fixed_conflict_is_a_contract_violation(self):
        problem = tiny_problem()
        schedule = Schedule(
            assignment={"B": Location(0, frozenset({"t1", "c1", "r1"}))}, fixed={"B"}
        )
        state = SolverState(problem, schedule=schedule)
        with pytest.raises(ContractViolation):
            place(state, "A", Location(0, frozenset({"t1", "c1", "r1"})))

    def test_soft_total_tracks_assignments(self):
        problem = tiny_problem(teacher_soft=(0, 1))
        state = SolverState(problem)
        sel = frozenset({"t1", "c1", "r1"})
        place(state, "A", Location(0, sel))
        assert state.soft_total == 2
        place(state, "B", Location(0, sel))  # evicts A
        assert state.soft_total == 1


class TestIterate:
    def test_single_activity_gets_scheduled(self):
        problem = lane_problem(3)
        state = SolverState(problem)
        report = iterate(state)
        assert report.iteration == 1
        assert report.activity == "A"
        assert not report.skipped
        assert report.evicted == ()
        assert report.unscheduled_after == 0
        assert check_schedule(state.problem, state.schedule) == []

    def test_all_tabu_candidates_produce_skip_report(self):
        problem = lane_problem(1)
        state = SolverState(problem)
        loc = Location(0, frozenset({"t1"}))
        state.tabu.push("A", loc)
        state.tabu.push("A", loc)
        report = iterate(state)
        assert report.skipped
        assert report.location is None and report.stats is None and report.score is None
        assert state.unscheduled == {"A"}
        assert state.iteration == 1

    def test_contested_slot_alternation_raises_removal_counts(self):
        problem = Problem(
            grid=TimeGrid(days=1, slots_per_day=1),
            resources=(Resource("t1"),),
            activities=(
                Activity("A", duration=1, groups=(conjunctive("t1"),)),
                Activity("B", duration=1, groups=(conjunctive("t1"),)),
            ),
        )
        state = SolverState(problem, weights=HeuristicWeights(tabu_length=0))
        for _ in range(6):
            iterate(state)
        assert state.history["A"].n_removed + state.history["B"].n_removed >= 5
        assert len(state.unscheduled) == 1


class TestSolve:
    def test_complete_schedule_returns_immediately(self):
        problem = lane_problem(3)
        state = SolverState(
            problem, schedule=Schedule(assignment={"A": Location(0, frozenset({"t1"}))})
        )
        solve(state)
        assert state.iteration == 0

    def test_zero_iteration_budget_is_a_no_op(self):
        state = SolverState(tiny_problem(), weights=HeuristicWeights(max_iterations=0))
        solve(state)
        assert state.iteration == 0
        assert state.schedule.assignment == {}

    def test_tiny_instance_completes_quickly_for_almost_all_seeds(self):
        wins = 0
        for seed in range(100):
            state = SolverState(tiny_problem(), weights=HeuristicWeights(max_iterations=50), seed=seed)
            solve(state)
            if not state.unscheduled:
                wins += 1
        assert wins >= 95

    def test_stop_signal_is_observed(self):
        calls = []

        def stop():
            calls.append(None)
            return len(calls) > 3

        state = SolverState(tiny_problem(), seed=1)
        solve(state, stop=stop)
        assert state.iteration <= 3


class TestRunInvariants:
    def test_soundness_and_fixed_hold_through_random_runs(self):
        rng = random.Random(91)
        for _ in range(25):
            problem = random_tiny_problem(rng)
            schedule = random_sound_schedule(problem, rng, fix_probability=0.3)
            state = SolverState(problem, schedule=schedule, seed=rng.randrange(10_000))
            fixed_before = {a: state.schedule.assignment[a] for a in state.schedule.fixed}
            for _ in range(30):
                if not state.unscheduled:
                    break
                report = iterate(state)
                assert check_schedule(state.problem, state.schedule) == []
                assert not set(report.evicted) & state.schedule.fixed
            for a_id, loc in fixed_before.items():
                assert state.schedule.assignment[a_id] == loc

    def test_best_snapshot_is_monotone(self):
        rng = random.Random(92)
        for _ in range(10):
            problem = random_tiny_problem(rng)
            state = SolverState(problem, seed=rng.randrange(10_000))
            last_key = state.best.key()
            for _ in range(40):
                if not state.unscheduled:
                    break
                iterate(state)
                assert state.best.key() >= last_key
                last_key = state.best.key()
                assert check_schedule(problem, state.best.to_schedule()) == []

    def test_activity_weight_scaling_preserves_selection(self):
        rng = random.Random(93)
        base = HeuristicWeights(strategy=Strategy.FULL, w_removed=3, w_deps=1, w_places=0.25, w_places_free=0.5)
        scaled = HeuristicWeights(strategy=Strategy.FULL, w_removed=12, w_deps=4, w_places=1.0, w_places_free=2.0)
        for _ in range(20):
            problem = random_tiny_problem(rng)
            seed = rng.randrange(10_000)
            s1 = SolverState(problem, weights=base, seed=seed)
            s2 = SolverState(problem, weights=scaled, seed=seed)
            if not s1.unscheduled:
                continue
            assert select_activity(s1).activity == select_activity(s2).activity

    def test_location_weight_scaling_preserves_choice(self):
        rng = random.Random(94)
        base = UNIT_LOCATION_WEIGHTS
        scaled = HeuristicWeights(
            w_conflicts=7, w_repeat_evict=7, w_conflict_no_resched=7,
            w_soft=7, w_dist_prev=7, w_user_pref=7,
        )
        for _ in range(20):
            problem = random_tiny_problem(rng)
            schedule = random_sound_schedule(problem, rng)
            seed = rng.randrange(10_000)
            s1 = SolverState(problem, weights=base, seed=seed, schedule=schedule)
            s2 = SolverState(problem, weights=scaled, seed=seed, schedule=schedule)
            for a_id in s1.ordered_unscheduled():
                try:
                    c1 = select_location(s1, a_id)
                except NoLocationError:
                    with pytest.raises(NoLocationError):
                        select_location(s2, a_id)
                    continue
                c2 = select_location(s2, a_id)
                assert c1.location == c2.location

    def test_replay_reports_are_byte_identical(self):
        rng = random.Random(95)
        for _ in range(10):
            problem = random_tiny_problem(rng)
            seed = rng.randrange(10_000)
            streams = []
            for _ in range(2):
                state = SolverState(problem, weights=HeuristicWeights(max_iterations=60), seed=seed)
                reports = []
                solve_state = state
                while solve_state.unscheduled and solve_state.iteration < 60:
                    reports.append(iterate(solve_state).to_doc())
                streams.append(json.dumps(reports, sort_keys=True).encode())
            assert streams[0] == streams[1]

    def test_clone_runs_identically_to_original(self):
        rng = random.Random(96)
        problem = random_tiny_problem(rng)
        state = SolverState(problem, weights=HeuristicWeights(max_iterations=40), seed=7)
        for _ in range(3):
            if state.unscheduled:
                iterate(state)
        twin = state.clone()
        out_a, out_b = [], []
        for s, out in ((state, out_a), (twin, out_b)):
            while s.unscheduled and s.iteration < 40:
                out.append(iterate(s).to_doc())
        assert out_a == out_b

    def test_tabu_window_bound_over_runs(self):
        rng = random.Random(97)
        for _ in range(10):
            problem = random_tiny_problem(rng)
            weights = HeuristicWeights(tabu_length=4, max_iterations=80)
            state = SolverState(problem, weights=weights, seed=rng.randrange(10_000))
            placements = []
            while state.unscheduled and state.iteration < 80:
                report = iterate(state)
                if not report.skipped:
                    placements.append((report.activity, report.location))
            window = weights.tabu_length
            for i in range(len(placements)):
                recent = placements[max(0, i - window + 1) : i + 1]
                assert recent.count(placements[i]) <= 2
