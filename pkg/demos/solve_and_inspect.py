"""
Solving a generated timetable and reading the trace
===================================================

Generate a small feasible instance, watch the forward search place
activities one iteration at a time, and audit the result.
"""

import random
from dataclasses import replace

from slotplan import (
    GenParams,
    HeuristicWeights,
    SolverState,
    check_schedule,
    generate,
    iterate,
    solve,
)

# A compact instance: 6 teachers, 6 classes, 6 rooms on a 3-day, 6-slot grid.
# generate() also returns the witness schedule the instance was built around,
# which certifies that a complete sound timetable exists.
params = GenParams(n_teachers=6, n_classes=6, n_rooms=6, days=3, slots_per_day=6,
                   fill_percent=60.0, seed=11)
problem, witness = generate(params)
print(f"{len(problem.activities)} activities over {problem.grid.total_slots} slots")

# The solver state carries the partial schedule plus everything the
# heuristics look at: history, tabu list, occupancy, the running best.
state = SolverState(problem, weights=HeuristicWeights(), seed=11)

# Step the first ten iterations by hand.  Each report names the chosen
# activity, the location it went to, and who got evicted to make room.
for _ in range(10):
    report = iterate(state)
    where = f"slot {report.location.start}" if report.location else "skipped"
    evicted = f", evicted {report.evicted}" if report.evicted else ""
    print(f"  iter {report.iteration}: {report.activity} -> {where}{evicted}")

# Let the loop finish and audit: an empty violation list is the invariant
# the engine maintains after every single iteration, not just at the end.
solve(state)
violations = check_schedule(problem, state.schedule)
print(f"done after {state.iteration} iterations, "
      f"{state.best.scheduled_count}/{len(problem.activities)} scheduled, "
      f"violations: {violations}")

# The same seed always replays the same search, byte for byte.
replay = SolverState(problem, weights=HeuristicWeights(), seed=11)
solve(replay)
print(f"replay reached iteration {replay.iteration}: "
      f"{'identical' if replay.iteration == state.iteration else 'diverged'}")

# A different seed usually takes a different path to a different timetable.
other = SolverState(problem, weights=HeuristicWeights(), seed=random.randrange(1 << 30))
solve(other)
print(f"fresh seed finished in {other.iteration} iterations")
