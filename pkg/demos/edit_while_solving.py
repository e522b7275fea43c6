"""
Editing a timetable mid-search
==============================

Pause a half-finished run, pin an activity where you want it, detach one
you dislike, change a duration, and resume.  Every edit goes through
repair, so the schedule stays sound throughout.
"""

from slotplan import (
    Detach,
    GenParams,
    PlaceAndFix,
    Session,
    SetDuration,
    check_schedule,
    generate,
)

params = GenParams(n_teachers=6, n_classes=6, n_rooms=6, days=3, slots_per_day=6,
                   fill_percent=60.0, seed=4)
problem, witness = generate(params)

# Session wraps the solver state with an edit log and snapshot views.
session = Session(problem, seed=4)
session.step(15)
view = session.snapshot()
print(f"paused at iteration {view.iteration}: {len(view.assignment)} placed, "
      f"{len(view.unscheduled)} waiting")

# Pin the first waiting activity to its witness location.  PlaceAndFix
# evicts whatever non-fixed activities stand in the way; the report says
# exactly what happened.
target = sorted(view.unscheduled)[0]
report = session.apply_edit(PlaceAndFix(target, witness.assignment[target]))
print(f"pin {target}: applied={report.applied}, detached={sorted(report.detached)}")

# A pinned activity is off limits to the search; detaching someone else
# simply returns them to the unscheduled pool.
movable = sorted(a for a in session.state.schedule.assignment
                 if a not in session.state.schedule.fixed)
report = session.apply_edit(Detach(movable[0]))
print(f"detach {movable[0]}: applied={report.applied}")

# Problem edits work the same way.  Shrinking a duration can never break
# soundness; growing one may detach the activities it now overlaps.
longer = [a for a in problem.activities if a.duration >= 2]
report = session.apply_edit(SetDuration(longer[0].id, longer[0].duration - 1))
print(f"shrink {longer[0].id}: applied={report.applied}")

# The audit after each edit is the point of the exercise.
print(f"violations after edits: {check_schedule(session.state.problem, session.state.schedule)}")

# Resume to completion.  The pin holds: the solver schedules around it.
session.solve()
final = session.snapshot()
held = final.assignment[target] == witness.assignment[target]
print(f"finished at iteration {final.iteration}: {len(final.assignment)} placed, "
      f"pin {'held' if held else 'MOVED'}")
print(f"edit log: {[r.edit.kind for r in session.edit_log]}")
