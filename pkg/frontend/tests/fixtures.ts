// Hand-built documents small enough to assert against cell by cell.

import type { EditResultDoc, ProblemDoc, ViewDoc } from '../src/protocol.js'

export function tinyProblem(): ProblemDoc {
  return {
    format: 'slotplan-problem',
    version: 1,
    grid: { days: 2, slots_per_day: 4 },
    resources: [
      { id: 'r1', name: 'room one', kind: 'room', hard: [7], soft: [6] },
      { id: 'r2', name: 'room two', kind: 'room' },
      { id: 't1', name: 'crew one', kind: 'crew' },
      { id: 't2', name: 'crew two', kind: 'crew' },
    ],
    activities: [
      {
        id: 'a1',
        duration: 2,
        groups: [
          { mode: 'disjunctive', members: ['r1', 'r2'] },
          { mode: 'disjunctive', members: ['t1', 't2'] },
        ],
      },
      {
        id: 'a2',
        duration: 1,
        hard: [0],
        groups: [
          { mode: 'disjunctive', members: ['r2'] },
          { mode: 'conjunctive', members: ['t1', 't2'] },
        ],
      },
      {
        id: 'a3',
        duration: 3,
        groups: [{ mode: 'disjunctive', members: ['r1', 'r2'] }],
      },
    ],
    dependencies: [],
  }
}

export function emptyView(): ViewDoc {
  return {
    iteration: 0,
    assignment: {},
    fixed: [],
    unscheduled: ['a1', 'a2', 'a3'],
    scheduled_count: 0,
    soft_total: 0,
    best_scheduled_count: 0,
    best_soft_total: 0,
    activity_scores: null,
  }
}

export function viewWith(over: Partial<ViewDoc>): ViewDoc {
  return { ...emptyView(), ...over }
}

// Wire frames as the server would send them (content matters, layout not).

export function snapshotRaw(session: string, view: ViewDoc, running = false): string {
  return JSON.stringify({ type: 'snapshot', session, running, view })
}

export function editResultRaw(session: string, over: Partial<EditResultDoc>): string {
  const result: EditResultDoc = {
    edit: 'place_and_fix',
    applied: true,
    reason: null,
    detached: [],
    scheduled_count: 0,
    ...over,
  }
  return JSON.stringify({ type: 'edit_result', session, result })
}

export function reportRaw(session: string, iteration: number, activity: string): string {
  return JSON.stringify({
    type: 'iteration_report',
    session,
    report: {
      iteration,
      activity,
      activity_candidates: 1,
      location_candidates: 4,
      skipped: false,
      location: { start: 0, selection: ['r1'] },
      stats: { n_conflicts: 0 },
      score: 1.0,
      evicted: [],
      unscheduled_after: 2,
    },
  })
}
