// Per-slot availability lookups and the client-side drop hint.  The server
// is authoritative; everything here exists to paint cells and to stop the
// obviously doomed gestures before a round trip.

import type { ActivityDoc, ProblemDoc, ResourceDoc } from './protocol.js'

export type CellMark = 'neutral' | 'soft' | 'hard'

export interface MarkIndex {
  totalSlots: number
  resource: Map<string, { hard: Set<number>; soft: Set<number> }>
  activity: Map<string, { hard: Set<number>; soft: Set<number> }>
}

function markSets(doc: ResourceDoc | ActivityDoc): { hard: Set<number>; soft: Set<number> } {
  return { hard: new Set(doc.hard ?? []), soft: new Set(doc.soft ?? []) }
}

export function buildMarkIndex(problem: ProblemDoc): MarkIndex {
  const index: MarkIndex = {
    totalSlots: problem.grid.days * problem.grid.slots_per_day,
    resource: new Map(),
    activity: new Map(),
  }
  for (const r of problem.resources) index.resource.set(r.id, markSets(r))
  for (const a of problem.activities) index.activity.set(a.id, markSets(a))
  return index
}

/** How to paint one (resource row, slot) cell. */
export function cellMark(index: MarkIndex, resourceId: string, slot: number): CellMark {
  const marks = index.resource.get(resourceId)
  if (!marks) return 'neutral'
  if (marks.hard.has(slot)) return 'hard'
  if (marks.soft.has(slot)) return 'soft'
  return 'neutral'
}

/**
 * Client-side hint: reject a drop whose span leaves the grid or crosses a
 * hard mark of the activity or the drop row.  Everything subtler (other
 * selected resources, pinned conflicts, dependencies) is the server's call.
 */
export function dropForbidden(
  index: MarkIndex,
  activity: ActivityDoc,
  resourceId: string,
  start: number,
): boolean {
  if (start < 0 || start + activity.duration > index.totalSlots) return true
  const row = index.resource.get(resourceId)
  const own = index.activity.get(activity.id)
  for (let t = start; t < start + activity.duration; t++) {
    if (row?.hard.has(t) || own?.hard.has(t)) return true
  }
  return false
}
