// Pure view-model computed from the problem document plus the latest
// snapshot view.  Rendering consumes this; tests exercise it without a DOM.

import type { ProblemDoc, ViewDoc } from './protocol.js'

export interface Chip {
  activity: string
  start: number
  duration: number
  fixed: boolean
  /** resource ids of the chip's selection, for tooltips */
  selection: string[]
}

export interface RowModel {
  resource: string
  name: string
  /** chips keyed by their start slot; a chip occupies `duration` columns */
  chips: Map<number, Chip>
  /** slots covered by some chip (including spans), for occupancy checks */
  covered: Set<number>
}

export interface UnscheduledItem {
  activity: string
  duration: number
  score: number | null
}

/** Resource kinds present in the problem, in first-appearance order. */
export function resourceKinds(problem: ProblemDoc): string[] {
  const kinds: string[] = []
  for (const r of problem.resources) {
    const kind = r.kind ?? ''
    if (!kinds.includes(kind)) kinds.push(kind)
  }
  return kinds
}

export function rowsForKind(problem: ProblemDoc, kind: string): string[] {
  return problem.resources.filter((r) => (r.kind ?? '') === kind).map((r) => r.id)
}

/**
 * Distribute the snapshot's assignment onto the rows of one resource kind.
 * An activity appears in every row its selection claims; the rendered
 * occupancy is exactly the snapshot's, nothing is invented client-side.
 */
export function buildRows(problem: ProblemDoc, view: ViewDoc, kind: string): RowModel[] {
  const durations = new Map(problem.activities.map((a) => [a.id, a.duration]))
  const names = new Map(problem.resources.map((r) => [r.id, r.name || r.id]))
  const fixed = new Set(view.fixed)
  const rows = new Map<string, RowModel>()
  for (const id of rowsForKind(problem, kind)) {
    rows.set(id, { resource: id, name: names.get(id) ?? id, chips: new Map(), covered: new Set() })
  }
  for (const [activity, loc] of Object.entries(view.assignment)) {
    const duration = durations.get(activity) ?? 1
    for (const rid of loc.selection) {
      const row = rows.get(rid)
      if (!row) continue
      row.chips.set(loc.start, {
        activity,
        start: loc.start,
        duration,
        fixed: fixed.has(activity),
        selection: loc.selection,
      })
      for (let t = loc.start; t < loc.start + duration; t++) row.covered.add(t)
    }
  }
  return [...rows.values()]
}

/** Side-panel list, in the view's (declaration) order, scores if known. */
export function unscheduledItems(
  problem: ProblemDoc,
  view: ViewDoc,
  scores: Record<string, number> | null,
): UnscheduledItem[] {
  const durations = new Map(problem.activities.map((a) => [a.id, a.duration]))
  return view.unscheduled.map((id) => ({
    activity: id,
    duration: durations.get(id) ?? 1,
    score: scores && id in scores ? scores[id]! : null,
  }))
}
