// Wire types for the live-session protocol (docs/protocol.md) and the
// document payloads it carries (docs/format.md).  This module is the only
// place that knows frame shapes; everything else works with these types.

export interface GridDoc {
  days: number
  slots_per_day: number
}

export interface ResourceDoc {
  id: string
  name?: string
  kind?: string
  hard?: number[]
  soft?: number[]
}

export interface GroupDoc {
  mode: 'conjunctive' | 'disjunctive'
  members: string[]
}

export interface LocationPrefDoc {
  start: number
  selection?: string[]
  penalty: number
}

export interface ActivityDoc {
  id: string
  name?: string
  duration: number
  groups: GroupDoc[]
  hard?: number[]
  soft?: number[]
  location_prefs?: LocationPrefDoc[]
}

export interface DependencyDoc {
  kind: 'before' | 'meets' | 'concurrent'
  first: string
  second: string
}

export interface ProblemDoc {
  format: 'slotplan-problem'
  version: number
  grid: GridDoc
  resources: ResourceDoc[]
  activities: ActivityDoc[]
  dependencies: DependencyDoc[]
}

export interface LocationDoc {
  start: number
  selection: string[]
}

// Weights documents are passed through opaquely; the toolbar only ever
// fills in the fields it owns.
export interface WeightsDoc {
  format: 'slotplan-weights'
  version: number
  [key: string]: unknown
}

export type EditDoc =
  | { kind: 'place_and_fix'; activity: string; location: LocationDoc }
  | { kind: 'unfix'; activity: string }
  | { kind: 'detach'; activity: string }
  | { kind: 'set_duration'; activity: string; duration: number }

export interface ViewDoc {
  iteration: number
  assignment: Record<string, LocationDoc>
  fixed: string[]
  unscheduled: string[]
  scheduled_count: number
  soft_total: number
  best_scheduled_count: number
  best_soft_total: number
  activity_scores: Record<string, number> | null
}

export interface SnapshotFrame {
  type: 'snapshot'
  session: string
  running: boolean
  view: ViewDoc
}

export interface IterationReportDoc {
  iteration: number
  activity: string
  activity_candidates: number
  location_candidates: number
  skipped: boolean
  location: LocationDoc | null
  stats: Record<string, number> | null
  score: number | null
  evicted: string[]
  unscheduled_after: number
}

export interface IterationReportFrame {
  type: 'iteration_report'
  session: string
  report: IterationReportDoc
}

export interface EditResultDoc {
  edit: string
  applied: boolean
  reason: string | null
  detached: string[]
  scheduled_count: number
}

export interface EditResultFrame {
  type: 'edit_result'
  session: string
  result: EditResultDoc
}

export interface ErrorFrame {
  type: 'error'
  session: string | null
  message: string
}

export type ServerFrame = SnapshotFrame | IterationReportFrame | EditResultFrame | ErrorFrame

const FRAME_TYPES = new Set(['snapshot', 'iteration_report', 'edit_result', 'error'])

/** Parse one incoming text frame; throws on anything outside the protocol. */
export function parseServerFrame(raw: string): ServerFrame {
  let doc: unknown
  try {
    doc = JSON.parse(raw)
  } catch {
    throw new Error('unparseable frame')
  }
  if (typeof doc !== 'object' || doc === null || Array.isArray(doc)) {
    throw new Error('frame is not an object')
  }
  const type = (doc as { type?: unknown }).type
  if (typeof type !== 'string' || !FRAME_TYPES.has(type)) {
    throw new Error(`unknown frame type ${String(type)}`)
  }
  return doc as ServerFrame
}

// Client message builders.  The server replies to every one of these with
// exactly one frame, in order.

export function createMsg(problem: ProblemDoc, weights?: WeightsDoc, seed?: number): object {
  return { type: 'create', problem, ...(weights ? { weights } : {}), ...(seed !== undefined ? { seed } : {}) }
}

export function startMsg(session: string): object {
  return { type: 'start', session }
}

export function pauseMsg(session: string): object {
  return { type: 'pause', session }
}

export function stepMsg(session: string, n: number): object {
  return { type: 'step', session, n }
}

export function editMsg(session: string, edit: EditDoc): object {
  return { type: 'edit', session, edit }
}

export function setWeightsMsg(session: string, weights: WeightsDoc): object {
  return { type: 'set_weights', session, weights }
}

export function getSnapshotMsg(session: string): object {
  return { type: 'get_snapshot', session }
}
