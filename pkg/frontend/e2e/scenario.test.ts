// End-to-end scenario against a live service: the real app DOM, the real
// wire protocol, scripted gestures.  Runs in the jsdom environment with
// its WebSocket doing actual network I/O; the service is spawned fresh on
// a free port.  Tagged criterion-9: drag-to-fix goes out as place_and_fix,
// a refused drop shows the server's reason verbatim, and streamed
// snapshot iterations only ever climb.

import { spawn, type ChildProcessWithoutNullStreams } from 'node:child_process'
import net from 'node:net'
import { afterAll, beforeAll, describe, expect, it } from 'vitest'

import { boot, type App } from '../src/app.js'
import { buildMarkIndex, dropForbidden } from '../src/marks.js'
import type { ActivityDoc } from '../src/protocol.js'
import { SAMPLE_PROBLEM } from '../src/sample_problem.js'

let server: ChildProcessWithoutNullStreams
let serverErr = ''
let app: App
let port: number
const clientLog: Array<Record<string, unknown>> = []

const sleep = (ms: number) => new Promise((r) => setTimeout(r, ms))

async function waitFor(cond: () => boolean, ms: number, label: string): Promise<void> {
  const t0 = Date.now()
  while (!cond()) {
    if (Date.now() - t0 > ms) throw new Error(`timed out waiting for ${label}\nserver stderr:\n${serverErr.slice(-2000)}`)
    await sleep(25)
  }
}

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const probe = net.createServer()
    probe.listen(0, '127.0.0.1', () => {
      const addr = probe.address()
      if (addr && typeof addr === 'object') probe.close(() => resolve(addr.port))
      else reject(new Error('no port'))
    })
  })
}

async function waitHealthy(url: string, ms: number): Promise<void> {
  const t0 = Date.now()
  for (;;) {
    try {
      const res = await fetch(url)
      if (res.ok) return
    } catch {
      // not up yet
    }
    if (Date.now() - t0 > ms) throw new Error(`service never became healthy\n${serverErr.slice(-2000)}`)
    await sleep(100)
  }
}

const activityDoc = (id: string): ActivityDoc => {
  const doc = SAMPLE_PROBLEM.activities.find((a) => a.id === id)
  if (!doc) throw new Error(`unknown activity ${id}`)
  return doc
}

function dragChip(source: Element, target: Element): void {
  const store = new Map<string, string>()
  const dataTransfer = {
    setData: (k: string, v: string) => void store.set(k, v),
    getData: (k: string) => store.get(k) ?? '',
  }
  const start = new Event('dragstart', { bubbles: true }) as Event & { dataTransfer?: typeof dataTransfer }
  start.dataTransfer = dataTransfer
  source.dispatchEvent(start)
  const drop = new Event('drop', { bubbles: true, cancelable: true }) as Event & {
    dataTransfer?: typeof dataTransfer
  }
  drop.dataTransfer = dataTransfer
  target.dispatchEvent(drop)
}

/** Click through any open picker dialogs, preferring `wanted` members. */
async function answerPicker(wanted: Set<string>): Promise<void> {
  for (let guard = 0; guard < 8; guard++) {
    await sleep(40)
    if (app.el.picker.hidden) return
    const options = [...app.el.picker.querySelectorAll('button[data-opt]')] as HTMLButtonElement[]
    if (options.length === 0) return
    const pick = options.find((b) => wanted.has(b.dataset['opt'] ?? '')) ?? options[0]!
    pick.click()
  }
}

/** A group-satisfying selection that includes `res`, or null. */
function selectionUsing(doc: ActivityDoc, res: string): string[] | null {
  const sel = new Set<string>()
  let used = false
  for (const g of doc.groups) {
    if (g.mode !== 'conjunctive') continue
    for (const m of g.members) sel.add(m)
    if (g.members.includes(res)) used = true
  }
  for (const g of doc.groups) {
    if (g.mode !== 'disjunctive') continue
    if (!used && g.members.includes(res)) {
      sel.add(res)
      used = true
    } else {
      sel.add(g.members[0]!)
    }
  }
  return used ? [...sel].sort() : null
}

beforeAll(async () => {
  port = await freePort()
  server = spawn('python3', ['-m', 'slotplan.cli', 'serve', '--port', String(port)], {
    env: { ...process.env, PYTHONUNBUFFERED: '1' },
  })
  server.stderr.on('data', (chunk: Buffer) => {
    serverErr += chunk.toString()
  })
  await waitHealthy(`http://127.0.0.1:${port}/health`, 30_000)

  const mount = document.createElement('div')
  document.body.appendChild(mount)
  app = await boot({ mount, problem: SAMPLE_PROBLEM, wsBase: `ws://127.0.0.1:${port}` })

  // record every client frame so gestures can be checked on the wire
  const original = app.control.request.bind(app.control)
  app.control.request = (msg: object) => {
    clientLog.push(msg as Record<string, unknown>)
    return original(msg)
  }
  await waitFor(() => app.debug.streamStatus.includes('connected'), 10_000, 'stream attach')
}, 60_000)

afterAll(() => {
  app?.close()
  server?.kill()
})

describe('criterion-9 scenario', () => {
  it('streams snapshots whose iterations strictly climb while solving', async () => {
    for (let batch = 0; batch < 3; batch++) {
      await app.step(4)
      await sleep(150) // let the throttled snapshot flush
    }
    await app.start()
    await waitFor(() => app.el.runState.textContent === 'paused' || (app.view?.unscheduled.length ?? 1) === 0, 60_000, 'solve to settle')
    await app.pause()
    await sleep(200)

    const its = app.debug.snapshotIterations
    expect(its.length).toBeGreaterThanOrEqual(3)
    for (let i = 1; i < its.length; i++) {
      expect(its[i]!).toBeGreaterThan(its[i - 1]!)
    }
    // the board reflects the last view: pool size matches the snapshot
    const pool = app.el.root.querySelectorAll('.unsched-chip').length
    expect(pool).toBe(app.view!.unscheduled.length)
  }, 90_000)

  it('turns a drag onto the grid into place_and_fix and pins the chip', async () => {
    const view = app.view!
    const entries = Object.entries(view.assignment).filter(([id]) => !view.fixed.includes(id))
    expect(entries.length).toBeGreaterThan(0)
    const [actId, loc] = entries[0]!
    const res = loc.selection[0]!
    const kind = SAMPLE_PROBLEM.resources.find((r) => r.id === res)?.kind ?? ''

    app.el.kindSelect.value = kind
    app.el.kindSelect.dispatchEvent(new Event('change'))
    const cell = app.el.root.querySelector(`td[data-res="${res}"][data-slot="${loc.start}"]`)!
    const chip = cell.querySelector('.chip')!
    expect(chip).not.toBeNull()

    const before = clientLog.length
    dragChip(chip, cell) // drop in place: fix where it stands
    await answerPicker(new Set(loc.selection))
    await waitFor(() => app.view!.fixed.includes(actId), 10_000, 'edit to apply')

    const edits = clientLog.slice(before).filter((m) => m['type'] === 'edit')
    expect(edits.length).toBe(1)
    const sent = edits[0]!['edit'] as { kind: string; activity: string; location: { start: number } }
    expect(sent.kind).toBe('place_and_fix')
    expect(sent.activity).toBe(actId)
    expect(sent.location.start).toBe(loc.start)

    expect(app.el.rejectBanner.hidden).toBe(true)
    const pinned = app.el.root.querySelector(`td[data-res="${res}"][data-slot="${loc.start}"] .chip`)!
    expect(pinned.classList.contains('fixed')).toBe(true)
  }, 60_000)

  it('shows the server reason verbatim when a drop is refused', async () => {
    const view = app.view!
    const fixedId = view.fixed[0]!
    const fixedLoc = view.assignment[fixedId]!
    const res = fixedLoc.selection[0]!
    const marks = buildMarkIndex(SAMPLE_PROBLEM)

    // an activity the client hint lets through, doomed to clash with the pin
    let victim: ActivityDoc | null = null
    let selection: string[] | null = null
    for (const doc of SAMPLE_PROBLEM.activities) {
      if (doc.id === fixedId) continue
      if (dropForbidden(marks, doc, res, fixedLoc.start)) continue
      const sel = selectionUsing(doc, res)
      if (sel) {
        victim = doc
        selection = sel
        break
      }
    }
    expect(victim).not.toBeNull()

    // direct edit first: capture the reason and check it lands verbatim
    const result = await app.sendEdit({
      kind: 'place_and_fix',
      activity: victim!.id,
      location: { start: fixedLoc.start, selection: selection! },
    })
    expect(result?.applied).toBe(false)
    expect(result?.reason).toBeTruthy()
    expect(app.el.rejectBanner.hidden).toBe(false)
    expect(app.el.rejectBanner.className).toBe('server')
    expect(app.el.rejectText.textContent).toBe(result!.reason)

    // same refusal through the drag path
    app.clearBanner()
    const kind = SAMPLE_PROBLEM.resources.find((r) => r.id === res)?.kind ?? ''
    app.el.kindSelect.value = kind
    app.el.kindSelect.dispatchEvent(new Event('change'))
    const target = app.el.root.querySelector(`td[data-res="${res}"][data-slot="${fixedLoc.start}"]`)!
    // drag source: the pool chip if the victim is unscheduled, else its grid chip
    const source =
      app.el.root.querySelector(`.unsched-chip[data-act="${victim!.id}"]`) ??
      app.el.root.querySelector(`.chip[data-act="${victim!.id}"]`)
    expect(source).not.toBeNull()
    dragChip(source!, target)
    await answerPicker(new Set(selection!))
    await waitFor(() => !app.el.rejectBanner.hidden, 10_000, 'rejection banner')
    expect(app.el.rejectBanner.className).toBe('server')
    expect(app.el.rejectText.textContent).toBeTruthy()

    // the whole session's streamed snapshots stayed strictly increasing
    const its = app.debug.snapshotIterations
    for (let i = 1; i < its.length; i++) {
      expect(its[i]!).toBeGreaterThan(its[i - 1]!)
    }
  }, 60_000)
})
