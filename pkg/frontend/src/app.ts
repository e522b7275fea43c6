// Application wiring: toolbar, banners, picker dialog, and the glue
// between the two sockets and the grid renderer.  All state lives on the
// App instance so tests can poke at it directly.

import { ControlChannel, StreamChannel, type StreamStatus } from './connection.js'
import { resourceKinds } from './gridmodel.js'
import { buildMarkIndex, dropForbidden, type MarkIndex } from './marks.js'
import {
  createMsg,
  editMsg,
  getSnapshotMsg,
  pauseMsg,
  setWeightsMsg,
  startMsg,
  stepMsg,
  type ActivityDoc,
  type EditDoc,
  type EditResultDoc,
  type IterationReportDoc,
  type ProblemDoc,
  type ServerFrame,
  type ViewDoc,
  type WeightsDoc,
} from './protocol.js'
import { inferSelection, type GroupChoice } from './selection.js'
import { GridRenderer } from './render.js'

type WebSocketCtor = new (url: string) => WebSocket

export interface AppOptions {
  mount: HTMLElement
  problem: ProblemDoc
  /** ws:// base of the service, no trailing slash */
  wsBase: string
  Socket?: WebSocketCtor
  schedule?: (fn: () => void, ms: number) => ReturnType<typeof setTimeout>
}

export interface AppElements {
  root: HTMLElement
  kindSelect: HTMLSelectElement
  btnStart: HTMLButtonElement
  btnPause: HTMLButtonElement
  btnStep: HTMLButtonElement
  stepN: HTMLInputElement
  strategySelect: HTMLSelectElement
  sampleProb: HTMLInputElement
  btnWeights: HTMLButtonElement
  btnScores: HTMLButtonElement
  runState: HTMLElement
  iter: HTMLElement
  sched: HTMLElement
  soft: HTMLElement
  boardToggle: HTMLButtonElement
  lastReport: HTMLElement
  connBanner: HTMLElement
  rejectBanner: HTMLElement
  rejectText: HTMLElement
  board: HTMLElement
  pool: HTMLElement
  picker: HTMLElement
}

function describeReport(r: IterationReportDoc): string {
  if (r.skipped || !r.location) return `it ${r.iteration}: ${r.activity} skipped`
  const evicted = r.evicted.length ? `, evicted ${r.evicted.join(', ')}` : ''
  return `it ${r.iteration}: ${r.activity} at ${r.location.start} [${r.location.selection.join(', ')}]${evicted}`
}

function buildDom(mount: HTMLElement, kinds: string[]): AppElements {
  const root = document.createElement('div')
  root.className = 'app'
  root.innerHTML = `
    <header class="toolbar">
      <select id="kind-select"></select>
      <button id="btn-start">start</button>
      <button id="btn-pause">pause</button>
      <button id="btn-step">step</button>
      <input id="step-n" type="number" min="1" value="50">
      <span class="sep"></span>
      <label>strategy <select id="strategy-select">
        <option value="sampled">sampled</option>
        <option value="full">full</option>
        <option value="random">random</option>
      </select></label>
      <label>p <input id="sample-prob" type="number" min="0.01" max="1" step="0.05" value="0.2"></label>
      <button id="btn-weights">apply</button>
      <span class="sep"></span>
      <span id="run-state">paused</span>
      <span class="counter">it <b id="iter-count">0</b></span>
      <span class="counter">scheduled <b id="sched-count"></b></span>
      <span class="counter">soft <b id="soft-count"></b></span>
      <button id="board-toggle">showing: latest</button>
      <button id="btn-scores">pull scores</button>
    </header>
    <div id="conn-banner" hidden></div>
    <div id="reject-banner" hidden><span class="reject-text"></span><button class="dismiss">dismiss</button></div>
    <div id="last-report"></div>
    <main class="layout">
      <section class="board"></section>
      <aside class="pool"><h2>unscheduled</h2></aside>
    </main>
    <div id="picker" hidden></div>
  `
  mount.appendChild(root)
  const get = <T extends HTMLElement>(sel: string): T => {
    const el = root.querySelector(sel)
    if (!el) throw new Error(`missing element ${sel}`)
    return el as T
  }
  const kindSelect = get<HTMLSelectElement>('#kind-select')
  for (const kind of kinds) {
    const opt = document.createElement('option')
    opt.value = kind
    opt.textContent = kind || '(unkinded)'
    kindSelect.appendChild(opt)
  }
  return {
    root,
    kindSelect,
    btnStart: get('#btn-start'),
    btnPause: get('#btn-pause'),
    btnStep: get('#btn-step'),
    stepN: get('#step-n'),
    strategySelect: get('#strategy-select'),
    sampleProb: get('#sample-prob'),
    btnWeights: get('#btn-weights'),
    btnScores: get('#btn-scores'),
    runState: get('#run-state'),
    iter: get('#iter-count'),
    sched: get('#sched-count'),
    soft: get('#soft-count'),
    boardToggle: get('#board-toggle'),
    lastReport: get('#last-report'),
    connBanner: get('#conn-banner'),
    rejectBanner: get('#reject-banner'),
    rejectText: get('.reject-text'),
    board: get('.board'),
    pool: get('.pool'),
    picker: get('#picker'),
  }
}

export class App {
  readonly el: AppElements
  readonly control: ControlChannel
  stream: StreamChannel | null = null
  renderer: GridRenderer | null = null
  sid = ''
  view: ViewDoc | null = null
  scores: Record<string, number> | null = null
  showBest = false
  editBusy = false
  readonly debug = { snapshotIterations: [] as number[], streamStatus: [] as StreamStatus[] }
  private marks: MarkIndex
  private activities: Map<string, ActivityDoc>

  constructor(
    private problem: ProblemDoc,
    mount: HTMLElement,
    private wsBase: string,
    private Socket: WebSocketCtor,
    private schedule: (fn: () => void, ms: number) => ReturnType<typeof setTimeout>,
  ) {
    this.el = buildDom(mount, resourceKinds(problem))
    this.marks = buildMarkIndex(problem)
    this.activities = new Map(problem.activities.map((a) => [a.id, a]))
    this.control = new ControlChannel(`${wsBase}/ws`, Socket)
    this.wireToolbar()
  }

  /** Create the session, attach the stream, paint the first board. */
  async connect(): Promise<void> {
    const reply = await this.control.request(createMsg(this.problem))
    if (reply.type === 'error') throw new Error(reply.message)
    if (reply.type !== 'snapshot') throw new Error(`unexpected ${reply.type} reply to create`)
    this.sid = reply.session
    this.setRunning(reply.running)
    this.applyView(reply.view)
    this.stream = new StreamChannel(
      `${this.wsBase}/stream/${this.sid}`,
      {
        onFrame: (f) => this.onStreamFrame(f),
        onStatus: (s) => this.onStreamStatus(s),
      },
      this.Socket,
      this.schedule,
    )
  }

  private wireToolbar(): void {
    const el = this.el
    el.btnStart.addEventListener('click', () => void this.start())
    el.btnPause.addEventListener('click', () => void this.pause())
    el.btnStep.addEventListener('click', () => {
      const n = Math.max(1, Math.floor(Number(el.stepN.value) || 1))
      void this.step(n)
    })
    el.btnWeights.addEventListener('click', () => void this.applyWeights())
    el.btnScores.addEventListener('click', () => void this.refreshScores())
    el.boardToggle.addEventListener('click', () => {
      this.showBest = !this.showBest
      this.renderScoreboard()
    })
    el.kindSelect.addEventListener('change', () => {
      this.renderer?.setKind(el.kindSelect.value, this.view, this.scores)
    })
    const dismiss = el.rejectBanner.querySelector('.dismiss')
    dismiss?.addEventListener('click', () => this.clearBanner())
  }

  private ensureRenderer(): GridRenderer {
    if (!this.renderer) {
      this.renderer = new GridRenderer(this.el.board, this.problem, this.el.kindSelect.value, {
        onDrop: (res, slot, act) => void this.handleDrop(res, slot, act),
        onPinToggle: (act, fixed) => void this.handlePinToggle(act, fixed),
        onDetach: (act) => void this.sendEdit({ kind: 'detach', activity: act }),
      })
      this.el.pool.appendChild(this.renderer.sidePanel)
    }
    return this.renderer
  }

  private applyView(view: ViewDoc): void {
    this.view = view
    this.el.iter.textContent = String(view.iteration)
    this.renderScoreboard()
    this.ensureRenderer().applySnapshot(view, this.scores)
  }

  private renderScoreboard(): void {
    const v = this.view
    if (!v) return
    const total = this.problem.activities.length
    const sched = this.showBest ? v.best_scheduled_count : v.scheduled_count
    const soft = this.showBest ? v.best_soft_total : v.soft_total
    this.el.sched.textContent = `${sched}/${total}`
    this.el.soft.textContent = String(soft)
    this.el.boardToggle.textContent = this.showBest ? 'showing: best' : 'showing: latest'
  }

  private setRunning(running: boolean): void {
    this.el.runState.textContent = running ? 'running' : 'paused'
    this.el.root.dataset.running = String(running)
  }

  private onStreamFrame(frame: ServerFrame): void {
    if (frame.type === 'snapshot') {
      this.debug.snapshotIterations.push(frame.view.iteration)
      this.scores = null // the board moved, cached scores are stale
      this.setRunning(frame.running)
      this.applyView(frame.view)
    } else if (frame.type === 'iteration_report') {
      this.el.iter.textContent = String(frame.report.iteration)
      this.el.lastReport.textContent = describeReport(frame.report)
    }
  }

  private onStreamStatus(status: StreamStatus): void {
    this.debug.streamStatus.push(status)
    const banner = this.el.connBanner
    if (status === 'connected') {
      banner.hidden = true
      return
    }
    banner.hidden = false
    banner.textContent =
      status === 'gone'
        ? 'session is gone; reload to start a fresh one'
        : status === 'reconnecting'
          ? 'stream lost, reconnecting'
          : 'connecting to stream'
  }

  // Control actions.  Every reply is a snapshot; errors land in the banner.

  private async controlSnapshot(msg: object): Promise<void> {
    const frame = await this.control.request(msg)
    if (frame.type === 'error') {
      this.showRejection(frame.message)
      return
    }
    if (frame.type !== 'snapshot') return
    this.setRunning(frame.running)
    this.applyView(frame.view)
  }

  async start(): Promise<void> {
    await this.controlSnapshot(startMsg(this.sid))
  }

  async pause(): Promise<void> {
    await this.controlSnapshot(pauseMsg(this.sid))
  }

  async step(n: number): Promise<void> {
    await this.controlSnapshot(stepMsg(this.sid, n))
  }

  async refreshScores(): Promise<void> {
    const frame = await this.control.request(getSnapshotMsg(this.sid))
    if (frame.type !== 'snapshot') return
    this.scores = frame.view.activity_scores
    this.setRunning(frame.running)
    this.applyView(frame.view)
  }

  // Edit pipeline: one gesture, one edit, one reply.  Further gestures are
  // refused while a reply is pending rather than queued behind it.

  async sendEdit(edit: EditDoc): Promise<EditResultDoc | null> {
    if (this.editBusy) {
      this.showHint('an edit is already in flight')
      return null
    }
    this.editBusy = true
    try {
      const frame = await this.control.request(editMsg(this.sid, edit))
      return this.consumeEditReply(frame)
    } finally {
      this.editBusy = false
    }
  }

  private async consumeEditReply(frame: ServerFrame): Promise<EditResultDoc | null> {
    if (frame.type === 'error') {
      this.showRejection(frame.message)
      return null
    }
    if (frame.type !== 'edit_result') return null
    const result = frame.result
    if (!result.applied) {
      this.showRejection(result.reason ?? 'rejected')
      return result
    }
    this.clearBanner()
    await this.refreshScores()
    return result
  }

  async applyWeights(): Promise<EditResultDoc | null> {
    const weights: WeightsDoc = {
      format: 'slotplan-weights',
      version: 1,
      strategy: this.el.strategySelect.value,
    }
    const p = Number(this.el.sampleProb.value)
    if (this.el.sampleProb.value !== '' && Number.isFinite(p)) weights['sample_probability'] = p
    const frame = await this.control.request(setWeightsMsg(this.sid, weights))
    return this.consumeEditReply(frame)
  }

  async handleDrop(resourceId: string, slot: number, activityId: string): Promise<void> {
    const activity = this.activities.get(activityId)
    if (!activity) return
    if (dropForbidden(this.marks, activity, resourceId, slot)) {
      this.showHint(`blocked: ${activityId} cannot sit at ${slot} on ${resourceId}`)
      return
    }
    const picks: Record<number, string> = {}
    let result = inferSelection(activity, resourceId, picks)
    while (!result.ok) {
      if ('error' in result) {
        this.showHint(result.error)
        return
      }
      const open = result.needsChoice[0]!
      const pick = await this.showPicker(activity, open)
      if (pick === null) return
      picks[open.groupIndex] = pick
      result = inferSelection(activity, resourceId, picks)
    }
    await this.sendEdit({
      kind: 'place_and_fix',
      activity: activityId,
      location: { start: slot, selection: result.selection },
    })
  }

  private async handlePinToggle(activityId: string, fixed: boolean): Promise<void> {
    if (fixed) {
      await this.sendEdit({ kind: 'unfix', activity: activityId })
      return
    }
    const loc = this.view?.assignment[activityId]
    if (!loc) return
    await this.sendEdit({ kind: 'place_and_fix', activity: activityId, location: loc })
  }

  /** One open disjunctive group at a time; resolves with the pick or null. */
  private showPicker(activity: ActivityDoc, choice: GroupChoice): Promise<string | null> {
    const host = this.el.picker
    host.textContent = ''
    host.hidden = false
    const title = document.createElement('p')
    title.textContent = `pick a resource for ${activity.id}`
    host.appendChild(title)
    return new Promise((resolve) => {
      const done = (value: string | null) => {
        host.hidden = true
        host.textContent = ''
        resolve(value)
      }
      for (const opt of choice.options) {
        const b = document.createElement('button')
        b.dataset.opt = opt
        b.textContent = opt
        b.addEventListener('click', () => done(opt))
        host.appendChild(b)
      }
      const cancel = document.createElement('button')
      cancel.className = 'cancel'
      cancel.textContent = 'cancel'
      cancel.addEventListener('click', () => done(null))
      host.appendChild(cancel)
    })
  }

  // Banner: server reasons verbatim, client hints visibly distinct.

  showRejection(reason: string): void {
    this.el.rejectText.textContent = reason
    this.el.rejectBanner.className = 'server'
    this.el.rejectBanner.hidden = false
  }

  showHint(text: string): void {
    this.el.rejectText.textContent = text
    this.el.rejectBanner.className = 'hint'
    this.el.rejectBanner.hidden = false
  }

  clearBanner(): void {
    this.el.rejectBanner.hidden = true
    this.el.rejectText.textContent = ''
  }

  close(): void {
    this.stream?.close()
    this.control.close()
  }
}

/** Build the UI under `mount`, open both channels, return the live app. */
export async function boot(opts: AppOptions): Promise<App> {
  const Socket = opts.Socket ?? WebSocket
  const schedule = opts.schedule ?? setTimeout
  const app = new App(opts.problem, opts.mount, opts.wsBase, Socket, schedule)
  await app.connect()
  return app
}
