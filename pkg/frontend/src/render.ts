// DOM rendering.  The grid is a plain table, one row per resource of the
// selected kind, one cell per slot; chips overlay their start cell and span
// their duration with a CSS variable.  applySnapshot is keyed by per-cell
// signatures, so it is incremental and idempotent: re-applying the same
// view is a no-op and leaves the DOM byte-identical.

import { buildRows, unscheduledItems, type Chip } from './gridmodel.js'
import { buildMarkIndex, cellMark, type MarkIndex } from './marks.js'
import type { ProblemDoc, ViewDoc } from './protocol.js'

export interface GridCallbacks {
  onDrop: (resourceId: string, slot: number, activityId: string) => void
  onPinToggle: (activityId: string, fixed: boolean) => void
  onDetach: (activityId: string) => void
}

function chipSignature(chip: Chip | undefined): string {
  if (!chip) return ''
  return `${chip.activity}|${chip.duration}|${chip.fixed ? 'F' : 'm'}`
}

function chipTitle(chip: Chip): string {
  const pin = chip.fixed ? ' (fixed)' : ''
  return `${chip.activity}${pin}: slots ${chip.start}..${chip.start + chip.duration - 1}, with ${chip.selection.join(', ')}`
}

export class GridRenderer {
  readonly table: HTMLTableElement
  readonly sidePanel: HTMLElement
  private marks: MarkIndex
  private cells = new Map<string, HTMLTableCellElement>()
  private signatures = new Map<string, string>()
  private panelSignature = ''
  private kind: string

  constructor(
    private mount: HTMLElement,
    private problem: ProblemDoc,
    kind: string,
    private callbacks: GridCallbacks,
  ) {
    this.marks = buildMarkIndex(problem)
    this.kind = kind
    this.table = document.createElement('table')
    this.table.className = 'grid'
    this.sidePanel = document.createElement('ul')
    this.sidePanel.className = 'unscheduled'
    this.buildSkeleton()
    mount.appendChild(this.table)
  }

  get selectedKind(): string {
    return this.kind
  }

  setKind(kind: string, view: ViewDoc | null, scores: Record<string, number> | null): void {
    this.kind = kind
    this.buildSkeleton()
    if (view) this.applySnapshot(view, scores)
  }

  private buildSkeleton(): void {
    const { days, slots_per_day: perDay } = this.problem.grid
    this.cells.clear()
    this.signatures.clear()
    this.panelSignature = ''
    this.table.textContent = ''

    const head = this.table.createTHead()
    const dayRow = head.insertRow()
    dayRow.appendChild(document.createElement('th'))
    for (let d = 0; d < days; d++) {
      const th = document.createElement('th')
      th.colSpan = perDay
      th.textContent = `day ${d}`
      dayRow.appendChild(th)
    }
    const slotRow = head.insertRow()
    slotRow.appendChild(document.createElement('th'))
    for (let s = 0; s < days * perDay; s++) {
      const th = document.createElement('th')
      th.textContent = String(s % perDay)
      slotRow.appendChild(th)
    }

    const body = this.table.createTBody()
    for (const resource of this.problem.resources) {
      if ((resource.kind ?? '') !== this.kind) continue
      const tr = body.insertRow()
      const label = document.createElement('th')
      label.textContent = resource.name || resource.id
      tr.appendChild(label)
      for (let s = 0; s < days * perDay; s++) {
        const td = tr.insertCell()
        td.dataset.res = resource.id
        td.dataset.slot = String(s)
        const mark = cellMark(this.marks, resource.id, s)
        if (mark !== 'neutral') td.classList.add(mark)
        td.addEventListener('dragover', (ev) => ev.preventDefault())
        td.addEventListener('drop', (ev) => {
          ev.preventDefault()
          const act = ev.dataTransfer?.getData('text/plain')
          if (act) this.callbacks.onDrop(resource.id, s, act)
        })
        this.cells.set(`${resource.id}:${s}`, td)
      }
    }
  }

  /** Incremental, idempotent application of a snapshot view. */
  applySnapshot(view: ViewDoc, scores: Record<string, number> | null): void {
    const chipAt = new Map<string, Chip>()
    for (const row of buildRows(this.problem, view, this.kind)) {
      for (const [start, chip] of row.chips) chipAt.set(`${row.resource}:${start}`, chip)
    }
    for (const [key, td] of this.cells) {
      const chip = chipAt.get(key)
      const want = chipSignature(chip)
      if (this.signatures.get(key) === want) continue
      this.signatures.set(key, want)
      td.textContent = ''
      td.classList.toggle('occupied', chip !== undefined)
      if (chip) td.appendChild(this.renderChip(chip))
    }
    this.renderPanel(view, scores)
  }

  private renderChip(chip: Chip): HTMLElement {
    const el = document.createElement('div')
    el.className = chip.fixed ? 'chip fixed' : 'chip'
    el.dataset.act = chip.activity
    el.style.setProperty('--span', String(chip.duration))
    el.title = chipTitle(chip)
    el.draggable = true
    el.addEventListener('dragstart', (ev) => {
      ev.dataTransfer?.setData('text/plain', chip.activity)
    })

    const label = document.createElement('span')
    label.className = 'chip-label'
    label.textContent = chip.activity
    el.appendChild(label)

    const pin = document.createElement('button')
    pin.className = 'act-pin'
    pin.textContent = chip.fixed ? 'unpin' : 'pin'
    pin.title = chip.fixed ? 'let the solver move this again' : 'fix this placement'
    pin.addEventListener('click', () => this.callbacks.onPinToggle(chip.activity, chip.fixed))
    el.appendChild(pin)

    const detach = document.createElement('button')
    detach.className = 'act-detach'
    detach.textContent = 'x'
    detach.title = 'back to the unscheduled pool'
    detach.addEventListener('click', () => this.callbacks.onDetach(chip.activity))
    el.appendChild(detach)
    return el
  }

  private renderPanel(view: ViewDoc, scores: Record<string, number> | null): void {
    const items = unscheduledItems(this.problem, view, scores)
    const signature = items.map((i) => `${i.activity}|${i.duration}|${i.score ?? ''}`).join(';')
    if (signature === this.panelSignature) return
    this.panelSignature = signature
    this.sidePanel.textContent = ''
    for (const item of items) {
      const li = document.createElement('li')
      li.className = 'unsched-chip'
      li.dataset.act = item.activity
      li.draggable = true
      li.addEventListener('dragstart', (ev) => {
        ev.dataTransfer?.setData('text/plain', item.activity)
      })
      const label = document.createElement('span')
      label.textContent = `${item.activity} (${item.duration})`
      li.appendChild(label)
      if (item.score !== null) {
        const score = document.createElement('span')
        score.className = 'score'
        score.textContent = item.score.toFixed(2)
        li.appendChild(score)
      }
      this.sidePanel.appendChild(li)
    }
  }
}
