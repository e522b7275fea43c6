import { beforeEach, describe, expect, it } from 'vitest'

import { GridRenderer, type GridCallbacks } from '../src/render.js'
import { tinyProblem, viewWith } from './fixtures.js'

function setup(kind = 'room') {
  document.body.innerHTML = ''
  const mount = document.createElement('div')
  document.body.appendChild(mount)
  const calls: Array<[string, ...unknown[]]> = []
  const callbacks: GridCallbacks = {
    onDrop: (res, slot, act) => calls.push(['drop', res, slot, act]),
    onPinToggle: (act, fixed) => calls.push(['pin', act, fixed]),
    onDetach: (act) => calls.push(['detach', act]),
  }
  const renderer = new GridRenderer(mount, tinyProblem(), kind, callbacks)
  return { renderer, mount, calls }
}

const view = () =>
  viewWith({
    iteration: 5,
    assignment: {
      a1: { start: 2, selection: ['r1', 't2'] },
      a3: { start: 4, selection: ['r2'] },
    },
    fixed: ['a3'],
    unscheduled: ['a2'],
    scheduled_count: 2,
  })

describe('grid skeleton', () => {
  it('builds one row per resource of the kind, one cell per slot', () => {
    const { renderer } = setup()
    const rows = renderer.table.querySelectorAll('tbody tr')
    expect(rows.length).toBe(2)
    expect(renderer.table.querySelectorAll('td[data-res="r1"]').length).toBe(8)
    expect(renderer.table.querySelector('td[data-res="t1"]')).toBeNull()
  })

  it('paints hard and soft marks from the problem', () => {
    const { renderer } = setup()
    const hard = renderer.table.querySelector('td[data-res="r1"][data-slot="7"]')!
    const soft = renderer.table.querySelector('td[data-res="r1"][data-slot="6"]')!
    const plain = renderer.table.querySelector('td[data-res="r2"][data-slot="7"]')!
    expect(hard.classList.contains('hard')).toBe(true)
    expect(soft.classList.contains('soft')).toBe(true)
    expect(plain.classList.contains('hard')).toBe(false)
  })
})

describe('applySnapshot', () => {
  it('places chips on the rows their selection claims', () => {
    const { renderer } = setup()
    renderer.applySnapshot(view(), null)
    const chip = renderer.table.querySelector('td[data-res="r1"][data-slot="2"] .chip')!
    expect(chip).not.toBeNull()
    expect(chip.querySelector('.chip-label')!.textContent).toBe('a1')
    expect((chip as HTMLElement).style.getPropertyValue('--span')).toBe('2')
    expect(renderer.table.querySelector('td[data-res="r2"] .chip')).not.toBeNull()
  })

  it('styles fixed chips and flips the pin label', () => {
    const { renderer } = setup()
    renderer.applySnapshot(view(), null)
    const fixed = renderer.table.querySelector('td[data-res="r2"][data-slot="4"] .chip')!
    expect(fixed.classList.contains('fixed')).toBe(true)
    expect(fixed.querySelector('.act-pin')!.textContent).toBe('unpin')
    const loose = renderer.table.querySelector('td[data-res="r1"][data-slot="2"] .chip')!
    expect(loose.classList.contains('fixed')).toBe(false)
    expect(loose.querySelector('.act-pin')!.textContent).toBe('pin')
  })

  it('is idempotent: re-applying a view leaves the DOM untouched', () => {
    const { renderer } = setup()
    renderer.applySnapshot(view(), null)
    const once = renderer.table.innerHTML + renderer.sidePanel.innerHTML
    renderer.applySnapshot(view(), null)
    expect(renderer.table.innerHTML + renderer.sidePanel.innerHTML).toBe(once)
  })

  it('clears a chip when the next view moves it', () => {
    const { renderer } = setup()
    renderer.applySnapshot(view(), null)
    const moved = viewWith({
      assignment: { a1: { start: 5, selection: ['r1', 't2'] } },
      unscheduled: ['a2', 'a3'],
      scheduled_count: 1,
    })
    renderer.applySnapshot(moved, null)
    expect(renderer.table.querySelector('td[data-res="r1"][data-slot="2"] .chip')).toBeNull()
    expect(renderer.table.querySelector('td[data-res="r1"][data-slot="5"] .chip')).not.toBeNull()
    expect(renderer.table.querySelector('td[data-res="r2"] .chip')).toBeNull()
  })

  it('lists unscheduled activities with durations and scores', () => {
    const { renderer } = setup()
    renderer.applySnapshot(view(), { a2: 1.25 })
    const items = renderer.sidePanel.querySelectorAll('.unsched-chip')
    expect(items.length).toBe(1)
    expect(items[0]!.textContent).toContain('a2 (1)')
    expect(items[0]!.querySelector('.score')!.textContent).toBe('1.25')
  })
})

describe('gestures', () => {
  function dropOn(cell: Element, activity: string): void {
    const ev = new Event('drop', { bubbles: true, cancelable: true }) as Event & {
      dataTransfer?: { getData: (k: string) => string }
    }
    ev.dataTransfer = { getData: () => activity }
    cell.dispatchEvent(ev)
  }

  it('reports drops with the cell coordinates', () => {
    const { renderer, calls } = setup()
    dropOn(renderer.table.querySelector('td[data-res="r2"][data-slot="3"]')!, 'a1')
    expect(calls).toEqual([['drop', 'r2', 3, 'a1']])
  })

  it('routes pin and detach buttons to the callbacks', () => {
    const { renderer, calls } = setup()
    renderer.applySnapshot(view(), null)
    const chip = renderer.table.querySelector('td[data-res="r2"][data-slot="4"] .chip')!
    ;(chip.querySelector('.act-pin') as HTMLButtonElement).click()
    ;(chip.querySelector('.act-detach') as HTMLButtonElement).click()
    expect(calls).toEqual([
      ['pin', 'a3', true],
      ['detach', 'a3'],
    ])
  })
})

describe('setKind', () => {
  it('rebuilds the rows and re-applies the current view', () => {
    const { renderer } = setup()
    renderer.applySnapshot(view(), null)
    renderer.setKind('crew', view(), null)
    expect(renderer.table.querySelectorAll('tbody tr').length).toBe(2)
    expect(renderer.table.querySelector('td[data-res="t2"][data-slot="2"] .chip')).not.toBeNull()
    expect(renderer.table.querySelector('td[data-res="r1"]')).toBeNull()
  })
})
