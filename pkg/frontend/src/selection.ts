// Turning a drop gesture into a concrete location.  The drop row fixes at
// most one disjunctive choice; every other multi-member group needs an
// explicit pick, which the caller gathers through the resource picker.

import type { ActivityDoc } from './protocol.js'

export interface GroupChoice {
  groupIndex: number
  options: string[]
}

export type SelectionResult =
  | { ok: true; selection: string[] }
  | { ok: false; needsChoice: GroupChoice[] }
  | { ok: false; error: string }

/**
 * Infer the resource selection implied by dropping `activity` onto the row
 * of `dropResource`.  `picks` maps disjunctive group index to the member
 * chosen in the picker; groups the drop row or single options already
 * decide are filled in automatically.
 */
export function inferSelection(
  activity: ActivityDoc,
  dropResource: string,
  picks: Record<number, string> = {},
): SelectionResult {
  const selection = new Set<string>()
  let dropUsed = false
  const open: GroupChoice[] = []

  for (let i = 0; i < activity.groups.length; i++) {
    const group = activity.groups[i]!
    if (group.mode === 'conjunctive') {
      for (const m of group.members) selection.add(m)
      if (group.members.includes(dropResource)) dropUsed = true
      continue
    }
    // disjunctive: exactly one member
    if (!dropUsed && group.members.includes(dropResource)) {
      selection.add(dropResource)
      dropUsed = true
      continue
    }
    const picked = picks[i]
    if (picked !== undefined) {
      if (!group.members.includes(picked)) {
        return { ok: false, error: `${picked} is not an option of group ${i}` }
      }
      selection.add(picked)
      continue
    }
    if (group.members.length === 1) {
      selection.add(group.members[0]!)
      continue
    }
    open.push({ groupIndex: i, options: [...group.members] })
  }

  if (!dropUsed) {
    return { ok: false, error: `${activity.id} does not use ${dropResource}` }
  }
  if (open.length > 0) {
    return { ok: false, needsChoice: open }
  }
  return { ok: true, selection: [...selection].sort() }
}
