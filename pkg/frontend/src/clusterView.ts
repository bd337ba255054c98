// View model for the typo-cleaning cluster screen: per-row fix choices
// (keep / replace with majority / custom value) collected into the fix
// decisions the engine applies as a new dataset revision.

import type { FixDecision, TypoClusterPayload } from './types.js'

export type FixChoice =
  | { action: 'keep' }
  | { action: 'majority' }
  | { action: 'custom'; value: string }

export interface ClusterRowModel {
  row: number
  value: string | null
  isSuspect: boolean
  choice: FixChoice
}

export class ClusterViewModel {
  readonly payload: TypoClusterPayload
  readonly rows: ClusterRowModel[]

  constructor(payload: TypoClusterPayload) {
    this.payload = payload
    const suspects = new Set(payload.suspect_rows.map((s) => s.row))
    this.rows = payload.cluster.rows.map((r) => ({
      row: r.row,
      value: r.value,
      isSuspect: suspects.has(r.row),
      choice: { action: 'keep' },
    }))
  }

  setChoice(row: number, choice: FixChoice): void {
    const model = this.rows.find((r) => r.row === row)
    if (!model) throw new Error(`row ${row} is not displayed in this cluster`)
    if (!model.isSuspect && choice.action !== 'keep') {
      throw new Error(`row ${row} is not a suspect; only suspect rows can be fixed`)
    }
    model.choice = choice
  }

  markAllSuspectsMajority(): void {
    for (const row of this.rows) {
      if (row.isSuspect) row.choice = { action: 'majority' }
    }
  }

  /** Decisions for the engine; rows kept as-is produce no decision. */
  decisions(): FixDecision[] {
    const column = this.payload.fd.rhs_index
    const out: FixDecision[] = []
    for (const row of this.rows) {
      switch (row.choice.action) {
        case 'keep':
          break
        case 'majority':
          out.push({ row: row.row, column, replacement: this.payload.cluster.majority_rhs })
          break
        case 'custom':
          out.push({ row: row.row, column, replacement: row.choice.value })
          break
      }
    }
    return out
  }
}
