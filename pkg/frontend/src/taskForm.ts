// Task form model: per-kind parameter fields with client-side checks
// mirroring the engine's submission validation. The submit button is
// enabled only while every check passes, so a valid form round-trips.

import type { TaskKind } from './types.js'

export type FieldType = 'number' | 'integer' | 'text' | 'choice' | 'columns' | 'column'

export interface ParamField {
  name: string
  label: string
  type: FieldType
  required?: boolean
  min?: number
  max?: number
  minExclusive?: boolean
  maxExclusive?: boolean
  choices?: string[]
  default?: string
  help?: string
}

export const RUNNABLE_KINDS: TaskKind[] = [
  'discover_fd',
  'validate_fd',
  'validate_mfd',
  'discover_ind',
  'validate_ind',
  'mine_rules',
  'profile_stats',
  'typo_pipeline',
]

const THREADS: ParamField = {
  name: 'thread_count',
  label: 'threads',
  type: 'integer',
  min: 1,
  default: '1',
}

export const KIND_FIELDS: Record<TaskKind, ParamField[]> = {
  discover_fd: [
    {
      name: 'error_threshold',
      label: 'error threshold (g3)',
      type: 'number',
      min: 0,
      max: 1,
      maxExclusive: true,
      default: '0',
    },
    { name: 'max_lhs', label: 'max lhs size', type: 'integer', min: 1, default: '3' },
    THREADS,
  ],
  validate_fd: [
    { name: 'lhs', label: 'lhs columns', type: 'columns', required: true },
    { name: 'rhs', label: 'rhs column', type: 'column', required: true },
    {
      name: 'error_threshold',
      label: 'holding threshold',
      type: 'number',
      min: 0,
      max: 1,
      maxExclusive: true,
      default: '0',
    },
  ],
  validate_mfd: [
    { name: 'lhs', label: 'lhs columns', type: 'columns', required: true },
    { name: 'rhs', label: 'rhs columns', type: 'columns', required: true },
    {
      name: 'metric',
      label: 'metric',
      type: 'choice',
      choices: ['absolute-difference', 'euclidean', 'levenshtein'],
      default: 'absolute-difference',
    },
    { name: 'delta', label: 'delta', type: 'number', min: 0, required: true },
  ],
  discover_ind: [],
  validate_ind: [
    { name: 'dependent', label: 'dependent (table.column)', type: 'text', required: true },
    { name: 'referenced', label: 'referenced (table.column)', type: 'text', required: true },
    { name: 'limit', label: 'missing-value sample size', type: 'integer', min: 1, default: '10' },
  ],
  mine_rules: [
    {
      name: 'min_support',
      label: 'min support',
      type: 'number',
      min: 0,
      max: 1,
      minExclusive: true,
      required: true,
      default: '0.3',
    },
    {
      name: 'min_confidence',
      label: 'min confidence',
      type: 'number',
      min: 0,
      max: 1,
      minExclusive: true,
      default: '0.7',
    },
    {
      name: 'algorithm',
      label: 'algorithm',
      type: 'choice',
      choices: ['apriori', 'fpgrowth'],
      default: 'apriori',
    },
    {
      name: 'layout',
      label: 'transaction layout',
      type: 'choice',
      choices: ['singular', 'tabular'],
      default: 'singular',
    },
  ],
  profile_stats: [],
  typo_pipeline: [
    {
      name: 'error_threshold',
      label: 'almost-holding threshold',
      type: 'number',
      min: 0,
      max: 1,
      minExclusive: true,
      maxExclusive: true,
      required: true,
      default: '0.1',
    },
    { name: 'max_lhs', label: 'max lhs size', type: 'integer', min: 1, default: '2' },
    {
      name: 'min_cluster_size',
      label: 'min cluster size',
      type: 'integer',
      min: 2,
      default: '2',
    },
    {
      name: 'max_clusters_shown',
      label: 'max clusters shown',
      type: 'integer',
      min: 1,
      default: '50',
    },
  ],
  apply_fixes: [],
}

export const MULTI_DATASET_KINDS: TaskKind[] = ['discover_ind', 'validate_ind']

export interface FormModel {
  kind: TaskKind
  datasetIds: string[]
  values: Record<string, string>
}

export interface FieldError {
  field: string
  message: string
}

function checkNumeric(field: ParamField, raw: string): string | null {
  const value = Number(raw)
  if (!Number.isFinite(value)) return `${field.label} must be a number`
  if (field.type === 'integer' && !Number.isInteger(value))
    return `${field.label} must be an integer`
  if (field.min !== undefined) {
    if (value < field.min || (field.minExclusive && value === field.min))
      return `${field.label} must be ${field.minExclusive ? '>' : '>='} ${field.min}`
  }
  if (field.max !== undefined) {
    if (value > field.max || (field.maxExclusive && value === field.max))
      return `${field.label} must be ${field.maxExclusive ? '<' : '<='} ${field.max}`
  }
  return null
}

export function validateForm(model: FormModel): FieldError[] {
  const errors: FieldError[] = []
  if (model.datasetIds.length === 0 || model.datasetIds.some((d) => !d)) {
    errors.push({ field: 'dataset', message: 'select a dataset' })
  }
  for (const field of KIND_FIELDS[model.kind]) {
    const raw = (model.values[field.name] ?? '').trim()
    if (!raw) {
      if (field.required) errors.push({ field: field.name, message: `${field.label} is required` })
      continue
    }
    if (field.type === 'number' || field.type === 'integer') {
      const problem = checkNumeric(field, raw)
      if (problem) errors.push({ field: field.name, message: problem })
    } else if (field.type === 'choice' && field.choices && !field.choices.includes(raw)) {
      errors.push({ field: field.name, message: `${field.label} must be one of ${field.choices.join(', ')}` })
    } else if (field.type === 'text' && field.name !== 'name' && ['dependent', 'referenced'].includes(field.name)) {
      if (!raw.includes('.')) {
        errors.push({ field: field.name, message: `${field.label} must look like table.column` })
      }
    }
  }
  if (model.kind === 'validate_fd' || model.kind === 'validate_mfd') {
    const lhs = splitColumns(model.values['lhs'] ?? '')
    const rhs =
      model.kind === 'validate_fd'
        ? [(model.values['rhs'] ?? '').trim()].filter(Boolean)
        : splitColumns(model.values['rhs'] ?? '')
    const overlap = lhs.filter((c) => rhs.includes(c))
    if (overlap.length > 0) {
      errors.push({ field: 'rhs', message: `rhs must not appear in lhs (${overlap.join(', ')})` })
    }
  }
  return errors
}

export function splitColumns(raw: string): string[] {
  return raw
    .split(',')
    .map((c) => c.trim())
    .filter((c) => c.length > 0)
}

/** Build the JSON task spec the engine expects from a validated form. */
export function buildSpec(model: FormModel): {
  kind: TaskKind
  dataset_ids: string[]
  params: Record<string, unknown>
} {
  const params: Record<string, unknown> = {}
  for (const field of KIND_FIELDS[model.kind]) {
    const raw = (model.values[field.name] ?? '').trim()
    if (!raw) continue
    switch (field.type) {
      case 'number':
        params[field.name] = Number(raw)
        break
      case 'integer':
        params[field.name] = Number(raw)
        break
      case 'columns':
        params[field.name] = splitColumns(raw)
        break
      case 'column':
        params[field.name] = raw
        break
      case 'text':
        if (field.name === 'dependent' || field.name === 'referenced') {
          const [table, column] = raw.split('.', 2)
          params[field.name] = { table, column }
        } else {
          params[field.name] = raw
        }
        break
      case 'choice':
        params[field.name] = raw
        break
    }
  }
  return { kind: model.kind, dataset_ids: model.datasetIds, params }
}
