import { describe, expect, it } from 'vitest'

import { buildSpec, FormModel, splitColumns, validateForm } from '../src/taskForm.js'

function model(overrides: Partial<FormModel> = {}): FormModel {
  return {
    kind: 'discover_fd',
    datasetIds: ['ds-1'],
    values: { error_threshold: '0', max_lhs: '3', thread_count: '1' },
    ...overrides,
  }
}

describe('validateForm', () => {
  it('accepts a sane discover_fd form', () => {
    expect(validateForm(model())).toEqual([])
  })

  it('rejects a missing dataset', () => {
    const errors = validateForm(model({ datasetIds: [] }))
    expect(errors.some((e) => e.field === 'dataset')).toBe(true)
  })

  it('mirrors the server threshold range [0, 1)', () => {
    expect(validateForm(model({ values: { error_threshold: '1' } }))).not.toEqual([])
    expect(validateForm(model({ values: { error_threshold: '1.5' } }))).not.toEqual([])
    expect(validateForm(model({ values: { error_threshold: '-0.1' } }))).not.toEqual([])
    expect(validateForm(model({ values: { error_threshold: '0.999' } }))).toEqual([])
  })

  it('requires integers where the server does', () => {
    const errors = validateForm(model({ values: { max_lhs: '2.5' } }))
    expect(errors.some((e) => e.field === 'max_lhs')).toBe(true)
  })

  it('typo pipeline threshold must be strictly positive', () => {
    const errors = validateForm({
      kind: 'typo_pipeline',
      datasetIds: ['ds-1'],
      values: { error_threshold: '0' },
    })
    expect(errors.some((e) => e.field === 'error_threshold')).toBe(true)
  })

  it('mine_rules support range is (0, 1]', () => {
    const ok = validateForm({
      kind: 'mine_rules',
      datasetIds: ['ds-1'],
      values: { min_support: '1' },
    })
    expect(ok).toEqual([])
    const zero = validateForm({
      kind: 'mine_rules',
      datasetIds: ['ds-1'],
      values: { min_support: '0' },
    })
    expect(zero.some((e) => e.field === 'min_support')).toBe(true)
  })

  it('validate_fd requires lhs/rhs and disjointness', () => {
    const missing = validateForm({
      kind: 'validate_fd',
      datasetIds: ['ds-1'],
      values: {},
    })
    expect(missing.some((e) => e.field === 'lhs')).toBe(true)
    expect(missing.some((e) => e.field === 'rhs')).toBe(true)

    const overlapping = validateForm({
      kind: 'validate_fd',
      datasetIds: ['ds-1'],
      values: { lhs: 'city, zip', rhs: 'zip' },
    })
    expect(overlapping.some((e) => e.field === 'rhs')).toBe(true)
  })

  it('validate_ind sides must look like table.column', () => {
    const errors = validateForm({
      kind: 'validate_ind',
      datasetIds: ['ds-1', 'ds-2'],
      values: { dependent: 'orders', referenced: 'customers.id' },
    })
    expect(errors.some((e) => e.field === 'dependent')).toBe(true)
  })
})

describe('buildSpec', () => {
  it('builds typed params from form values', () => {
    const spec = buildSpec(
      model({ values: { error_threshold: '0.05', max_lhs: '4', thread_count: '2' } }),
    )
    expect(spec).toEqual({
      kind: 'discover_fd',
      dataset_ids: ['ds-1'],
      params: { error_threshold: 0.05, max_lhs: 4, thread_count: 2 },
    })
  })

  it('splits column lists and parses table.column pairs', () => {
    expect(splitColumns(' a, b ,c ')).toEqual(['a', 'b', 'c'])
    const spec = buildSpec({
      kind: 'validate_ind',
      datasetIds: ['ds-1', 'ds-2'],
      values: { dependent: 'orders.customer_id', referenced: 'customers.id', limit: '5' },
    })
    expect(spec.params['dependent']).toEqual({ table: 'orders', column: 'customer_id' })
    expect(spec.params['limit']).toBe(5)
  })

  it('omits empty optional fields', () => {
    const spec = buildSpec(model({ values: { error_threshold: '', max_lhs: '3' } }))
    expect(spec.params).toEqual({ max_lhs: 3 })
  })
})
