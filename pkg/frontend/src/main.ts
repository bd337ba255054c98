// Application bootstrap: hash router plus one render function per view.
// All state that defines a view (task id, sort, filter, page) lives in
// the hash, so every screen is a deep link.

import { ApiClient, ApiError } from './api.js'
import { ClusterViewModel } from './clusterView.js'
import { pollTask } from './polling.js'
import { banner, cellText, clear, el, progressBar, table } from './render.js'
import {
  buildSpec,
  FormModel,
  KIND_FIELDS,
  MULTI_DATASET_KINDS,
  RUNNABLE_KINDS,
  validateForm,
} from './taskForm.js'
import type { ResultPageData, TaskKind, TypoClusterPayload } from './types.js'
import { buildHash, parseHash, ViewState } from './viewState.js'

export interface AppOptions {
  apiBase?: string
  root?: HTMLElement
  window?: Window
  pollIntervalMs?: number
}

export class App {
  readonly api: ApiClient
  private root: HTMLElement
  private win: Window
  private pollIntervalMs: number
  private renderToken = 0

  constructor(options: AppOptions = {}) {
    this.api = new ApiClient(options.apiBase ?? '')
    this.win = options.window ?? window
    this.root = options.root ?? (this.win.document.getElementById('app') as HTMLElement)
    this.pollIntervalMs = options.pollIntervalMs ?? 1000
    this.win.addEventListener('hashchange', () => void this.renderCurrent())
  }

  start(): Promise<void> {
    if (!this.win.location.hash) {
      this.win.location.hash = '#/datasets'
    }
    return this.renderCurrent()
  }

  navigate(state: ViewState): Promise<void> {
    const hash = buildHash(state)
    if (this.win.location.hash === hash) return this.renderCurrent()
    this.win.location.hash = hash // hashchange listener re-renders
    return this.renderCurrent()
  }

  async renderCurrent(): Promise<void> {
    const token = ++this.renderToken
    const state = parseHash(this.win.location.hash)
    const doc = this.win.document
    clear(this.root)
    const header = el(
      'header',
      {},
      el('h1', {}, 'pattern profiler'),
      el(
        'nav',
        {},
        el('a', { href: '#/datasets' }, 'datasets'),
        ' · ',
        el('a', { href: '#/task' }, 'new task'),
      ),
    )
    const body = el('main', { id: 'view' })
    this.root.append(header, body)
    try {
      switch (state.view) {
        case 'datasets':
          if (state.id) await this.renderSnippet(body, state.id)
          else await this.renderDatasets(body)
          break
        case 'task':
          await this.renderTaskForm(body, state)
          break
        case 'tasks':
          if (!state.id) throw new ApiError('VALIDATION_ERROR', 'missing task id', 0)
          if (state.query['results'] === '1') await this.renderResults(body, state)
          else await this.renderProgress(body, state.id, token)
          break
        default:
          body.append(banner('error', `unknown view ${state.view}`))
      }
    } catch (error) {
      body.append(errorBanner(error))
    }
    doc.title = `profiler – ${state.view}`
  }

  // -- datasets ----------------------------------------------------------

  private async renderDatasets(body: HTMLElement): Promise<void> {
    const { datasets } = await this.api.listDatasets()
    body.append(el('h2', {}, 'dataset library'))
    body.append(
      table(
        ['name', 'id', 'origin', 'rows', 'columns', ''],
        datasets.map((d) => [
          d.name,
          el('code', {}, d.dataset_id),
          d.origin === 'revision' ? `revision of ${d.parent_id}` : d.origin,
          String(d.row_count),
          String(d.column_count),
          el(
            'span',
            {},
            el('a', { href: `#/datasets/${encodeURIComponent(d.dataset_id)}` }, 'snippet'),
            ' · ',
            el(
              'a',
              { href: `#/task?dataset=${encodeURIComponent(d.dataset_id)}` },
              'run task',
            ),
          ),
        ]),
      ),
    )
    body.append(this.uploadForm())
  }

  private uploadForm(): HTMLElement {
    const name = el('input', { id: 'upload-name', placeholder: 'dataset name' })
    const separator = el('input', { id: 'upload-separator', value: ',', size: '2' })
    const hasHeader = el('input', { id: 'upload-has-header', type: 'checkbox' })
    hasHeader.checked = true
    const text = el('textarea', {
      id: 'upload-text',
      rows: '6',
      placeholder: 'paste CSV content here, or choose a file below',
    })
    const file = el('input', { id: 'upload-file', type: 'file', accept: '.csv,text/csv' })
    file.addEventListener('change', () => {
      const chosen = file.files && file.files[0]
      if (!chosen) return
      const reader = new FileReader()
      reader.onload = () => {
        text.value = String(reader.result ?? '')
        if (!name.value) name.value = chosen.name.replace(/\.csv$/i, '')
      }
      reader.readAsText(chosen)
    })
    const message = el('div', { id: 'upload-message' })
    const submit = el('button', { id: 'upload-submit' }, 'upload')
    submit.addEventListener('click', () => {
      void (async () => {
        message.replaceChildren()
        if (!text.value.trim() || !name.value.trim()) {
          message.append(banner('error', 'a name and CSV content are required'))
          return
        }
        try {
          const entry = await this.api.uploadDataset({
            name: name.value.trim(),
            csvText: text.value,
            separator: separator.value || ',',
            hasHeader: hasHeader.checked,
          })
          await this.renderCurrent() // refresh the library table
          this.win.document
            .getElementById('upload-message')
            ?.append(banner('success', `uploaded ${entry.name} as ${entry.dataset_id}`))
        } catch (error) {
          message.append(errorBanner(error))
        }
      })()
    })
    return el(
      'section',
      { id: 'upload', class: 'card' },
      el('h3', {}, 'upload a CSV'),
      el('div', {}, el('label', {}, 'name '), name),
      el('div', {}, el('label', {}, 'separator '), separator),
      el('div', {}, el('label', {}, 'has header '), hasHeader),
      el('div', {}, text),
      el('div', {}, file),
      el('div', {}, submit),
      message,
    )
  }

  private async renderSnippet(body: HTMLElement, datasetId: string): Promise<void> {
    const snippet = await this.api.snippet(datasetId)
    body.append(
      el('h2', {}, `snippet of ${datasetId}`),
      el('p', {}, `${snippet.row_count} rows; showing the first ${snippet.rows.length}`),
      table(
        snippet.columns,
        snippet.rows.map((row) => row.map((value) => cellText(value))),
      ),
      el('p', {}, el('a', { href: `#/task?dataset=${encodeURIComponent(datasetId)}` }, 'run a task on this dataset')),
    )
  }

  // -- task form ---------------------------------------------------------

  private async renderTaskForm(body: HTMLElement, state: ViewState): Promise<void> {
    const { datasets } = await this.api.listDatasets()
    const kind = (state.query['kind'] as TaskKind) || 'discover_fd'
    const preselected = state.query['dataset'] ?? datasets[0]?.dataset_id ?? ''

    body.append(el('h2', {}, 'configure a task'))
    const kindSelect = el('select', { id: 'form-kind' })
    for (const k of RUNNABLE_KINDS) {
      const option = el('option', { value: k }, k)
      if (k === kind) option.selected = true
      kindSelect.append(option)
    }
    kindSelect.addEventListener('change', () => {
      void this.navigate({
        view: 'task',
        query: { ...state.query, kind: kindSelect.value },
      })
    })

    const datasetSelects: HTMLSelectElement[] = []
    const datasetBox = el('div', { id: 'form-datasets' })
    const addDatasetSelect = (value: string) => {
      const select = el('select', { class: 'dataset-select' })
      for (const d of datasets) {
        const option = el('option', { value: d.dataset_id }, `${d.name} (${d.dataset_id})`)
        if (d.dataset_id === value) option.selected = true
        select.append(option)
      }
      select.addEventListener('change', refresh)
      datasetSelects.push(select)
      datasetBox.append(el('div', {}, el('label', {}, 'dataset '), select))
    }
    addDatasetSelect(preselected)
    if (MULTI_DATASET_KINDS.includes(kind)) {
      const more = el('button', { id: 'form-add-dataset', type: 'button' }, 'add dataset')
      more.addEventListener('click', () => {
        addDatasetSelect(datasets[0]?.dataset_id ?? '')
        refresh()
      })
      datasetBox.append(more)
    }

    const inputs = new Map<string, HTMLInputElement | HTMLSelectElement>()
    const fieldBox = el('div', { id: 'form-fields' })
    for (const field of KIND_FIELDS[kind]) {
      let input: HTMLInputElement | HTMLSelectElement
      if (field.type === 'choice') {
        input = el('select', { id: `param-${field.name}` })
        for (const choice of field.choices ?? []) {
          const option = el('option', { value: choice }, choice)
          if (choice === (field.default ?? '')) option.selected = true
          input.append(option)
        }
      } else {
        input = el('input', {
          id: `param-${field.name}`,
          value: field.default ?? '',
          placeholder: field.type === 'columns' ? 'comma-separated column names' : '',
        })
      }
      input.addEventListener('input', refresh)
      input.addEventListener('change', refresh)
      inputs.set(field.name, input)
      fieldBox.append(el('div', {}, el('label', { for: `param-${field.name}` }, `${field.label} `), input))
    }

    const errorsBox = el('ul', { id: 'form-errors', class: 'field-errors' })
    const submit = el('button', { id: 'form-submit' }, 'run')
    const message = el('div', { id: 'form-message' })

    const model = (): FormModel => ({
      kind,
      datasetIds: datasetSelects.map((s) => s.value),
      values: Object.fromEntries([...inputs.entries()].map(([k, input]) => [k, input.value])),
    })

    function refresh(): void {
      const errors = validateForm(model())
      errorsBox.replaceChildren(
        ...errors.map((e) => el('li', { 'data-field': e.field }, e.message)),
      )
      submit.disabled = errors.length > 0
    }

    submit.addEventListener('click', () => {
      void (async () => {
        message.replaceChildren()
        try {
          const { task_id } = await this.api.submitTask(buildSpec(model()))
          await this.navigate({ view: 'tasks', id: task_id, query: {} })
        } catch (error) {
          message.append(errorBanner(error))
        }
      })()
    })

    body.append(
      el('div', {}, el('label', {}, 'primitive '), kindSelect),
      datasetBox,
      fieldBox,
      errorsBox,
      el('div', {}, submit),
      message,
    )
    refresh()
  }

  // -- progress and results ----------------------------------------------

  private async renderProgress(body: HTMLElement, taskId: string, token: number): Promise<void> {
    body.append(el('h2', {}, `task ${taskId}`))
    const stateLine = el('p', { id: 'task-state' }, 'polling…')
    const barBox = el('div', { id: 'task-progress' }, progressBar(0))
    const cancel = el('button', { id: 'task-cancel' }, 'cancel')
    cancel.addEventListener('click', () => {
      void this.api.cancelTask(taskId).catch(() => undefined)
    })
    body.append(stateLine, barBox, el('div', {}, cancel))

    const status = await pollTask(this.api, taskId, {
      intervalMs: this.pollIntervalMs,
      onUpdate: (s) => {
        if (token !== this.renderToken) return
        stateLine.textContent = `state: ${s.state}`
        barBox.replaceChildren(progressBar(s.progress))
      },
    })
    if (token !== this.renderToken) return // user navigated away mid-poll
    if (status.state === 'done') {
      await this.navigate({ view: 'tasks', id: taskId, query: { results: '1' } })
      return
    }
    cancel.disabled = true
    if (status.state === 'failed') {
      body.append(
        banner(
          'error',
          `task failed [${status.error_code ?? 'INTERNAL'}]: ${status.error_message ?? ''}`,
        ),
      )
    } else {
      body.append(banner('info', 'task cancelled'))
    }
  }

  private async renderResults(body: HTMLElement, state: ViewState): Promise<void> {
    const taskId = state.id as string
    const sort = state.query['sort'] ?? ''
    const filter = state.query['filter'] ?? ''
    const page = Number(state.query['page'] ?? '0')
    const data = await this.api.taskResult(taskId, {
      sort: sort || undefined,
      filter: filter || undefined,
      page,
      pageSize: 50,
    })

    body.append(el('h2', {}, `results of ${taskId} (${data.kind})`))
    body.append(this.summaryLine(data))
    body.append(this.resultControls(state, sort, filter, page, data))

    if (data.kind === 'typo_pipeline') {
      this.renderTypoClusters(body, data)
    } else if (data.kind === 'validate_mfd') {
      this.renderMfdClusters(body, data)
    } else {
      body.append(
        table(
          ['#', 'instance'],
          data.items.map((item, i) => [String(page * 50 + i + 1), item.text]),
        ),
      )
    }
  }

  private summaryLine(data: ResultPageData): HTMLElement {
    const parts = Object.entries(data.summary).map(([k, v]) => `${k}=${JSON.stringify(v)}`)
    return el(
      'p',
      { id: 'result-summary' },
      `${data.total_count} item(s)` + (parts.length ? ` · ${parts.join(' · ')}` : ''),
    )
  }

  private resultControls(
    state: ViewState,
    sort: string,
    filter: string,
    page: number,
    data: ResultPageData,
  ): HTMLElement {
    const sortInput = el('input', { id: 'result-sort', value: sort, placeholder: 'sort key, -key for desc' })
    const filterInput = el('input', { id: 'result-filter', value: filter, placeholder: 'regex filter' })
    const apply = el('button', { id: 'result-apply' }, 'apply')
    apply.addEventListener('click', () => {
      void this.navigate({
        view: 'tasks',
        id: state.id,
        query: { results: '1', sort: sortInput.value, filter: filterInput.value, page: '0' },
      })
    })
    const pager = el('span', { class: 'pager' })
    const pages = Math.max(1, Math.ceil(data.total_count / data.page_size))
    if (page > 0) {
      const prev = el('a', { href: '#', id: 'result-prev' }, '← prev')
      prev.addEventListener('click', (e) => {
        e.preventDefault()
        void this.navigate({
          view: 'tasks',
          id: state.id,
          query: { results: '1', sort, filter, page: String(page - 1) },
        })
      })
      pager.append(prev, ' ')
    }
    pager.append(`page ${page + 1}/${pages}`)
    if ((page + 1) * data.page_size < data.total_count) {
      const next = el('a', { href: '#', id: 'result-next' }, 'next →')
      next.addEventListener('click', (e) => {
        e.preventDefault()
        void this.navigate({
          view: 'tasks',
          id: state.id,
          query: { results: '1', sort, filter, page: String(page + 1) },
        })
      })
      pager.append(' ', next)
    }
    return el(
      'div',
      { class: 'controls' },
      el('label', {}, 'sort '),
      sortInput,
      el('label', {}, ' filter '),
      filterInput,
      apply,
      ' ',
      pager,
    )
  }

  private renderMfdClusters(body: HTMLElement, data: ResultPageData): void {
    for (const item of data.items) {
      const payload = item as unknown as {
        lhs_value: (string | null)[]
        points: { row: number; values: (string | null)[]; is_outlier: boolean; distance: number | null }[]
        outlier_count: number
      }
      body.append(
        el(
          'section',
          { class: 'card mfd-cluster' },
          el('h3', {}, `cluster lhs=(${payload.lhs_value.map(cellText).join(', ')})`),
          table(
            ['', 'row', 'values', 'nearest distance'],
            payload.points.map((p) => [
              p.is_outlier ? el('strong', { class: 'outlier-mark' }, 'x') : '',
              String(p.row),
              p.values.map(cellText).join(', '),
              p.distance === null ? 'inf' : String(p.distance),
            ]),
          ),
        ),
      )
    }
  }

  private renderTypoClusters(body: HTMLElement, data: ResultPageData): void {
    const datasetId = String(data.summary['dataset_id'] ?? '')
    data.items.forEach((item, index) => {
      const payload = item as unknown as TypoClusterPayload
      const model = new ClusterViewModel(payload)
      const card = el('section', { class: 'card typo-cluster', 'data-cluster': String(index) })
      card.append(
        el(
          'h3',
          {},
          `${payload.fd.lhs.join(', ') || '∅'} → ${payload.fd.rhs} ` +
            `(error=${payload.fd.error}, suspicion=${payload.suspicion_score})`,
        ),
        el(
          'p',
          {},
          `cluster lhs=(${payload.cluster.lhs_value.map(cellText).join(', ')}), ` +
            `majority value: ${cellText(payload.cluster.majority_rhs)}`,
        ),
      )
      const rowsBox = el('div', {})
      for (const row of model.rows) {
        const line = el(
          'div',
          { class: row.isSuspect ? 'cluster-row suspect' : 'cluster-row' },
          `row ${row.row}: ${cellText(row.value)} `,
        )
        if (row.isSuspect) {
          const choice = el('select', { class: 'fix-choice', 'data-row': String(row.row) })
          choice.append(
            el('option', { value: 'keep' }, 'keep'),
            el('option', { value: 'majority' }, `replace with ${cellText(payload.cluster.majority_rhs)}`),
            el('option', { value: 'custom' }, 'custom…'),
          )
          const custom = el('input', {
            class: 'fix-custom',
            'data-row': String(row.row),
            placeholder: 'replacement',
          })
          custom.style.display = 'none'
          choice.addEventListener('change', () => {
            custom.style.display = choice.value === 'custom' ? '' : 'none'
            model.setChoice(
              row.row,
              choice.value === 'custom'
                ? { action: 'custom', value: custom.value }
                : { action: choice.value as 'keep' | 'majority' },
            )
          })
          custom.addEventListener('input', () => {
            model.setChoice(row.row, { action: 'custom', value: custom.value })
          })
          line.append(choice, custom)
        }
        rowsBox.append(line)
      }
      const allMajority = el('button', { class: 'fix-all-majority' }, 'replace all suspects with majority')
      allMajority.addEventListener('click', () => {
        model.markAllSuspectsMajority()
        for (const select of card.querySelectorAll<HTMLSelectElement>('select.fix-choice')) {
          select.value = 'majority'
        }
      })
      const submit = el('button', { class: 'fix-submit' }, 'apply fixes')
      const message = el('div', { class: 'fix-message' })
      submit.addEventListener('click', () => {
        void (async () => {
          message.replaceChildren()
          const decisions = model.decisions()
          if (decisions.length === 0) {
            message.append(banner('info', 'no changes selected; nothing to apply'))
            return
          }
          try {
            const revision = await this.api.applyFixes(datasetId, decisions)
            message.append(
              banner(
                'success',
                `created revision ${revision.dataset_id}: `,
                el('a', { href: `#/datasets/${encodeURIComponent(revision.dataset_id)}` }, 'view it'),
                ' or ',
                el(
                  'a',
                  {
                    href: `#/task?dataset=${encodeURIComponent(revision.dataset_id)}&kind=typo_pipeline`,
                  },
                  'continue cleaning on the new revision',
                ),
              ),
            )
          } catch (error) {
            if (error instanceof ApiError && error.code === 'STALE_DECISION') {
              const reload = el('a', { href: '#', class: 'stale-reload' }, 'reload the pipeline')
              reload.addEventListener('click', (e) => {
                e.preventDefault()
                void this.renderCurrent()
              })
              message.append(
                banner('error', 'these rows were already fixed in a newer revision: ', reload),
              )
            } else {
              message.append(errorBanner(error))
            }
          }
        })()
      })
      card.append(rowsBox, el('div', {}, allMajority, ' ', submit), message)
      body.append(card)
    })
  }
}

function errorBanner(error: unknown): HTMLElement {
  if (error instanceof ApiError) {
    return banner('error', `[${error.code}] ${error.message}`)
  }
  return banner('error', String(error))
}

export function bootstrap(options: AppOptions = {}): App {
  const app = new App(options)
  void app.start()
  return app
}

declare global {
  interface Window {
    __PROFILER_NO_AUTOSTART__?: boolean
  }
}

if (typeof window !== 'undefined' && !window.__PROFILER_NO_AUTOSTART__) {
  window.addEventListener('DOMContentLoaded', () => {
    bootstrap()
  })
}
