// Typed client for the engine HTTP API. The UI never computes a number
// itself; everything rendered comes back from these calls.

import type {
  DatasetEntry,
  FixDecision,
  ResultPageData,
  Snippet,
  TaskStatus,
} from './types.js'

export class ApiError extends Error {
  code: string
  status: number

  constructor(code: string, message: string, status: number) {
    super(message)
    this.code = code
    this.status = status
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let code = 'INTERNAL'
  let message = `${response.status} ${response.statusText}`
  try {
    const body = await response.json()
    if (body && body.error) {
      code = body.error.code ?? code
      message = body.error.message ?? message
    }
  } catch {
    // non-JSON error body; keep the status line
  }
  return new ApiError(code, message, response.status)
}

export interface UploadParams {
  name: string
  csvText: string
  separator?: string
  hasHeader?: boolean
  nullMode?: string
}

export class ApiClient {
  constructor(private base: string = '') {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.base + path, init)
    if (!response.ok) {
      throw await parseError(response)
    }
    return (await response.json()) as T
  }

  listDatasets(): Promise<{ datasets: DatasetEntry[] }> {
    return this.request('/api/datasets')
  }

  snippet(datasetId: string): Promise<Snippet> {
    return this.request(`/api/datasets/${encodeURIComponent(datasetId)}/snippet`)
  }

  // Multipart body is assembled by hand so the same code runs in the
  // browser and under the jsdom/node test stack.
  uploadDataset(params: UploadParams): Promise<DatasetEntry> {
    const boundary = '----profiler' + Math.random().toString(16).slice(2)
    const fields: [string, string][] = [
      ['name', params.name],
      ['separator', params.separator ?? ','],
      ['has_header', String(params.hasHeader ?? true)],
      ['null_mode', params.nullMode ?? 'null-equal'],
    ]
    const parts: string[] = []
    parts.push(
      `--${boundary}\r\n` +
        `Content-Disposition: form-data; name="file"; filename="${params.name}.csv"\r\n` +
        'Content-Type: text/csv\r\n\r\n' +
        params.csvText +
        '\r\n',
    )
    for (const [key, value] of fields) {
      parts.push(
        `--${boundary}\r\nContent-Disposition: form-data; name="${key}"\r\n\r\n${value}\r\n`,
      )
    }
    parts.push(`--${boundary}--\r\n`)
    return this.request('/api/datasets', {
      method: 'POST',
      headers: { 'Content-Type': `multipart/form-data; boundary=${boundary}` },
      body: parts.join(''),
    })
  }

  submitTask(spec: {
    kind: string
    dataset_ids: string[]
    params: Record<string, unknown>
  }): Promise<{ task_id: string }> {
    return this.request('/api/tasks', {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(spec),
    })
  }

  taskStatus(taskId: string): Promise<TaskStatus> {
    return this.request(`/api/tasks/${encodeURIComponent(taskId)}`)
  }

  taskResult(
    taskId: string,
    options: { sort?: string; filter?: string; page?: number; pageSize?: number } = {},
  ): Promise<ResultPageData> {
    const query = new URLSearchParams()
    if (options.sort) query.set('sort', options.sort)
    if (options.filter) query.set('filter', options.filter)
    if (options.page !== undefined) query.set('page', String(options.page))
    if (options.pageSize !== undefined) query.set('page_size', String(options.pageSize))
    const suffix = query.toString() ? `?${query}` : ''
    return this.request(`/api/tasks/${encodeURIComponent(taskId)}/result${suffix}`)
  }

  cancelTask(taskId: string): Promise<TaskStatus> {
    return this.request(`/api/tasks/${encodeURIComponent(taskId)}/cancel`, {
      method: 'POST',
    })
  }

  applyFixes(
    datasetId: string,
    decisions: FixDecision[],
    name?: string,
  ): Promise<DatasetEntry> {
    return this.request(`/api/datasets/${encodeURIComponent(datasetId)}/fixes`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(name ? { decisions, name } : { decisions }),
    })
  }
}
