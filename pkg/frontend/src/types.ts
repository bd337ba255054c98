// Wire types mirroring the engine's JSON responses.

export type TaskKind =
  | 'discover_fd'
  | 'validate_fd'
  | 'validate_mfd'
  | 'discover_ind'
  | 'validate_ind'
  | 'mine_rules'
  | 'profile_stats'
  | 'typo_pipeline'
  | 'apply_fixes'

export type TaskState = 'queued' | 'running' | 'done' | 'failed' | 'cancelled'

export interface DatasetEntry {
  dataset_id: string
  name: string
  origin: 'built-in' | 'uploaded' | 'revision'
  parent_id: string | null
  separator: string
  has_header: boolean
  null_mode: string
  row_count: number
  column_count: number
  size_bytes: number
  created_at: number
  modified_rows: number[]
}

export interface Snippet {
  dataset_id: string
  columns: string[]
  rows: (string | null)[][]
  row_count: number
}

export interface TaskStatus {
  task_id: string
  state: TaskState
  progress: number
  error_message: string | null
  error_code: string | null
  submitted_at: number
  started_at: number | null
  finished_at: number | null
}

export interface ResultItem {
  text: string
  [key: string]: unknown
}

export interface ResultPageData {
  kind: TaskKind
  summary: Record<string, unknown>
  total_count: number
  items: ResultItem[]
  sort: string | null
  filter: string | null
  page: number
  page_size: number
}

export interface TypoClusterPayload extends ResultItem {
  fd: {
    lhs: string[]
    rhs: string
    lhs_indexes: number[]
    rhs_index: number
    error: number
  }
  cluster: {
    lhs_value: (string | null)[]
    rows: { row: number; value: string | null }[]
    majority_rhs: string | null
    majority_count: number
  }
  suspect_rows: { row: number; value: string | null }[]
  suspicion_score: number
}

export interface FixDecision {
  row: number
  column: number
  replacement?: string | null
  keep?: boolean
}
