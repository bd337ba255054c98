// Task progress polling: 1 s base interval with multiplicative backoff,
// reset on state changes so short tasks stay snappy.

import type { ApiClient } from './api.js'
import type { TaskStatus } from './types.js'

export interface PollOptions {
  intervalMs?: number
  backoffFactor?: number
  maxIntervalMs?: number
  onUpdate?: (status: TaskStatus) => void
  sleep?: (ms: number) => Promise<void>
  maxWaitMs?: number
}

const defaultSleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms))

export const TERMINAL_STATES = ['done', 'failed', 'cancelled'] as const

export async function pollTask(
  api: ApiClient,
  taskId: string,
  options: PollOptions = {},
): Promise<TaskStatus> {
  const base = options.intervalMs ?? 1000
  const factor = options.backoffFactor ?? 1.5
  const cap = options.maxIntervalMs ?? 5000
  const sleep = options.sleep ?? defaultSleep
  const deadline = options.maxWaitMs !== undefined ? Date.now() + options.maxWaitMs : null

  let interval = base
  let lastState: string | null = null
  for (;;) {
    const status = await api.taskStatus(taskId)
    options.onUpdate?.(status)
    if ((TERMINAL_STATES as readonly string[]).includes(status.state)) {
      return status
    }
    if (deadline !== null && Date.now() > deadline) {
      return status
    }
    if (status.state !== lastState) {
      interval = base
      lastState = status.state
    }
    await sleep(interval)
    interval = Math.min(interval * factor, cap)
  }
}
