// Hash-based view state. Sorting, filtering and paging live in the URL
// so result views are deep-linkable and the back button works.

export interface ViewState {
  view: string
  id?: string
  query: Record<string, string>
}

export function parseHash(hash: string): ViewState {
  const raw = hash.startsWith('#') ? hash.slice(1) : hash
  const [pathPart, queryPart] = raw.split('?', 2)
  const segments = (pathPart ?? '').split('/').filter((s) => s.length > 0)
  const query: Record<string, string> = {}
  if (queryPart) {
    for (const [key, value] of new URLSearchParams(queryPart)) {
      query[key] = value
    }
  }
  if (segments.length === 0) return { view: 'datasets', query }
  const [head, id] = segments
  return { view: head, id, query }
}

export function buildHash(state: ViewState): string {
  let path = `#/${state.view}`
  if (state.id) path += `/${encodeURIComponent(state.id)}`
  const entries = Object.entries(state.query).filter(([, v]) => v !== '')
  if (entries.length > 0) {
    const params = new URLSearchParams()
    for (const [key, value] of entries) params.set(key, value)
    path += `?${params}`
  }
  return path
}
