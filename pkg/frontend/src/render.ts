// Small DOM helpers; no framework, no virtual DOM.

type Child = Node | string | null | undefined

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | boolean | ((event: Event) => void)> = {},
  ...children: Child[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag)
  for (const [key, value] of Object.entries(attrs)) {
    if (typeof value === 'function') {
      node.addEventListener(key.replace(/^on/, ''), value)
    } else if (typeof value === 'boolean') {
      if (value) node.setAttribute(key, '')
      ;(node as unknown as Record<string, unknown>)[key] = value
    } else {
      node.setAttribute(key, value)
    }
  }
  for (const child of children) {
    if (child === null || child === undefined) continue
    node.append(child instanceof Node ? child : document.createTextNode(child))
  }
  return node
}

export function clear(node: HTMLElement): void {
  while (node.firstChild) node.removeChild(node.firstChild)
}

export function cellText(value: string | null): string {
  return value === null ? '∅' : value === '' ? '""' : value
}

export function table(headers: string[], rows: Child[][]): HTMLTableElement {
  return el(
    'table',
    { class: 'grid' },
    el('thead', {}, el('tr', {}, ...headers.map((h) => el('th', {}, h)))),
    el(
      'tbody',
      {},
      ...rows.map((cells) => el('tr', {}, ...cells.map((c) => el('td', {}, c)))),
    ),
  )
}

export function progressBar(fraction: number): HTMLElement {
  const percent = Math.round(fraction * 100)
  const bar = el('div', { class: 'progress' }, el('div', { class: 'progress-fill' }))
  const fill = bar.firstChild as HTMLElement
  fill.style.width = `${percent}%`
  bar.setAttribute('data-progress', String(percent))
  bar.append(el('span', { class: 'progress-label' }, `${percent}%`))
  return bar
}

export function banner(kind: 'error' | 'info' | 'success', ...children: Child[]): HTMLElement {
  return el('div', { class: `banner banner-${kind}`, role: 'alert' }, ...children)
}
