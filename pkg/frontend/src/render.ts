// DOM builders. Ordering contract: cells appear exactly in the order the
// response lists them -- the UI never re-sorts hits.

import { DanteHit, DetailResponse, HitEntry, ResultsResponse, isDante } from './types.js'

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag)
  if (className) node.className = className
  if (text !== undefined) node.textContent = text
  return node
}

function timeLabel(seconds: number): string {
  const m = Math.floor(seconds / 60)
  const s = Math.floor(seconds % 60)
  return `${String(m).padStart(2, '0')}:${String(s).padStart(2, '0')}`
}

export function renderCell(entry: HitEntry, onOpen: (keyframeId: number) => void): HTMLElement {
  const cell = el('div', 'cell')
  cell.dataset.keyframeId = String(entry.keyframe_id)

  const img = el('img', 'thumb')
  img.src = entry.image_path
  img.alt = `keyframe ${entry.keyframe_id}`
  img.onerror = () => {
    img.remove()
    cell.prepend(el('div', 'thumb placeholder', `#${entry.keyframe_id}`))
  }
  cell.appendChild(img)

  const caption = el('div', 'caption', `${entry.video_id} · ${timeLabel(entry.timestamp_s)}`)
  if (entry.score !== undefined) {
    caption.title = `score ${entry.score.toFixed(4)}`
    caption.appendChild(el('span', 'score', entry.score.toFixed(3)))
  }
  cell.appendChild(caption)
  cell.addEventListener('click', () => onOpen(entry.keyframe_id))
  return cell
}

export function renderGrid(hits: HitEntry[], onOpen: (keyframeId: number) => void): HTMLElement {
  const grid = el('div', 'grid')
  for (const hit of hits) {
    grid.appendChild(renderCell(hit, onOpen))
  }
  if (!hits.length) {
    grid.appendChild(el('div', 'empty', 'No results.'))
  }
  return grid
}

export function renderDanteStrips(
  hits: DanteHit[],
  onOpen: (keyframeId: number) => void,
): HTMLElement {
  const list = el('div', 'strips')
  for (const hit of hits) {
    const strip = el('div', 'strip')
    strip.dataset.videoId = hit.video_id
    const head = el('div', 'strip-head', `${hit.video_id} · score ${hit.score.toFixed(4)}`)
    if (hit.group) head.appendChild(el('span', 'group-tag', hit.group))
    strip.appendChild(head)
    const lane = el('div', 'lane')
    hit.path.forEach((entry, index) => {
      const wrapped = el('div', 'lane-item')
      wrapped.appendChild(el('div', 'event-no', `E${index + 1}`))
      wrapped.appendChild(renderCell(entry, onOpen))
      lane.appendChild(wrapped)
    })
    strip.appendChild(lane)
    list.appendChild(strip)
  }
  if (!hits.length) {
    list.appendChild(el('div', 'empty', 'No feasible video.'))
  }
  return list
}

export function renderResults(
  results: ResultsResponse,
  onOpen: (keyframeId: number) => void,
): HTMLElement {
  const container = el('div', 'results')
  if (!isDante(results) && results.rewrite) {
    const note = results.rewrite.used_fallback
      ? 'enhancer unavailable; searched the original query'
      : `enhanced query: “${results.rewrite.rewritten_query}”`
    container.appendChild(el('div', 'rewrite-note', note))
  }
  container.appendChild(
    isDante(results) ? renderDanteStrips(results.hits, onOpen) : renderGrid(results.hits, onOpen),
  )
  return container
}

export function renderDetail(
  detail: DetailResponse,
  handlers: {
    onFindSimilar: (keyframeId: number) => void
    onClose: () => void
    onJump: (keyframeId: number) => void
  },
): HTMLElement {
  const pane = el('div', 'detail')
  pane.dataset.keyframeId = String(detail.keyframe.keyframe_id)

  const close = el('button', 'close', '×')
  close.addEventListener('click', handlers.onClose)
  pane.appendChild(close)

  pane.appendChild(renderCell(detail.keyframe, () => undefined))

  const meta = el('dl', 'meta')
  const rows: [string, string][] = [
    ['keyframe', String(detail.keyframe.keyframe_id)],
    ['video', detail.keyframe.video_id],
    ['frame', String(detail.keyframe.frame_number)],
    ['time', `${detail.keyframe.timestamp_s.toFixed(3)} s`],
    ['group', detail.group ?? '(none)'],
  ]
  for (const [k, v] of rows) {
    meta.appendChild(el('dt', undefined, k))
    meta.appendChild(el('dd', undefined, v))
  }
  pane.appendChild(meta)

  const ocr = el('div', 'ocr')
  ocr.appendChild(el('h4', undefined, 'OCR text'))
  ocr.appendChild(el('p', undefined, detail.keyframe.ocr_text || '(none)'))
  pane.appendChild(ocr)

  const actions = el('div', 'actions')
  const play = el('a', 'button-like', 'Play')
  play.href = detail.player_url
  play.target = '_blank'
  play.rel = 'noopener'
  actions.appendChild(play)

  const similar = el('button', undefined, 'Find similar')
  similar.className = 'find-similar'
  similar.addEventListener('click', () => handlers.onFindSimilar(detail.keyframe.keyframe_id))
  actions.appendChild(similar)

  for (const [label, neighbor] of [['◀ prev', detail.prev], ['next ▶', detail.next]] as const) {
    const btn = el('button', 'neighbor', label)
    if (neighbor === null) {
      btn.disabled = true
    } else {
      btn.addEventListener('click', () => handlers.onJump(neighbor.keyframe_id))
    }
    actions.appendChild(btn)
  }
  pane.appendChild(actions)
  return pane
}

export function renderError(message: string): HTMLElement {
  return el('div', 'error-banner', message)
}
