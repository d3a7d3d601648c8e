import {
  fetchDetail,
  fetchVideos,
  searchDante,
  searchOcr,
  searchSemantic,
  uploadExemplar,
} from './api.js'
import {
  LAMBDA_DEFAULT,
  LAMBDA_MAX,
  LAMBDA_MIN,
  Mode,
  UiState,
  applyError,
  applyResults,
  beginRequest,
  canSubmit,
  closeDetail,
  initialState,
  openDetail,
  pivotToSimilar,
  setLambda,
  setMode,
} from './state.js'
import { renderDetail, renderError, renderResults } from './render.js'
import { VideoInfo } from './types.js'

let state: UiState = initialState()
let videos: VideoInfo[] = []

const $ = <T extends HTMLElement>(id: string): T => {
  const node = document.getElementById(id)
  if (!node) throw new Error(`missing #${id}`)
  return node as T
}

function update(next: UiState): void {
  state = next
  redraw()
}

function currentFilters(): { video_filter?: string[]; group_filter?: string[] } {
  const out: { video_filter?: string[]; group_filter?: string[] } = {}
  if (state.videoIds.length) out.video_filter = state.videoIds
  if (state.groups.length) out.group_filter = state.groups
  return out
}

function submit(anchor?: number): void {
  if (anchor === undefined && !canSubmit(state)) return
  const begun = beginRequest(state)
  const requestId = begun.requestId
  update(begun.state)

  const common = { top_k: state.topK, ...currentFilters() }
  let pending: Promise<Parameters<typeof applyResults>[2]>
  if (anchor !== undefined) {
    pending = searchSemantic({ keyframe_id: anchor, ...common })
  } else if (state.mode === 'semantic') {
    pending = searchSemantic({
      query: state.queryText.trim(),
      enhance: state.enhancerOn,
      ...(state.threshold !== null ? { threshold: state.threshold } : {}),
      ...common,
    })
  } else if (state.mode === 'ocr') {
    pending = searchOcr({ query: state.queryText.trim(), ...common })
  } else {
    pending = searchDante({
      queries: state.danteQueries.map((q) => q.trim()).filter(Boolean),
      lambda: state.lambda,
      enhance: state.enhancerOn,
      ...common,
    })
  }
  pending
    .then((results) => update(applyResults(state, requestId, results)))
    .catch((err) => update(applyError(state, requestId, String(err.message ?? err))))
}

function showDetail(keyframeId: number): void {
  fetchDetail(keyframeId)
    .then((detail) => update(openDetail(state, detail)))
    .catch((err) => update({ ...state, error: `detail: ${err.message ?? err}` }))
}

function findSimilar(keyframeId: number): void {
  update(pivotToSimilar(closeDetail(state)))
  ;($('mode-select') as unknown as HTMLSelectElement).value = 'semantic'
  syncModePanels()
  submit(keyframeId)
}

function redraw(): void {
  const resultsHost = $('results-host')
  resultsHost.replaceChildren()
  if (state.error) resultsHost.appendChild(renderError(state.error))
  if (state.loading) resultsHost.appendChild(renderError('searching…'))
  if (state.results) {
    resultsHost.appendChild(renderResults(state.results, showDetail))
  }

  const detailHost = $('detail-host')
  detailHost.replaceChildren()
  if (state.selected) {
    detailHost.appendChild(
      renderDetail(state.selected, {
        onFindSimilar: findSimilar,
        onClose: () => update(closeDetail(state)),
        onJump: showDetail,
      }),
    )
  }

  ;($('submit') as unknown as HTMLButtonElement).disabled = !canSubmit(state)
}

function syncModePanels(): void {
  $('semantic-inputs').hidden = state.mode === 'dante'
  $('dante-inputs').hidden = state.mode !== 'dante'
  $('lambda-row').hidden = state.mode !== 'dante'
  $('enhancer-row').hidden = state.mode === 'ocr'
  $('threshold-row').hidden = state.mode !== 'semantic'
}

function renderFilterPanel(): void {
  const host = $('filters-host')
  host.replaceChildren()
  const groups = Array.from(new Set(videos.map((v) => v.group).filter((g): g is string => !!g)))
  if (groups.length) {
    const box = document.createElement('fieldset')
    box.appendChild(Object.assign(document.createElement('legend'), { textContent: 'Groups' }))
    for (const group of groups) {
      const label = document.createElement('label')
      const cb = document.createElement('input')
      cb.type = 'checkbox'
      cb.value = group
      cb.addEventListener('change', () => {
        state = {
          ...state,
          groups: cb.checked
            ? [...state.groups, group]
            : state.groups.filter((g) => g !== group),
        }
      })
      label.append(cb, ` ${group}`)
      box.appendChild(label)
    }
    host.appendChild(box)
  }
  const select = document.createElement('select')
  select.multiple = true
  select.size = Math.min(6, videos.length)
  for (const video of videos) {
    const option = document.createElement('option')
    option.value = video.video_id
    option.textContent = `${video.video_id} (${video.keyframes} kf)`
    select.appendChild(option)
  }
  select.addEventListener('change', () => {
    state = { ...state, videoIds: Array.from(select.selectedOptions).map((o) => o.value) }
  })
  const wrap = document.createElement('fieldset')
  wrap.appendChild(Object.assign(document.createElement('legend'), { textContent: 'Videos' }))
  wrap.appendChild(select)
  host.appendChild(wrap)
}

function wireControls(): void {
  const modeSelect = $('mode-select') as unknown as HTMLSelectElement
  modeSelect.addEventListener('change', () => {
    update(setMode(state, modeSelect.value as Mode))
    syncModePanels()
  })

  const queryBox = $('query') as HTMLTextAreaElement
  queryBox.addEventListener('input', () => update({ ...state, queryText: queryBox.value }))
  queryBox.addEventListener('keydown', (ev) => {
    if (ev.key === 'Enter' && !ev.shiftKey) {
      ev.preventDefault()
      submit()
    }
  })

  const danteBox = $('dante-queries') as HTMLTextAreaElement
  danteBox.addEventListener('input', () =>
    update({ ...state, danteQueries: danteBox.value.split('\n') }),
  )

  const topK = $('top-k') as HTMLInputElement
  topK.addEventListener('change', () =>
    update({ ...state, topK: Math.max(1, Math.min(1000, Number(topK.value) || 20)) }),
  )

  const threshold = $('threshold') as HTMLInputElement
  threshold.addEventListener('change', () =>
    update({ ...state, threshold: threshold.value === '' ? null : Number(threshold.value) }),
  )

  const lambdaSlider = $('lambda-slider') as HTMLInputElement
  const lambdaNumber = $('lambda-number') as HTMLInputElement
  lambdaSlider.min = lambdaNumber.min = String(LAMBDA_MIN)
  lambdaSlider.max = lambdaNumber.max = String(LAMBDA_MAX)
  lambdaSlider.step = lambdaNumber.step = '0.0005'
  lambdaSlider.value = lambdaNumber.value = String(LAMBDA_DEFAULT)
  const onLambda = (value: string) => {
    update(setLambda(state, Number(value)))
    lambdaSlider.value = lambdaNumber.value = String(state.lambda)
  }
  lambdaSlider.addEventListener('input', () => onLambda(lambdaSlider.value))
  lambdaNumber.addEventListener('change', () => onLambda(lambdaNumber.value))

  const enhancer = $('enhancer') as HTMLInputElement
  enhancer.addEventListener('change', () => update({ ...state, enhancerOn: enhancer.checked }))

  $('submit').addEventListener('click', () => submit())

  $('exemplar-send').addEventListener('click', () => {
    const descriptor = ($('exemplar-text') as HTMLInputElement).value.trim()
    if (!descriptor) {
      update({ ...state, error: 'exemplar: enter a descriptor first' })
      return
    }
    uploadExemplar({ descriptor, note: 'ui upload' })
      .then((info) => {
        const begun = beginRequest(state)
        update(begun.state)
        return searchSemantic({ exemplar_id: info.exemplar_id, top_k: state.topK, ...currentFilters() })
          .then((results) => update(applyResults(state, begun.requestId, results)))
      })
      .catch((err) => update({ ...state, error: `exemplar: ${err.message ?? err}` }))
  })
}

function boot(): void {
  wireControls()
  syncModePanels()
  redraw()
  fetchVideos()
    .then((body) => {
      videos = body.videos
      renderFilterPanel()
    })
    .catch(() => {
      /* filters stay empty when the corpus endpoint is unreachable */
    })
}

document.addEventListener('DOMContentLoaded', boot)
