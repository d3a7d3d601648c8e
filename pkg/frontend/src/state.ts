// Pure UI state and transitions. Everything here is a function of
// (state, event); the DOM layer only renders what it is given, which is what
// makes response-order and stale-response behavior unit-testable.

import { DetailResponse, ResultsResponse } from './types.js'

export type Mode = 'semantic' | 'ocr' | 'dante'

export const LAMBDA_MIN = 0
export const LAMBDA_MAX = 0.02
export const LAMBDA_DEFAULT = 0.001

export interface UiState {
  mode: Mode
  queryText: string
  danteQueries: string[]
  topK: number
  threshold: number | null
  lambda: number
  groups: string[]
  videoIds: string[]
  enhancerOn: boolean
  results: ResultsResponse | null
  selected: DetailResponse | null
  error: string | null
  // monotonic counter: id of the newest issued request; only a response
  // carrying exactly this id may land (older ones are stale, by design)
  latestRequest: number
  appliedRequest: number
  loading: boolean
}

export function initialState(): UiState {
  return {
    mode: 'semantic',
    queryText: '',
    danteQueries: [''],
    topK: 20,
    threshold: null,
    lambda: LAMBDA_DEFAULT,
    groups: [],
    videoIds: [],
    enhancerOn: false,
    results: null,
    selected: null,
    error: null,
    latestRequest: 0,
    appliedRequest: 0,
    loading: false,
  }
}

export function setMode(state: UiState, mode: Mode): UiState {
  return { ...state, mode }
}

export function setLambda(state: UiState, value: number): UiState {
  const clamped = Math.min(LAMBDA_MAX, Math.max(LAMBDA_MIN, value))
  return { ...state, lambda: clamped }
}

export function setDanteQueries(state: UiState, queries: string[]): UiState {
  return { ...state, danteQueries: queries.length ? queries : [''] }
}

export function canSubmit(state: UiState): boolean {
  if (state.mode === 'dante') {
    return state.danteQueries.some((q) => q.trim().length > 0)
  }
  return state.queryText.trim().length > 0
}

/** Register a newly issued request; returns its id for correlation. */
export function beginRequest(state: UiState): { state: UiState; requestId: number } {
  const requestId = state.latestRequest + 1
  return { state: { ...state, latestRequest: requestId, loading: true, error: null }, requestId }
}

/** Apply a response only if it belongs to the newest issued request. */
export function applyResults(
  state: UiState,
  requestId: number,
  results: ResultsResponse,
): UiState {
  if (requestId !== state.latestRequest) {
    return state // stale: a newer submission owns the pane
  }
  return { ...state, results, appliedRequest: requestId, loading: false, error: null }
}

/** Errors follow the same staleness rule and never clobber inputs/results. */
export function applyError(state: UiState, requestId: number, message: string): UiState {
  if (requestId !== state.latestRequest) {
    return state
  }
  return { ...state, error: message, loading: false }
}

export function openDetail(state: UiState, detail: DetailResponse): UiState {
  return { ...state, selected: detail }
}

export function closeDetail(state: UiState): UiState {
  return { ...state, selected: null }
}

/** Find-similar pivots to semantic mode anchored on a keyframe. */
export function pivotToSimilar(state: UiState): UiState {
  return { ...state, mode: 'semantic' }
}
