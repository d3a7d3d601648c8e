import {
  ApiErrorBody,
  DanteResponse,
  DetailResponse,
  ExemplarInfo,
  SearchResponse,
  VideoInfo,
} from './types.js'

export class ApiError extends Error {
  code: string
  status: number

  constructor(status: number, code: string, message: string) {
    super(message)
    this.code = code
    this.status = status
  }
}

export function apiBase(): string {
  const fromQuery = new URLSearchParams(window.location.search).get('api')
  return (fromQuery ?? '').replace(/\/$/, '')
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const res = await fetch(apiBase() + path, init)
  const body = await res.json()
  if (!res.ok) {
    const err = body as ApiErrorBody
    throw new ApiError(res.status, err.error?.code ?? 'Unknown', err.error?.message ?? res.statusText)
  }
  return body as T
}

function post<T>(path: string, payload: unknown): Promise<T> {
  return request<T>(path, {
    method: 'POST',
    headers: { 'Content-Type': 'application/json' },
    body: JSON.stringify(payload),
  })
}

export interface SemanticPayload {
  query?: string
  keyframe_id?: number
  exemplar_id?: string
  top_k: number
  threshold?: number
  video_filter?: string[]
  group_filter?: string[]
  enhance?: boolean
}

export function searchSemantic(payload: SemanticPayload): Promise<SearchResponse> {
  return post('/api/search/semantic', payload)
}

export function searchOcr(payload: {
  query: string
  top_k: number
  video_filter?: string[]
  group_filter?: string[]
}): Promise<SearchResponse> {
  return post('/api/search/ocr', payload)
}

export function searchDante(payload: {
  queries: string[]
  lambda: number
  top_k: number
  video_filter?: string[]
  group_filter?: string[]
  enhance?: boolean
}): Promise<DanteResponse> {
  return post('/api/search/dante', payload)
}

export function fetchDetail(keyframeId: number): Promise<DetailResponse> {
  return request(`/api/keyframes/${keyframeId}`)
}

export function fetchVideos(): Promise<{ videos: VideoInfo[] }> {
  return request('/api/videos')
}

export function uploadExemplar(payload: {
  vector?: number[]
  descriptor?: string
  note?: string
}): Promise<ExemplarInfo> {
  return post('/api/quest/exemplar', payload)
}
