// Mirrors the server's published response schemas (src/trake/schemas/).

export interface HitEntry {
  keyframe_id: number
  video_id: string
  frame_number: number
  fps: number
  timestamp_s: number
  image_path: string
  ocr_text: string | null
  score?: number
}

export interface RewriteInfo {
  rewritten_query: string
  used_fallback: boolean
  provider: string
}

export interface SearchResponse {
  mode: 'semantic' | 'ocr'
  query: string | null
  rewrite: RewriteInfo | null
  hits: HitEntry[]
  took_ms?: number
}

export interface DanteHit {
  video_id: string
  score: number
  group: string | null
  path: HitEntry[]
}

export interface DanteResponse {
  mode: 'dante'
  queries: (string | null)[]
  rewrites: (RewriteInfo | null)[] | null
  lambda: number
  hits: DanteHit[]
  took_ms?: number
}

export type ResultsResponse = SearchResponse | DanteResponse

export interface DetailResponse {
  keyframe: HitEntry
  prev: HitEntry | null
  next: HitEntry | null
  group: string | null
  player_url: string
  took_ms?: number
}

export interface VideoInfo {
  video_id: string
  start: number
  end: number
  keyframes: number
  fps: number
  group: string | null
}

export interface ExemplarInfo {
  exemplar_id: string
  dim: number
  note: string
}

export interface ApiErrorBody {
  error: { code: string; message: string }
}

export function isDante(r: ResultsResponse): r is DanteResponse {
  return r.mode === 'dante'
}
