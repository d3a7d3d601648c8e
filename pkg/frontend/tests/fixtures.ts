// Fixture bodies matching the server's published schemas.

import { DanteResponse, DetailResponse, HitEntry, SearchResponse } from '../src/types.js'

export function entry(id: number, video: string, score?: number): HitEntry {
  const base: HitEntry = {
    keyframe_id: id,
    video_id: video,
    frame_number: 10 * id,
    fps: 25.0,
    timestamp_s: (10 * id) / 25.0,
    image_path: `${video}/${String(10 * id).padStart(6, '0')}.jpg`,
    ocr_text: id % 2 ? `caption ${id}` : null,
  }
  return score === undefined ? base : { ...base, score }
}

export function semanticResponse(ids: [number, string, number][]): SearchResponse {
  return {
    mode: 'semantic',
    query: 'a test query',
    rewrite: null,
    hits: ids.map(([id, video, score]) => entry(id, video, score)),
    took_ms: 3,
  }
}

export const anchorResponse: SearchResponse = semanticResponse([
  [7, 'vidB', 1.0],
  [3, 'vidA', 0.81],
  [12, 'vidC', 0.66],
])

export const danteResponse: DanteResponse = {
  mode: 'dante',
  queries: ['first event', 'second event', 'third event'],
  rewrites: null,
  lambda: 0.001,
  hits: [
    {
      video_id: 'vidB',
      score: 2.9403,
      group: 'set-1',
      path: [entry(41, 'vidB'), entry(46, 'vidB'), entry(52, 'vidB')],
    },
    {
      video_id: 'vidA',
      score: 1.2207,
      group: null,
      path: [entry(4, 'vidA'), entry(9, 'vidA'), entry(11, 'vidA')],
    },
  ],
  took_ms: 5,
}

export const detailResponse: DetailResponse = {
  keyframe: entry(7, 'vidB'),
  prev: entry(6, 'vidB'),
  next: entry(8, 'vidB'),
  group: 'set-1',
  player_url: 'https://player.example/watch?v=vidB&t=2',
  took_ms: 1,
}
