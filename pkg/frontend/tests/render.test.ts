// @vitest-environment jsdom

import { describe, expect, it, vi } from 'vitest'

import { renderDanteStrips, renderDetail, renderGrid, renderResults } from '../src/render.js'
import { anchorResponse, danteResponse, detailResponse, semanticResponse } from './fixtures.js'

function gridIds(root: HTMLElement): number[] {
  return Array.from(root.querySelectorAll<HTMLElement>('.cell')).map((cell) =>
    Number(cell.dataset.keyframeId),
  )
}

describe('result grid', () => {
  it('renders hits exactly in response order, never re-sorted', () => {
    const response = semanticResponse([
      [9, 'vidC', 0.42],
      [2, 'vidA', 0.99],
      [5, 'vidB', 0.7],
    ])
    const grid = renderGrid(response.hits, () => undefined)
    expect(gridIds(grid)).toEqual([9, 2, 5])
    expect(gridIds(grid)).toMatchSnapshot()
  })

  it('find-similar fixture shows the anchor at rank 1', () => {
    const grid = renderGrid(anchorResponse.hits, () => undefined)
    expect(gridIds(grid)[0]).toBe(7)
    const scores = Array.from(grid.querySelectorAll('.score')).map((n) => n.textContent)
    expect(scores[0]).toBe('1.000')
  })

  it('clicking a cell reports its keyframe id', () => {
    const onOpen = vi.fn()
    const grid = renderGrid(anchorResponse.hits, onOpen)
    grid.querySelectorAll<HTMLElement>('.cell')[1].click()
    expect(onOpen).toHaveBeenCalledWith(3)
  })

  it('empty hit list shows a notice', () => {
    const grid = renderGrid([], () => undefined)
    expect(grid.querySelector('.empty')?.textContent).toBe('No results.')
  })
})

describe('dante strips', () => {
  it('renders one strip per video with keyframes in path order', () => {
    const strips = renderDanteStrips(danteResponse.hits, () => undefined)
    const videos = Array.from(strips.querySelectorAll<HTMLElement>('.strip')).map(
      (s) => s.dataset.videoId,
    )
    expect(videos).toEqual(['vidB', 'vidA'])
    const firstStrip = strips.querySelector<HTMLElement>('.strip')!
    expect(gridIds(firstStrip)).toEqual([41, 46, 52])
    const labels = Array.from(firstStrip.querySelectorAll('.event-no')).map((n) => n.textContent)
    expect(labels).toEqual(['E1', 'E2', 'E3'])
    expect(gridIds(strips)).toMatchSnapshot()
  })

  it('renderResults dispatches on mode', () => {
    const semantic = renderResults(anchorResponse, () => undefined)
    expect(semantic.querySelector('.grid')).not.toBeNull()
    const dante = renderResults(danteResponse, () => undefined)
    expect(dante.querySelector('.strips')).not.toBeNull()
  })

  it('shows the rewrite note when the enhancer ran', () => {
    const withRewrite = {
      ...anchorResponse,
      rewrite: { rewritten_query: 'expanded text', used_fallback: false, provider: 'fixture' },
    }
    const root = renderResults(withRewrite, () => undefined)
    expect(root.querySelector('.rewrite-note')?.textContent).toContain('expanded text')
  })
})

describe('detail pane', () => {
  it('shows metadata, OCR text, and the player link with the timestamp', () => {
    const pane = renderDetail(detailResponse, {
      onFindSimilar: () => undefined,
      onClose: () => undefined,
      onJump: () => undefined,
    })
    expect(pane.dataset.keyframeId).toBe('7')
    expect(pane.querySelector('.ocr p')?.textContent).toBe('caption 7')
    const play = pane.querySelector<HTMLAnchorElement>('a.button-like')!
    expect(play.href).toBe('https://player.example/watch?v=vidB&t=2')
    expect(play.href).toContain('t=2')
  })

  it('find-similar button reports the anchor id', () => {
    const onFindSimilar = vi.fn()
    const pane = renderDetail(detailResponse, {
      onFindSimilar,
      onClose: () => undefined,
      onJump: () => undefined,
    })
    pane.querySelector<HTMLButtonElement>('.find-similar')!.click()
    expect(onFindSimilar).toHaveBeenCalledWith(7)
  })

  it('neighbor buttons jump, and disable at span boundaries', () => {
    const onJump = vi.fn()
    const pane = renderDetail(detailResponse, {
      onFindSimilar: () => undefined,
      onClose: () => undefined,
      onJump,
    })
    const neighbors = pane.querySelectorAll<HTMLButtonElement>('.neighbor')
    neighbors[0].click()
    neighbors[1].click()
    expect(onJump).toHaveBeenNthCalledWith(1, 6)
    expect(onJump).toHaveBeenNthCalledWith(2, 8)

    const edge = renderDetail(
      { ...detailResponse, prev: null },
      { onFindSimilar: () => undefined, onClose: () => undefined, onJump },
    )
    expect(edge.querySelectorAll<HTMLButtonElement>('.neighbor')[0].disabled).toBe(true)
  })
})
