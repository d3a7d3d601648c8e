"""Temporal alignment of ordered event queries over video keyframe spans.

Given N event queries and the similarity matrix S (one row of cosine scores
per event), each video is scored by the best strictly increasing assignment
of events to its keyframes, with a penalty ``lam`` per index of temporal
spread. Per video:

    dp[0, t] = S[0, t]
    dp[i, t] = S[i, t] + max_{tau < t} (dp[i-1, tau] - lam * (t - tau))
    score(v) = max_t dp[N-1, t]

Carrying max(dp[i-1, tau] + lam*tau) as a running maximum makes each cell
O(1), so a video of span length L costs N*L, linear over all keyframes.
Because the per-step penalty telescopes, the winning path always satisfies
score = sum(S[i, path[i]]) - lam * (path[-1] - path[0]).

Tie rules are pinned for determinism: equal running max keeps the earliest
tau; equal final score keeps the smallest end index. ``dante_naive`` (the
literal O(N*L^2) recurrence) and ``dante_exhaustive`` (enumeration of all
increasing tuples) implement the same contract and exist to cross-check the
fast kernel; they are the oracles, so they never share its code path.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from ._kernels import align_events
from .catalog import Catalog, VideoSpan
from .errors import InfeasibleAlignment, InvalidSpan, NoFeasibleVideo, TooLarge
from .vector_index import VectorStore, row_scores

EXHAUSTIVE_LIMIT = 10**6


@dataclass(slots=True)
class DanteParams:
    """``lam`` is the distance penalty per index; 0 disables it."""

    lam: float = 0.001
    top_k: int = 10

    def __post_init__(self) -> None:
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"lam must be within [0, 1], got {self.lam}")
        if self.top_k < 1:
            raise ValueError(f"top_k must be >= 1, got {self.top_k}")


@dataclass(slots=True)
class AlignmentResult:
    video_id: str
    score: float
    path: list[int]  # global keyframe ids, strictly increasing
    ops: int = field(default=0, compare=False)  # inner-loop cells touched


def similarity_matrix(store: VectorStore, event_vectors, workers: int = 1) -> np.ndarray:
    """Stack one row of cosine scores per event query: shape (N, T), float64."""
    rows = [row_scores(store, vec, workers=workers) for vec in event_vectors]
    if not rows:
        raise ValueError("at least one event query is required")
    return np.vstack(rows)


def _span_slice(matrix: np.ndarray, span: VideoSpan) -> np.ndarray:
    n, total = matrix.shape
    if span.start < 1 or span.end > total or span.start > span.end:
        raise InvalidSpan(f"span [{span.start}, {span.end}] outside matrix bounds [1, {total}]")
    length = span.end - span.start + 1
    if length < n:
        raise InfeasibleAlignment(
            f"video {span.video_id!r} has {length} keyframes, fewer than {n} events"
        )
    return np.ascontiguousarray(matrix[:, span.start - 1 : span.end], dtype=np.float64)


def dante_score_video(
    matrix: np.ndarray, span: VideoSpan, params: DanteParams
) -> AlignmentResult:
    """Fast running-max alignment of one video (compiled kernel when built)."""
    local = _span_slice(matrix, span)
    score, path, ops = align_events(local, params.lam)
    return AlignmentResult(
        video_id=span.video_id,
        score=score,
        path=[int(t) + span.start for t in path],
        ops=ops,
    )


def dante_rank(
    store: VectorStore,
    catalog: Catalog,
    event_vectors,
    params: DanteParams,
    video_filter: set[str] | None = None,
    workers: int = 1,
) -> list[AlignmentResult]:
    """Rank videos by alignment score; infeasible (too-short) videos are
    skipped. Ties break by ascending span start."""
    matrix = similarity_matrix(store, event_vectors, workers=workers)
    return rank_matrix(matrix, catalog.spans(), params, video_filter)


def rank_matrix(
    matrix: np.ndarray,
    spans: list[VideoSpan],
    params: DanteParams,
    video_filter: set[str] | None = None,
) -> list[AlignmentResult]:
    n = matrix.shape[0]
    scored: list[tuple[AlignmentResult, int]] = []
    for span in spans:
        if video_filter is not None and span.video_id not in video_filter:
            continue
        if len(span) < n:
            continue
        scored.append((dante_score_video(matrix, span, params), span.start))
    if not scored:
        raise NoFeasibleVideo(f"no video can host {n} ordered events")
    scored.sort(key=lambda pair: (-pair[0].score, pair[1]))
    return [result for result, _ in scored[: params.top_k]]


# --- reference oracles ------------------------------------------------------


def dante_naive(matrix: np.ndarray, span: VideoSpan, params: DanteParams) -> AlignmentResult:
    """Literal recurrence, maximizing over the full tau range per cell."""
    local = _span_slice(matrix, span)
    lam = params.lam
    n, length = local.shape
    dp = np.full((n, length), -np.inf)
    arg = np.full((n, length), -1, dtype=np.int64)
    dp[0] = local[0]
    taus = np.arange(length, dtype=np.float64)
    for i in range(1, n):
        for t in range(1, length):
            cand = dp[i - 1, :t] - lam * (float(t) - taus[:t])
            j = int(np.argmax(cand))  # first maximum = earliest tau
            dp[i, t] = local[i, t] + cand[j]
            arg[i, t] = j
    end = int(np.argmax(dp[n - 1]))
    path = np.empty(n, dtype=np.int64)
    path[n - 1] = end
    for i in range(n - 2, -1, -1):
        end = int(arg[i + 1, end])
        path[i] = end
    return AlignmentResult(
        video_id=span.video_id,
        score=float(dp[n - 1, path[n - 1]]),
        path=[int(t) + span.start for t in path],
        ops=n * length * length,
    )


def dante_exhaustive(
    matrix: np.ndarray, span: VideoSpan, params: DanteParams
) -> AlignmentResult:
    """Enumerate every strictly increasing tuple; tiny instances only.

    Maximizes sum(S) - lam * (t_last - t_first); among equal maxima prefers
    the tuple whose reversed index sequence is lexicographically smallest,
    which is exactly what backtracking with the pinned tie rules yields.
    """
    local = _span_slice(matrix, span)
    n, length = local.shape
    count = math.comb(length, n)
    if count > EXHAUSTIVE_LIMIT:
        raise TooLarge(f"C({length}, {n}) = {count} exceeds {EXHAUSTIVE_LIMIT}")
    tuples = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(length), n)),
        dtype=np.int64,
        count=count * n,
    ).reshape(count, n)
    values = local[np.arange(n)[None, :], tuples].sum(axis=1)
    values = values - params.lam * (tuples[:, -1] - tuples[:, 0])
    best_value = values.max()
    candidates = tuples[values == best_value]
    # keys least-significant first: primary sort on the last index
    order = np.lexsort(tuple(candidates[:, i] for i in range(n)))
    best = candidates[order[0]]
    return AlignmentResult(
        video_id=span.video_id,
        score=float(best_value),
        path=[int(t) + span.start for t in best],
        ops=count,
    )
