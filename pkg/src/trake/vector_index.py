"""Exact cosine top-k over all keyframe embeddings.

A flat float32 matrix is scanned for every query: at desk scale (tens of
thousands of keyframes) exact search is cheap, deterministic, and doubles as
the oracle for everything built on top. Scores are always computed over
fixed-size row blocks; a worker pool only parallelizes those same block
jobs, so serial and parallel scans return bit-identical scores.

On-disk format (little-endian, bit-exact round trips):

    magic   4 bytes  b"TRKE"
    version u32      1
    dim     u32
    count   u64
    records count x { keyframe_id u64, vector dim x f32 }
"""

from __future__ import annotations

import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, EmptyStore, UnknownKeyframe

MAGIC = b"TRKE"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIIQ")

# rows per scan job; serial scans loop over the same blocks the pool would
BLOCK_ROWS = 8192


@dataclass(frozen=True, slots=True)
class ScoredHit:
    keyframe_id: int
    score: float


class VectorStore:
    """Frozen id-sorted embedding matrix with unit rows."""

    def __init__(self, ids: np.ndarray, matrix: np.ndarray, validate: bool = True) -> None:
        ids = np.ascontiguousarray(ids, dtype=np.uint64)
        matrix = np.ascontiguousarray(matrix, dtype=np.float32)
        if matrix.ndim != 2:
            raise ValueError(f"matrix must be 2-d, got shape {matrix.shape}")
        if ids.shape[0] != matrix.shape[0]:
            raise ValueError("ids and matrix row counts differ")
        if validate and ids.size:
            if np.any(np.diff(ids.astype(np.int64)) <= 0):
                raise ValueError("keyframe ids must be strictly ascending")
            norms = np.linalg.norm(matrix, axis=1)
            bad = np.flatnonzero(np.abs(norms - 1.0) > 1e-5)
            if bad.size:
                raise ValueError(f"non-unit rows at positions {bad[:5].tolist()}")
        self.ids = ids
        self.matrix = matrix

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __len__(self) -> int:
        return self.matrix.shape[0]

    def position_of(self, keyframe_id: int) -> int:
        pos = int(np.searchsorted(self.ids, np.uint64(keyframe_id)))
        if pos >= len(self.ids) or int(self.ids[pos]) != keyframe_id:
            raise UnknownKeyframe([keyframe_id])
        return pos

    def get_vector(self, keyframe_id: int) -> np.ndarray:
        return self.matrix[self.position_of(keyframe_id)]

    # --- persistence --------------------------------------------------

    def save(self, path) -> None:
        write_embeddings(path, self.ids, self.matrix)

    @classmethod
    def load(cls, path) -> "VectorStore":
        return cls(*read_embeddings(path))


def read_embeddings(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a raw embeddings file; no unit-norm or ordering validation."""
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) != _HEADER.size:
            raise ValueError("embeddings file truncated")
        magic, version, dim, count = _HEADER.unpack(header)
        if magic != MAGIC:
            raise ValueError(f"bad magic {magic!r}, expected {MAGIC!r}")
        if version != FORMAT_VERSION:
            raise ValueError(f"unsupported embeddings version {version}")
        body = fh.read()
    record_dtype = np.dtype([("id", "<u8"), ("vec", "<f4", (dim,))])
    if len(body) != count * record_dtype.itemsize:
        raise ValueError("embeddings file size inconsistent with header")
    records = np.frombuffer(body, dtype=record_dtype)
    return records["id"].copy(), records["vec"].copy()


def write_embeddings(path, ids, matrix) -> None:
    """Write a raw embeddings file (ingest input or store output)."""
    ids = np.asarray(ids, dtype=np.uint64)
    matrix = np.asarray(matrix, dtype=np.float32)
    dim = matrix.shape[1]
    record = np.empty(len(ids), dtype=np.dtype([("id", "<u8"), ("vec", "<f4", (dim,))]))
    record["id"] = ids
    record["vec"] = matrix
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, dim, len(ids)))
        fh.write(record.tobytes())


def _scan(matrix: np.ndarray, query: np.ndarray, workers: int) -> np.ndarray:
    """Cosine scores of every row against a unit query, block by block."""
    n = matrix.shape[0]
    starts = range(0, n, BLOCK_ROWS)
    if workers <= 1 or n <= BLOCK_ROWS:
        out = np.empty(n, dtype=np.float32)
        for s in starts:
            out[s : s + BLOCK_ROWS] = matrix[s : s + BLOCK_ROWS] @ query
        return out
    out = np.empty(n, dtype=np.float32)

    def job(s: int) -> None:
        out[s : s + BLOCK_ROWS] = matrix[s : s + BLOCK_ROWS] @ query

    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(job, starts))
    return out


def _as_query32(store: VectorStore, query) -> np.ndarray:
    q = np.asarray(query, dtype=np.float32)
    if q.ndim != 1 or q.shape[0] != store.dim:
        raise DimensionMismatch(f"query dim {q.shape} vs store dim {store.dim}")
    return q


def row_scores(store: VectorStore, query, workers: int = 1) -> np.ndarray:
    """Dense float64 cosine scores ordered by keyframe_id (one S-matrix row)."""
    if len(store) == 0:
        raise EmptyStore("vector store has no rows")
    return _scan(store.matrix, _as_query32(store, query), workers).astype(np.float64)


def search_topk(
    store: VectorStore,
    query,
    k: int,
    mask: np.ndarray | None = None,
    threshold: float | None = None,
    workers: int = 1,
) -> list[ScoredHit]:
    """Exact top-k by cosine, ties broken by ascending keyframe_id.

    ``mask`` is a boolean row filter aligned with the store (built from video
    spans by the caller). Equivalent to fully sorting ``row_scores``.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if len(store) == 0:
        raise EmptyStore("vector store has no rows")
    scores = _scan(store.matrix, _as_query32(store, query), workers)

    if mask is not None:
        positions = np.flatnonzero(mask)
    else:
        positions = np.arange(len(store))
    if threshold is not None:
        positions = positions[scores[positions] >= np.float32(threshold)]
    if positions.size == 0:
        return []

    sub = scores[positions]
    if k >= positions.size:
        order = np.argsort(-sub, kind="stable")
    else:
        part = np.argpartition(-sub, k - 1)[:k]
        kth = sub[part].min()
        cand = np.flatnonzero(sub >= kth)
        order = cand[np.argsort(-sub[cand], kind="stable")][:k]
    chosen = positions[order]
    return [ScoredHit(int(store.ids[p]), float(scores[p])) for p in chosen]


def search_by_keyframe(
    store: VectorStore,
    anchor: int,
    k: int,
    mask: np.ndarray | None = None,
    threshold: float | None = None,
    workers: int = 1,
) -> list[ScoredHit]:
    """Image-to-image search anchored on a stored keyframe's own vector."""
    return search_topk(store, store.get_vector(anchor), k, mask, threshold, workers)
