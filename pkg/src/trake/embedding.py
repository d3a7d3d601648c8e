"""Embedding providers for queries, exemplars, and synthetic corpora.

The production deployment would plug a multimodal encoder in here; this
package ships two providers with the same contract:

* ``ToyHashProvider``: a deterministic signed-hash bag of character
  trigrams. No ML runtime, platform-independent, and a query equal to a
  planted descriptor string embeds to the identical vector (cosine 1.0),
  which is what the synthetic end-to-end tests rely on.
* ``PrecomputedProvider``: read-only lookup of stored keyframe vectors.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import EmptyInput, UnknownKeyframe, ZeroVector

DEFAULT_DIM = 64

FNV_OFFSET = 14695981039346656037
FNV_PRIME = 1099511628211
_MASK64 = (1 << 64) - 1


def fnv1a_64(data: bytes) -> int:
    """64-bit FNV-1a over a byte string."""
    h = FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * FNV_PRIME) & _MASK64
    return h


def normalize(vector) -> np.ndarray:
    """Return the vector scaled to unit L2 norm (float64).

    Raises ZeroVector for an all-zero input and ValueError for non-finite
    entries; cosine scoring downstream assumes unit, finite rows.
    """
    v = np.asarray(vector, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-d vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise ZeroVector("cannot normalize the zero vector")
    return v / norm


def embed_text(text: str, dim: int = DEFAULT_DIM) -> np.ndarray:
    """Deterministic trigram-hash embedding of a text string.

    The input is trimmed and Unicode-lowercased; every contiguous window of
    3 characters is hashed with 64-bit FNV-1a over its UTF-8 bytes. The hash
    picks a bucket (``hash % dim``) and a sign (+1 when bit 63 is clear,
    -1 otherwise); signs accumulate per bucket and the result is
    L2-normalized.

    Raises EmptyInput for blank text and ZeroVector when the accumulation
    cancels (including inputs shorter than 3 characters, which produce no
    trigrams). Callers must surface ZeroVector, not substitute a default.
    """
    if dim < 2:
        raise ValueError(f"dim must be >= 2, got {dim}")
    stripped = text.strip()
    if not stripped:
        raise EmptyInput("query text is empty")
    lowered = stripped.lower()
    acc = np.zeros(dim, dtype=np.float64)
    for i in range(len(lowered) - 2):
        h = fnv1a_64(lowered[i : i + 3].encode("utf-8"))
        sign = 1.0 if h < (1 << 63) else -1.0
        acc[h % dim] += sign
    if not acc.any():
        raise ZeroVector(f"trigram accumulation cancelled to zero for {stripped!r}")
    return acc / math.sqrt(float(acc @ acc))


class ToyHashProvider:
    """Stateless text embedder; safe for concurrent use."""

    kind = "toy-hash"

    def __init__(self, dim: int = DEFAULT_DIM) -> None:
        if dim < 2:
            raise ValueError(f"dim must be >= 2, got {dim}")
        self.dim = dim

    def embed_text(self, text: str) -> np.ndarray:
        return embed_text(text, self.dim)


class PrecomputedProvider:
    """Lookup of ingested keyframe vectors, keyed by keyframe_id."""

    kind = "precomputed-lookup"

    def __init__(self, store) -> None:
        self._store = store
        self.dim = store.dim

    def lookup(self, keyframe_id: int) -> np.ndarray:
        try:
            row = self._store.get_vector(keyframe_id)
        except UnknownKeyframe:
            raise
        return np.asarray(row, dtype=np.float64)
