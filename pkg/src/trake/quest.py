"""Query enhancement: rewriting of out-of-knowledge queries and
exemplar-image pivots.

A rewriter turns a terse or unembeddable query into a visually grounded
description before the normal semantic search runs. Three interchangeable
providers exist: a live HTTP client, a record/replay fixture (canonical for
tests), and a rule-based dictionary. Enhancement must never break
retrieval, so any provider failure degrades to the original query with
``used_fallback=True`` instead of raising.

The exemplar path stores externally supplied image vectors (or descriptor
strings run through the configured embedder) and searches with them.
"""

from __future__ import annotations

import json
import logging
import threading
from dataclasses import dataclass

import numpy as np

from .embedding import normalize
from .errors import DimensionMismatch, EmptyQuery, UnknownExemplar
from .vector_index import ScoredHit, VectorStore, search_topk

logger = logging.getLogger(__name__)

DEFAULT_PROMPT_TEMPLATE = (
    "Rewrite this video search query as one concrete, visually grounded "
    "scene description. Reply with the description only.\n\nQuery: {query}"
)


@dataclass(frozen=True, slots=True)
class RewriteRequest:
    original_query: str
    context_hint: str | None = None


@dataclass(frozen=True, slots=True)
class RewriteResult:
    rewritten_query: str
    used_fallback: bool
    provider: str


@dataclass(frozen=True, slots=True)
class ExemplarRecord:
    exemplar_id: str
    source_note: str
    vector: np.ndarray


class HttpRewriter:
    """Client for an external rewrite service.

    Sends {"model": ..., "prompt": ...} as JSON and expects {"text": ...}
    back. Endpoint, key, and timeout come from configuration; transport
    errors propagate and are downgraded by ``rewrite_query``.
    """

    name = "http"

    def __init__(
        self,
        endpoint: str,
        api_key: str | None = None,
        model: str = "default",
        timeout: float = 10.0,
        prompt_template: str = DEFAULT_PROMPT_TEMPLATE,
    ) -> None:
        self.endpoint = endpoint
        self.api_key = api_key
        self.model = model
        self.timeout = timeout
        self.prompt_template = prompt_template

    def rewrite(self, query: str, context_hint: str | None = None) -> str:
        import httpx

        prompt = self.prompt_template.format(query=query)
        if context_hint:
            prompt = f"{prompt}\n\nContext: {context_hint}"
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        response = httpx.post(
            self.endpoint,
            json={"model": self.model, "prompt": prompt},
            headers=headers,
            timeout=self.timeout,
        )
        response.raise_for_status()
        text = str(response.json()["text"]).strip()
        if not text:
            raise ValueError("rewrite service returned empty text")
        return text


class FixtureRewriter:
    """Replay of recorded rewrites from a JSON mapping {query: rewrite}."""

    name = "fixture"

    def __init__(self, mapping: dict[str, str] | None = None, path=None) -> None:
        if path is not None:
            with open(path, "r", encoding="utf-8") as fh:
                mapping = json.load(fh)
        self.mapping = dict(mapping or {})

    def rewrite(self, query: str, context_hint: str | None = None) -> str:
        return self.mapping[query]


class DictionaryRewriter:
    """Rule-based fallback: case-insensitive term -> description lookup."""

    name = "dictionary"

    def __init__(self, entries: dict[str, str]) -> None:
        self.entries = {key.lower(): value for key, value in entries.items()}

    def rewrite(self, query: str, context_hint: str | None = None) -> str:
        return self.entries[query.strip().lower()]


def rewrite_query(request: RewriteRequest, provider) -> RewriteResult:
    """Run the provider; degrade to the original query on any failure.

    Only a blank original query is an error; enhancement failing must not
    make retrieval fail.
    """
    original = request.original_query.strip()
    if not original:
        raise EmptyQuery("original query is empty")
    if provider is None:
        return RewriteResult(original, used_fallback=True, provider="none")
    try:
        rewritten = provider.rewrite(original, request.context_hint)
    except Exception as exc:
        logger.warning("rewrite provider %r failed: %s", getattr(provider, "name", "?"), exc)
        return RewriteResult(original, used_fallback=True, provider=getattr(provider, "name", "?"))
    if not rewritten or not rewritten.strip():
        return RewriteResult(original, used_fallback=True, provider=getattr(provider, "name", "?"))
    return RewriteResult(rewritten.strip(), used_fallback=False, provider=getattr(provider, "name", "?"))


class ExemplarStore:
    """Append-only store of uploaded exemplar vectors."""

    def __init__(self, dim: int, embedder=None) -> None:
        self.dim = dim
        self._embedder = embedder
        self._records: dict[str, ExemplarRecord] = {}
        self._lock = threading.Lock()

    def ingest(
        self,
        vector=None,
        descriptor: str | None = None,
        note: str = "",
    ) -> ExemplarRecord:
        """Register an exemplar from a raw vector or a descriptor string."""
        if (vector is None) == (descriptor is None):
            raise ValueError("provide exactly one of vector or descriptor")
        if descriptor is not None:
            if self._embedder is None:
                raise ValueError("no embedder configured for descriptor exemplars")
            unit = self._embedder.embed_text(descriptor)
        else:
            unit = np.asarray(vector, dtype=np.float64)
            if unit.ndim != 1 or unit.shape[0] != self.dim:
                raise DimensionMismatch(
                    f"exemplar dim {unit.shape} vs store dim {self.dim}"
                )
            unit = normalize(unit)
        with self._lock:
            exemplar_id = f"ex-{len(self._records) + 1:04d}"
            record = ExemplarRecord(exemplar_id=exemplar_id, source_note=note, vector=unit)
            self._records[exemplar_id] = record
        return record

    def get(self, exemplar_id: str) -> ExemplarRecord:
        try:
            return self._records[exemplar_id]
        except KeyError:
            raise UnknownExemplar(exemplar_id) from None


def search_with_exemplar(
    exemplars: ExemplarStore,
    store: VectorStore,
    exemplar_id: str,
    k: int,
    mask=None,
    threshold: float | None = None,
    workers: int = 1,
) -> list[ScoredHit]:
    """Image-to-image search seeded by a stored exemplar."""
    record = exemplars.get(exemplar_id)
    return search_topk(store, record.vector, k, mask, threshold, workers)
