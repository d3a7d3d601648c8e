"""HTTP API over the frozen indexes, plus the service layer behind it.

``RetrievalService`` produces plain JSON-ready dicts so the CLI can emit
byte-identical bodies without going through HTTP; routes only add timing
and status codes. All search state is read-only after startup except the
append-only exemplar store.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response

from . import __version__
from ._kernels import BACKEND
from .catalog import Catalog
from .dante import DanteParams, rank_matrix, similarity_matrix
from .embedding import ToyHashProvider
from .errors import BadRequest, EmptyQuery, TrakeError
from .quest import ExemplarStore, RewriteRequest, rewrite_query, search_with_exemplar
from .text_index import TextIndex
from .util import canonical_json
from .vector_index import VectorStore, search_by_keyframe, search_topk

logger = logging.getLogger(__name__)

MAX_TOP_K = 1000
MAX_EVENTS = 16

# one place mapping error codes to HTTP statuses
_STATUS_BY_CODE = {
    "BadRequest": 400,
    "EmptyQuery": 400,
    "EmptyInput": 400,
    "ZeroVector": 400,
    "InvalidRange": 400,
    "EmptyStore": 400,
    "EmptyIndex": 400,
    "InfeasibleAlignment": 400,
    "TooLarge": 400,
    "UnknownKeyframe": 404,
    "UnknownVideo": 404,
    "UnknownExemplar": 404,
    "NoFeasibleVideo": 404,
    "DimensionMismatch": 422,
}


@dataclass(slots=True)
class ServiceConfig:
    player_url_base: str = "https://www.youtube.com/watch"
    workers: int = 1
    default_top_k: int = 10


class RetrievalService:
    """Search operations over one frozen catalog + index set."""

    def __init__(
        self,
        catalog: Catalog,
        store: VectorStore,
        text_index: TextIndex,
        rewriter=None,
        config: ServiceConfig | None = None,
    ) -> None:
        self.catalog = catalog
        self.store = store
        self.text_index = text_index
        self.rewriter = rewriter
        self.config = config or ServiceConfig()
        self.embedder = ToyHashProvider(store.dim)
        self.exemplars = ExemplarStore(store.dim, embedder=self.embedder)

    # --- shared helpers -------------------------------------------------

    def _entry(self, keyframe_id: int, score: float | None = None) -> dict:
        rec = self.catalog.get(keyframe_id)
        entry: dict[str, Any] = {
            "keyframe_id": rec.keyframe_id,
            "video_id": rec.video_id,
            "frame_number": rec.frame_number,
            "fps": rec.fps,
            "timestamp_s": rec.timestamp_s,
            "image_path": rec.image_path,
            "ocr_text": self.text_index.text_of(rec.keyframe_id),
        }
        if score is not None:
            entry["score"] = float(score)
        return entry

    def _mask(self, video_filter, group_filter):
        return self.catalog.video_mask(video_filter, group_filter)

    def _check_top_k(self, top_k: int) -> int:
        if not isinstance(top_k, int) or not 1 <= top_k <= MAX_TOP_K:
            raise BadRequest(f"top_k must be within [1, {MAX_TOP_K}], got {top_k!r}")
        return top_k

    def _player_url(self, video_id: str, timestamp_s: float) -> str:
        return f"{self.config.player_url_base}?v={video_id}&t={int(timestamp_s)}"

    # --- operations ------------------------------------------------------

    def semantic(
        self,
        query: str | None = None,
        keyframe_id: int | None = None,
        exemplar_id: str | None = None,
        top_k: int = 10,
        threshold: float | None = None,
        video_filter: list[str] | None = None,
        group_filter: list[str] | None = None,
        enhance: bool = False,
    ) -> dict:
        sources = [s for s in (query, keyframe_id, exemplar_id) if s is not None]
        if len(sources) != 1:
            raise BadRequest("provide exactly one of query, keyframe_id, exemplar_id")
        top_k = self._check_top_k(top_k)
        mask = self._mask(video_filter, group_filter)

        rewrite = None
        if query is not None:
            effective = query
            if enhance:
                result = rewrite_query(RewriteRequest(query), self.rewriter)
                rewrite = {
                    "rewritten_query": result.rewritten_query,
                    "used_fallback": result.used_fallback,
                    "provider": result.provider,
                }
                effective = result.rewritten_query
            vector = self.embedder.embed_text(effective)
            hits = search_topk(self.store, vector, top_k, mask, threshold, self.config.workers)
            query_out = effective
        elif keyframe_id is not None:
            hits = search_by_keyframe(
                self.store, keyframe_id, top_k, mask, threshold, self.config.workers
            )
            query_out = None
        else:
            hits = search_with_exemplar(
                self.exemplars, self.store, exemplar_id, top_k, mask, threshold,
                self.config.workers,
            )
            query_out = None

        return {
            "mode": "semantic",
            "query": query_out,
            "rewrite": rewrite,
            "hits": [self._entry(h.keyframe_id, h.score) for h in hits],
        }

    def ocr(
        self,
        query: str,
        top_k: int = 10,
        video_filter: list[str] | None = None,
        group_filter: list[str] | None = None,
    ) -> dict:
        top_k = self._check_top_k(top_k)
        mask = self._mask(video_filter, group_filter)
        allowed = None
        if mask is not None:
            allowed = {int(i) + 1 for i in np.flatnonzero(mask)}
        hits = self.text_index.search(query, top_k, allowed)
        return {
            "mode": "ocr",
            "query": query,
            "rewrite": None,
            "hits": [self._entry(h.keyframe_id, h.score) for h in hits],
        }

    def dante(
        self,
        queries: list,
        lam: float = 0.001,
        top_k: int = 10,
        video_filter: list[str] | None = None,
        group_filter: list[str] | None = None,
        enhance: bool = False,
    ) -> dict:
        if not isinstance(queries, list) or not 1 <= len(queries) <= MAX_EVENTS:
            raise BadRequest(f"queries must hold 1..{MAX_EVENTS} events")
        if not isinstance(lam, (int, float)) or not 0.0 <= float(lam) <= 1.0:
            raise BadRequest(f"lambda must be within [0, 1], got {lam!r}")
        top_k = self._check_top_k(top_k)

        vectors = []
        texts: list[str | None] = []
        rewrites: list[dict | None] = []
        any_rewrite = False
        for q in queries:
            if isinstance(q, str):
                effective = q
                if enhance:
                    result = rewrite_query(RewriteRequest(q), self.rewriter)
                    rewrites.append(
                        {
                            "rewritten_query": result.rewritten_query,
                            "used_fallback": result.used_fallback,
                            "provider": result.provider,
                        }
                    )
                    effective = result.rewritten_query
                    any_rewrite = True
                else:
                    rewrites.append(None)
                texts.append(effective)
                vectors.append(self.embedder.embed_text(effective))
            else:
                vec = np.asarray(q, dtype=np.float64)
                if vec.ndim != 1 or vec.shape[0] != self.store.dim:
                    raise BadRequest(
                        f"event vector must have dim {self.store.dim}, got shape {vec.shape}"
                    )
                rewrites.append(None)
                texts.append(None)
                vectors.append(vec)

        mask = self._mask(video_filter, group_filter)
        allowed_videos = None
        if video_filter is not None or group_filter is not None:
            allowed_videos = {
                span.video_id
                for span in self.catalog.spans()
                if mask[span.start - 1 : span.end].any()
            }
        matrix = similarity_matrix(self.store, vectors, workers=self.config.workers)
        params = DanteParams(lam=float(lam), top_k=top_k)
        results = rank_matrix(matrix, self.catalog.spans(), params, allowed_videos)

        hits = []
        for res in results:
            hits.append(
                {
                    "video_id": res.video_id,
                    "score": float(res.score),
                    "group": self.catalog.group_of(res.video_id),
                    "path": [self._entry(kid) for kid in res.path],
                }
            )
        return {
            "mode": "dante",
            "queries": texts,
            "rewrites": rewrites if any_rewrite else None,
            "lambda": float(lam),
            "hits": hits,
        }

    def detail(self, keyframe_id: int) -> dict:
        rec = self.catalog.get(keyframe_id)
        prev_id, next_id = self.catalog.neighbors(keyframe_id)
        return {
            "keyframe": self._entry(keyframe_id),
            "prev": self._entry(prev_id) if prev_id is not None else None,
            "next": self._entry(next_id) if next_id is not None else None,
            "group": self.catalog.group_of(rec.video_id),
            "player_url": self._player_url(rec.video_id, rec.timestamp_s),
        }

    def rewrite(self, original_query: str, context_hint: str | None = None) -> dict:
        result = rewrite_query(RewriteRequest(original_query, context_hint), self.rewriter)
        return {
            "original_query": original_query.strip(),
            "rewritten_query": result.rewritten_query,
            "used_fallback": result.used_fallback,
            "provider": result.provider,
        }

    def add_exemplar(self, vector=None, descriptor=None, note: str = "") -> dict:
        if (vector is None) == (descriptor is None):
            raise BadRequest("provide exactly one of vector or descriptor")
        record = self.exemplars.ingest(vector=vector, descriptor=descriptor, note=note)
        return {
            "exemplar_id": record.exemplar_id,
            "dim": int(record.vector.shape[0]),
            "note": record.source_note,
        }

    def videos(self) -> dict:
        out = []
        for span in self.catalog.spans():
            first = self.catalog.get(span.start)
            out.append(
                {
                    "video_id": span.video_id,
                    "start": span.start,
                    "end": span.end,
                    "keyframes": len(span),
                    "fps": first.fps,
                    "group": self.catalog.group_of(span.video_id),
                }
            )
        return {"videos": out}

    def health(self) -> dict:
        return {
            "status": "ok",
            "version": __version__,
            "keyframes": self.catalog.size,
            "videos": len(self.catalog.video_ids),
            "dim": self.store.dim,
            "kernel": BACKEND,
        }


# --- HTTP layer ---------------------------------------------------------


class CanonicalJSONResponse(Response):
    media_type = "application/json"

    def render(self, content: Any) -> bytes:
        return (canonical_json(content) + "\n").encode("utf-8")


def _timed(body: dict, started: float) -> dict:
    body = dict(body)
    body["took_ms"] = max(0, int((time.perf_counter() - started) * 1000))
    return body


def create_app(service: RetrievalService, ui_dir=None) -> FastAPI:
    app = FastAPI(title="trake", version=__version__, default_response_class=CanonicalJSONResponse)

    @app.exception_handler(TrakeError)
    async def on_domain_error(request: Request, exc: TrakeError):
        status = _STATUS_BY_CODE.get(exc.code, 500)
        return JSONResponse(
            status_code=status,
            content={"error": {"code": exc.code, "message": str(exc)}},
        )

    @app.post("/api/search/semantic")
    def semantic(payload: dict):
        started = time.perf_counter()
        body = service.semantic(
            query=payload.get("query"),
            keyframe_id=payload.get("keyframe_id"),
            exemplar_id=payload.get("exemplar_id"),
            top_k=payload.get("top_k", service.config.default_top_k),
            threshold=payload.get("threshold"),
            video_filter=payload.get("video_filter"),
            group_filter=payload.get("group_filter"),
            enhance=bool(payload.get("enhance", False)),
        )
        return _timed(body, started)

    @app.post("/api/search/ocr")
    def ocr(payload: dict):
        started = time.perf_counter()
        query = payload.get("query")
        if not isinstance(query, str) or not query.strip():
            raise EmptyQuery("query must be a non-empty string")
        body = service.ocr(
            query=query,
            top_k=payload.get("top_k", service.config.default_top_k),
            video_filter=payload.get("video_filter"),
            group_filter=payload.get("group_filter"),
        )
        return _timed(body, started)

    @app.post("/api/search/dante")
    def dante(payload: dict):
        started = time.perf_counter()
        body = service.dante(
            queries=payload.get("queries"),
            lam=payload.get("lambda", 0.001),
            top_k=payload.get("top_k", service.config.default_top_k),
            video_filter=payload.get("video_filter"),
            group_filter=payload.get("group_filter"),
            enhance=bool(payload.get("enhance", False)),
        )
        return _timed(body, started)

    @app.post("/api/quest/rewrite")
    def rewrite(payload: dict):
        started = time.perf_counter()
        query = payload.get("original_query", payload.get("query"))
        if not isinstance(query, str) or not query.strip():
            raise EmptyQuery("original_query must be a non-empty string")
        body = service.rewrite(query, payload.get("context_hint"))
        return _timed(body, started)

    @app.post("/api/quest/exemplar")
    def exemplar(payload: dict):
        started = time.perf_counter()
        body = service.add_exemplar(
            vector=payload.get("vector"),
            descriptor=payload.get("descriptor"),
            note=payload.get("note", ""),
        )
        return _timed(body, started)

    @app.get("/api/keyframes/{keyframe_id}")
    def detail(keyframe_id: int):
        started = time.perf_counter()
        return _timed(service.detail(keyframe_id), started)

    @app.get("/api/videos")
    def videos():
        return service.videos()

    @app.get("/api/health")
    def health():
        return service.health()

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
