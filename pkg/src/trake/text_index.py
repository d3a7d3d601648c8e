"""On-screen-text search over keyframes: Unicode tokenizer plus BM25.

Tokenization is deliberately simple and fully specified: lowercase, then
split on anything that is neither alphanumeric nor a combining mark.
Diacritics survive, so Vietnamese syllables come through intact; no
stemming, stop-words, or compound segmentation.
"""

from __future__ import annotations

import json
import math
import unicodedata
from dataclasses import dataclass

from .errors import EmptyIndex, EmptyQuery
from .util import canonical_json

TEXT_INDEX_VERSION = 1
BM25_K1 = 1.2
BM25_B = 0.75


def _is_token_char(ch: str) -> bool:
    return ch.isalnum() or unicodedata.category(ch).startswith("M")


def tokenize(text: str) -> list[str]:
    """Lowercased tokens; empty input yields an empty list."""
    tokens: list[str] = []
    current: list[str] = []
    for ch in text.lower():
        if _is_token_char(ch):
            current.append(ch)
        elif current:
            tokens.append("".join(current))
            current = []
    if current:
        tokens.append("".join(current))
    return tokens


@dataclass(frozen=True, slots=True)
class OcrHit:
    keyframe_id: int
    score: float


class TextIndex:
    """Inverted index over one OCR document per keyframe.

    Empty documents are indexed too (so hydration always finds a row) but
    contribute no postings. Statistics (doc_count, avg length) include them.
    """

    def __init__(self, k1: float = BM25_K1, b: float = BM25_B) -> None:
        self.k1 = k1
        self.b = b
        self.postings: dict[str, list[tuple[int, int]]] = {}
        self.doc_lengths: dict[int, int] = {}
        self._texts: dict[int, str] = {}

    # --- build ----------------------------------------------------------

    def add(self, keyframe_id: int, text: str) -> None:
        if keyframe_id in self.doc_lengths:
            raise ValueError(f"duplicate document for keyframe {keyframe_id}")
        tokens = tokenize(text)
        self.doc_lengths[keyframe_id] = len(tokens)
        self._texts[keyframe_id] = text
        counts: dict[str, int] = {}
        for tok in tokens:
            counts[tok] = counts.get(tok, 0) + 1
        for tok, tf in counts.items():
            self.postings.setdefault(tok, []).append((keyframe_id, tf))

    # --- stats ----------------------------------------------------------

    @property
    def doc_count(self) -> int:
        return len(self.doc_lengths)

    @property
    def avg_doc_length(self) -> float:
        if not self.doc_lengths:
            return 0.0
        return sum(self.doc_lengths.values()) / len(self.doc_lengths)

    def text_of(self, keyframe_id: int) -> str | None:
        return self._texts.get(keyframe_id)

    # --- query ----------------------------------------------------------

    def idf(self, token: str) -> float:
        n = len(self.postings.get(token, ()))
        big_n = self.doc_count
        return math.log((big_n - n + 0.5) / (n + 0.5) + 1.0)

    def search(
        self,
        query: str,
        k: int,
        allowed: set[int] | None = None,
    ) -> list[OcrHit]:
        """BM25 top-k; documents sharing no query token are excluded.

        Query tokens score per occurrence. Ties break by ascending
        keyframe_id.
        """
        if self.doc_count == 0:
            raise EmptyIndex("text index has no documents")
        q_tokens = tokenize(query)
        if not q_tokens:
            raise EmptyQuery("query has no tokens")
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")

        avgdl = self.avg_doc_length
        scores: dict[int, float] = {}
        for tok in q_tokens:
            plist = self.postings.get(tok)
            if not plist:
                continue
            idf = self.idf(tok)
            for doc_id, tf in plist:
                if allowed is not None and doc_id not in allowed:
                    continue
                dl = self.doc_lengths[doc_id]
                denom = tf + self.k1 * (1.0 - self.b + self.b * dl / avgdl)
                scores[doc_id] = scores.get(doc_id, 0.0) + idf * tf * (self.k1 + 1.0) / denom
        ranked = sorted(scores.items(), key=lambda item: (-item[1], item[0]))
        return [OcrHit(doc_id, score) for doc_id, score in ranked[:k]]

    # --- persistence ------------------------------------------------------

    def to_payload(self) -> dict:
        return {
            "version": TEXT_INDEX_VERSION,
            "parameters": {"b": self.b, "k1": self.k1},
            "postings": {
                tok: [[doc_id, tf] for doc_id, tf in plist]
                for tok, plist in self.postings.items()
            },
            "doc_lengths": {str(doc_id): dl for doc_id, dl in self.doc_lengths.items()},
            "docs": {str(doc_id): text for doc_id, text in self._texts.items()},
        }

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(canonical_json(self.to_payload()))
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "TextIndex":
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
        if payload.get("version") != TEXT_INDEX_VERSION:
            raise ValueError(f"unsupported text index version: {payload.get('version')!r}")
        idx = cls(k1=payload["parameters"]["k1"], b=payload["parameters"]["b"])
        # rebuild from raw docs; postings in the file are for external readers
        for doc_id, text in sorted(payload["docs"].items(), key=lambda kv: int(kv[0])):
            idx.add(int(doc_id), text)
        rebuilt = {
            tok: [[doc_id, tf] for doc_id, tf in plist] for tok, plist in idx.postings.items()
        }
        if rebuilt != payload["postings"]:
            raise ValueError("postings inconsistent with documents")
        return idx
