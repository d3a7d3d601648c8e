"""Keyframe catalog: the canonical id space every other store joins through.

Global keyframe ids are assigned contiguously starting at 1, one block per
registered video, so the per-video spans partition [1, T]. The catalog is
built once during ingestion, frozen, and then only read.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    CatalogFrozen,
    DuplicateVideo,
    EmptyScene,
    NonMonotonicFrames,
    UnknownKeyframe,
    UnknownVideo,
)
from .util import canonical_json

CATALOG_VERSION = 1


@dataclass(frozen=True, slots=True)
class KeyframeRecord:
    """One sampled frame. ``keyframe_id`` is the global index."""

    keyframe_id: int
    video_id: str
    frame_number: int
    fps: float
    image_path: str

    @property
    def timestamp_s(self) -> float:
        return self.frame_number / self.fps


@dataclass(frozen=True, slots=True)
class VideoSpan:
    """Contiguous global-index interval [start, end] owned by one video."""

    video_id: str
    start: int
    end: int

    def __len__(self) -> int:
        return self.end - self.start + 1


class Catalog:
    """Ordered keyframe records plus the per-video span table."""

    def __init__(self) -> None:
        self._records: list[KeyframeRecord] = []
        self._spans: dict[str, VideoSpan] = {}
        self._groups: dict[str, str] = {}
        self._frozen = False

    # --- construction -------------------------------------------------

    def register_video(
        self,
        video_id: str,
        fps: float,
        sampled_frames: Sequence[int],
        image_path_template: str = "{video_id}/{frame:06d}.jpg",
        group: str | None = None,
    ) -> VideoSpan:
        """Assign the next contiguous id block to ``video_id``.

        ``sampled_frames`` must be strictly ascending and deduplicated; the
        ingest layer collapses duplicates before calling this.
        """
        if self._frozen:
            raise CatalogFrozen("catalog is frozen; no further registration")
        if video_id in self._spans:
            raise DuplicateVideo(video_id)
        if len(sampled_frames) == 0:
            raise EmptyScene(f"no sampled frames for {video_id!r}")
        if any(b <= a for a, b in zip(sampled_frames, sampled_frames[1:])):
            raise NonMonotonicFrames(f"frames for {video_id!r} are not strictly ascending")
        if not fps > 0:
            raise ValueError(f"fps must be positive, got {fps}")

        start = len(self._records) + 1
        for frame in sampled_frames:
            self._records.append(
                KeyframeRecord(
                    keyframe_id=len(self._records) + 1,
                    video_id=video_id,
                    frame_number=int(frame),
                    fps=float(fps),
                    image_path=image_path_template.format(video_id=video_id, frame=int(frame)),
                )
            )
        span = VideoSpan(video_id=video_id, start=start, end=len(self._records))
        self._spans[video_id] = span
        if group is not None:
            self._groups[video_id] = group
        return span

    def freeze(self) -> "Catalog":
        self._frozen = True
        return self

    # --- queries --------------------------------------------------------

    def __len__(self) -> int:
        return len(self._records)

    @property
    def size(self) -> int:
        return len(self._records)

    @property
    def video_ids(self) -> list[str]:
        return list(self._spans.keys())

    def spans(self) -> list[VideoSpan]:
        return list(self._spans.values())

    def span_of(self, video_id: str) -> VideoSpan:
        try:
            return self._spans[video_id]
        except KeyError:
            raise UnknownVideo(video_id) from None

    def group_of(self, video_id: str) -> str | None:
        if video_id not in self._spans:
            raise UnknownVideo(video_id)
        return self._groups.get(video_id)

    def get(self, keyframe_id: int) -> KeyframeRecord:
        if not 1 <= keyframe_id <= len(self._records):
            raise UnknownKeyframe([keyframe_id])
        return self._records[keyframe_id - 1]

    def hydrate(self, keyframe_ids: Iterable[int]) -> list[KeyframeRecord]:
        """Resolve ids to records, preserving input order.

        Raises UnknownKeyframe listing *every* id outside the catalog rather
        than silently dropping them.
        """
        ids = list(keyframe_ids)
        unknown = [i for i in ids if not 1 <= i <= len(self._records)]
        if unknown:
            raise UnknownKeyframe(unknown)
        return [self._records[i - 1] for i in ids]

    def neighbors(self, keyframe_id: int) -> tuple[int | None, int | None]:
        """Previous/next keyframe ids within the same video span."""
        rec = self.get(keyframe_id)
        span = self._spans[rec.video_id]
        prev_id = keyframe_id - 1 if keyframe_id > span.start else None
        next_id = keyframe_id + 1 if keyframe_id < span.end else None
        return prev_id, next_id

    def video_mask(
        self,
        video_ids: Iterable[str] | None = None,
        groups: Iterable[str] | None = None,
    ) -> np.ndarray | None:
        """Boolean mask over [1, T] selecting the given videos/groups.

        Both constraints apply when both are given. Returns None when neither
        filter is set (no masking needed).
        """
        if video_ids is None and groups is None:
            return None
        mask = np.zeros(len(self._records), dtype=bool)
        if video_ids is not None:
            for vid in video_ids:
                span = self.span_of(vid)
                mask[span.start - 1 : span.end] = True
        if groups is not None:
            wanted = set(groups)
            group_mask = np.zeros(len(self._records), dtype=bool)
            for vid, span in self._spans.items():
                if self._groups.get(vid) in wanted:
                    group_mask[span.start - 1 : span.end] = True
            mask = group_mask if video_ids is None else (mask & group_mask)
        return mask

    # --- persistence ----------------------------------------------------

    def to_payload(self) -> dict:
        return {
            "version": CATALOG_VERSION,
            "keyframes": [
                {
                    "keyframe_id": r.keyframe_id,
                    "video_id": r.video_id,
                    "frame_number": r.frame_number,
                    "fps": r.fps,
                    "image_path": r.image_path,
                }
                for r in self._records
            ],
            "spans": [
                {"video_id": s.video_id, "start": s.start, "end": s.end}
                for s in self._spans.values()
            ],
            "groups": dict(self._groups),
        }

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(canonical_json(self.to_payload()))
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "Catalog":
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
        if payload.get("version") != CATALOG_VERSION:
            raise ValueError(f"unsupported catalog version: {payload.get('version')!r}")
        cat = cls()
        groups = payload.get("groups", {})
        by_video: dict[str, list[dict]] = {}
        order: list[str] = []
        for row in payload["keyframes"]:
            vid = row["video_id"]
            if vid not in by_video:
                by_video[vid] = []
                order.append(vid)
            by_video[vid].append(row)
        for vid in order:
            rows = by_video[vid]
            cat.register_video(
                vid,
                fps=rows[0]["fps"],
                sampled_frames=[r["frame_number"] for r in rows],
                group=groups.get(vid),
            )
            # restore stored paths verbatim (templates are an ingest-time concern)
            span = cat._spans[vid]
            for row, idx in zip(rows, range(span.start, span.end + 1)):
                old = cat._records[idx - 1]
                cat._records[idx - 1] = KeyframeRecord(
                    keyframe_id=old.keyframe_id,
                    video_id=old.video_id,
                    frame_number=old.frame_number,
                    fps=old.fps,
                    image_path=row["image_path"],
                )
        declared = {(s["video_id"], s["start"], s["end"]) for s in payload["spans"]}
        rebuilt = {(s.video_id, s.start, s.end) for s in cat._spans.values()}
        if declared != rebuilt:
            raise ValueError("span table inconsistent with keyframe rows")
        return cat.freeze()
