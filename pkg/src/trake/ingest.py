"""Offline ingestion: scene lists + embeddings + OCR dumps -> frozen indexes.

Scene boundaries, embedding vectors, and OCR text all arrive as data; this
module samples keyframes per scene, assigns the global id space, and
populates the vector and text indexes. Running it twice on the same inputs
produces byte-identical output files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .catalog import Catalog
from .errors import DanglingRecord, DimensionMismatch, InvalidRange, MissingEmbedding
from .text_index import TextIndex
from .vector_index import VectorStore, read_embeddings

CATALOG_FILE = "catalog.json"
EMBEDDINGS_FILE = "embeddings.trke"
TEXT_INDEX_FILE = "textindex.json"


@dataclass(frozen=True, slots=True)
class SceneRange:
    """One detected scene: source frames [a, b] of a video."""

    video_id: str
    a: int
    b: int
    fps: float
    group: str | None = None


@dataclass(slots=True)
class IngestManifest:
    scenes_path: str
    embeddings_path: str
    ocr_path: str
    embedding_dim: int
    image_path_template: str = "{video_id}/{frame:06d}.jpg"


@dataclass(slots=True)
class IngestResult:
    catalog: Catalog
    store: VectorStore
    text_index: TextIndex
    warnings: list[str] = field(default_factory=list)


def sample_keyframes(a: int, b: int) -> list[int]:
    """Four sample positions for a scene spanning frames [a, b].

    Start, end, and two interior positions: a + floor(i*(b-a)/3) for
    i in 0..3. Short scenes yield repeated frames; registration dedupes.
    """
    if a > b:
        raise InvalidRange(f"scene start {a} > end {b}")
    span = b - a
    return [a + (i * span) // 3 for i in range(4)]


def read_scenes(path) -> list[SceneRange]:
    """Parse scenes.jsonl: one {video_id, a, b, fps[, group]} object per line."""
    scenes: list[SceneRange] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: invalid JSON: {exc}") from None
            scene = SceneRange(
                video_id=str(row["video_id"]),
                a=int(row["a"]),
                b=int(row["b"]),
                fps=float(row["fps"]),
                group=row.get("group"),
            )
            if scene.a > scene.b:
                raise InvalidRange(f"{path}:{lineno}: scene start {scene.a} > end {scene.b}")
            if not scene.fps > 0:
                raise ValueError(f"{path}:{lineno}: fps must be positive")
            scenes.append(scene)
    return scenes


def read_ocr(path) -> list[dict]:
    """Parse ocr.jsonl: one {video_id, frame_number, ocr_text} object per line."""
    rows: list[dict] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: invalid JSON: {exc}") from None
            rows.append(
                {
                    "video_id": str(row["video_id"]),
                    "frame_number": int(row["frame_number"]),
                    "ocr_text": str(row["ocr_text"]),
                }
            )
    return rows


def build_catalog(scenes: list[SceneRange], image_path_template: str) -> Catalog:
    """Register videos in first-seen order with deduped, sorted sample frames."""
    by_video: dict[str, list[SceneRange]] = {}
    order: list[str] = []
    for scene in scenes:
        if scene.video_id not in by_video:
            by_video[scene.video_id] = []
            order.append(scene.video_id)
        by_video[scene.video_id].append(scene)

    catalog = Catalog()
    for vid in order:
        vid_scenes = by_video[vid]
        fps_values = {s.fps for s in vid_scenes}
        if len(fps_values) > 1:
            raise ValueError(f"conflicting fps values for video {vid!r}: {sorted(fps_values)}")
        groups = {s.group for s in vid_scenes if s.group is not None}
        if len(groups) > 1:
            raise ValueError(f"conflicting group labels for video {vid!r}: {sorted(groups)}")
        frames: set[int] = set()
        for scene in vid_scenes:
            frames.update(sample_keyframes(scene.a, scene.b))
        catalog.register_video(
            vid,
            fps=vid_scenes[0].fps,
            sampled_frames=sorted(frames),
            image_path_template=image_path_template,
            group=next(iter(groups)) if groups else None,
        )
    return catalog


def ingest_all(manifest: IngestManifest) -> IngestResult:
    """Run the full pipeline; every registered keyframe ends up with one
    unit-norm vector and one OCR document (possibly empty)."""
    scenes = read_scenes(manifest.scenes_path)
    catalog = build_catalog(scenes, manifest.image_path_template)
    total = catalog.size

    ids, matrix = read_embeddings(manifest.embeddings_path)
    if matrix.shape[1] != manifest.embedding_dim:
        raise DimensionMismatch(
            f"embeddings file dim {matrix.shape[1]} vs manifest dim {manifest.embedding_dim}"
        )
    id_list = ids.astype(np.int64)
    dangling = id_list[(id_list < 1) | (id_list > total)]
    if dangling.size:
        raise DanglingRecord(f"embedding rows for unknown keyframes: {dangling[:5].tolist()}")
    present = set(id_list.tolist())
    missing = [kid for kid in range(1, total + 1) if kid not in present]
    if missing:
        raise MissingEmbedding(f"keyframes without embeddings: {missing[:5]}")

    # normalize in float64, store float32; order rows by keyframe_id
    order = np.argsort(id_list, kind="stable")
    dense = matrix[order].astype(np.float64)
    norms = np.linalg.norm(dense, axis=1)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise ValueError(f"zero embedding vectors at keyframes {(zero + 1)[:5].tolist()}")
    dense /= norms[:, None]
    store = VectorStore(np.arange(1, total + 1, dtype=np.uint64), dense.astype(np.float32))

    frame_key = {
        (rec.video_id, rec.frame_number): rec.keyframe_id
        for rec in catalog.hydrate(range(1, total + 1))
    }
    ocr_map: dict[int, str] = {}
    for row in read_ocr(manifest.ocr_path):
        key = (row["video_id"], row["frame_number"])
        kid = frame_key.get(key)
        if kid is None:
            raise DanglingRecord(f"OCR row for unknown frame {key}")
        if kid in ocr_map:
            raise ValueError(f"duplicate OCR row for frame {key}")
        ocr_map[kid] = row["ocr_text"]

    text_index = TextIndex()
    for kid in range(1, total + 1):
        text_index.add(kid, ocr_map.get(kid, ""))

    catalog.freeze()
    return IngestResult(catalog=catalog, store=store, text_index=text_index)


def write_outputs(result: IngestResult, out_dir) -> dict:
    """Write catalog + indexes into ``out_dir``; returns a summary dict."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    result.catalog.save(out / CATALOG_FILE)
    result.store.save(out / EMBEDDINGS_FILE)
    result.text_index.save(out / TEXT_INDEX_FILE)
    return {
        "videos": len(result.catalog.video_ids),
        "keyframes": result.catalog.size,
        "dim": result.store.dim,
    }


def load_outputs(index_dir) -> tuple[Catalog, VectorStore, TextIndex]:
    """Load a previously written index directory."""
    base = Path(index_dir)
    catalog = Catalog.load(base / CATALOG_FILE)
    store = VectorStore.load(base / EMBEDDINGS_FILE)
    text_index = TextIndex.load(base / TEXT_INDEX_FILE)
    if len(store) != catalog.size:
        raise ValueError(
            f"store rows ({len(store)}) do not match catalog size ({catalog.size})"
        )
    return catalog, store, text_index
