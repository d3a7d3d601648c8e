"""Shared fixtures: synthetic corpora built with the toy embedder."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pytest

from trake.catalog import Catalog
from trake.embedding import embed_text
from trake.ingest import (
    IngestManifest,
    build_catalog,
    ingest_all,
    read_scenes,
    write_outputs,
)
from trake.vector_index import write_embeddings

DIM = 64


@dataclass
class CorpusSpec:
    """Declarative synthetic corpus; descriptors drive the toy embeddings."""

    scenes: list[dict] = field(default_factory=list)
    # (video_id, frame_number) -> descriptor override; default is a filler string
    descriptors: dict[tuple[str, int], str] = field(default_factory=dict)
    # (video_id, frame_number) -> OCR text
    ocr: dict[tuple[str, int], str] = field(default_factory=dict)
    dim: int = DIM

    def add_video(self, video_id: str, n_scenes: int, fps: float = 25.0, group=None):
        for j in range(n_scenes):
            scene = {"video_id": video_id, "a": 10 * j, "b": 10 * j + 9, "fps": fps}
            if group is not None:
                scene["group"] = group
            self.scenes.append(scene)

    def filler(self, video_id: str, frame: int, kid: int) -> str:
        return f"filler {video_id} clip {frame} background b{kid % 7} c{kid % 11}"


def build_corpus(root: Path, spec: CorpusSpec):
    """Write scenes/embeddings/ocr files; returns (manifest, descriptor map)."""
    root.mkdir(parents=True, exist_ok=True)
    scenes_path = root / "scenes.jsonl"
    scenes_path.write_text(
        "".join(json.dumps(s) + "\n" for s in spec.scenes), encoding="utf-8"
    )
    catalog = build_catalog(read_scenes(scenes_path), "{video_id}/{frame:06d}.jpg")

    descriptors: dict[int, str] = {}
    vectors = np.empty((catalog.size, spec.dim), dtype=np.float32)
    for kid in range(1, catalog.size + 1):
        rec = catalog.get(kid)
        text = spec.descriptors.get(
            (rec.video_id, rec.frame_number), spec.filler(rec.video_id, rec.frame_number, kid)
        )
        descriptors[kid] = text
        vectors[kid - 1] = embed_text(text, spec.dim)
    emb_path = root / "embeddings.trke"
    write_embeddings(emb_path, np.arange(1, catalog.size + 1, dtype=np.uint64), vectors)

    ocr_path = root / "ocr.jsonl"
    with open(ocr_path, "w", encoding="utf-8") as fh:
        for (vid, frame), text in spec.ocr.items():
            fh.write(json.dumps({"video_id": vid, "frame_number": frame, "ocr_text": text}) + "\n")

    manifest = IngestManifest(
        scenes_path=str(scenes_path),
        embeddings_path=str(emb_path),
        ocr_path=str(ocr_path),
        embedding_dim=spec.dim,
    )
    return manifest, descriptors


def small_spec() -> CorpusSpec:
    """3 videos x 8 keyframes with some OCR text and groups."""
    spec = CorpusSpec()
    spec.add_video("vid00", 2, fps=25.0, group="batch-a")
    spec.add_video("vid01", 2, fps=30.0, group="batch-a")
    spec.add_video("vid02", 2, fps=25.0, group="batch-b")
    spec.ocr[("vid00", 0)] = "PHÚ XUÂN – GIA ĐỊNH những dấu ấn lịch sử"
    spec.ocr[("vid00", 9)] = "xin chào buổi sáng"
    spec.ocr[("vid01", 13)] = "breaking news at nine"
    spec.ocr[("vid02", 16)] = "xin chào tạm biệt"
    return spec


@dataclass
class BuiltCorpus:
    index_dir: Path
    manifest: IngestManifest
    descriptors: dict[int, str]
    catalog: Catalog
    store: object
    text_index: object


def _build(root: Path, spec: CorpusSpec) -> BuiltCorpus:
    manifest, descriptors = build_corpus(root / "inputs", spec)
    result = ingest_all(manifest)
    index_dir = root / "index"
    write_outputs(result, index_dir)
    return BuiltCorpus(
        index_dir=index_dir,
        manifest=manifest,
        descriptors=descriptors,
        catalog=result.catalog,
        store=result.store,
        text_index=result.text_index,
    )


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory) -> BuiltCorpus:
    return _build(tmp_path_factory.mktemp("small"), small_spec())


# --- the planted multi-event corpus -----------------------------------------

PLANTED_VIDEO = "p17"
PLANTED_LOCALS = (5, 13, 20)  # 0-based offsets within the video span; gaps 8 and 7
EVENTS = (
    "a worker lifts a silver panel onto the assembly bench",
    "the worker fastens the panel with a yellow drill",
    "the finished panel slides down the output ramp",
)
# each event descriptor also appears in two other videos, temporally incoherent
DECOYS = {
    0: (("p03", 30), ("p28", 2)),
    1: (("p07", 11), ("p33", 35)),
    2: (("p11", 8), ("p41", 22)),
}


def planted_spec() -> CorpusSpec:
    """50 videos x 40 keyframes; one video carries all three events in order."""
    spec = CorpusSpec()
    for v in range(50):
        spec.add_video(f"p{v:02d}", 10, fps=25.0, group=f"set-{v % 5}")

    def frame_of(local: int) -> int:
        # scene j covers frames [10j, 10j+9] sampled at {0,3,6,9}+10j
        scene, pos = divmod(local, 4)
        return 10 * scene + (0, 3, 6, 9)[pos]

    for event_idx, local in enumerate(PLANTED_LOCALS):
        spec.descriptors[(PLANTED_VIDEO, frame_of(local))] = EVENTS[event_idx]
        for vid, decoy_local in DECOYS[event_idx]:
            spec.descriptors[(vid, frame_of(decoy_local))] = EVENTS[event_idx]
    return spec


@pytest.fixture(scope="session")
def planted_corpus(tmp_path_factory) -> BuiltCorpus:
    return _build(tmp_path_factory.mktemp("planted"), planted_spec())


def planted_global_ids(catalog: Catalog) -> list[int]:
    span = catalog.span_of(PLANTED_VIDEO)
    return [span.start + local for local in PLANTED_LOCALS]


# --- quest fixture corpus ----------------------------------------------------

OOK_QUERY = "zorblax figurine"
OOK_REWRITE = "small purple plush monster with round ears"
TARGET_DESCRIPTOR = "small purple plush monster with round ears and a stitched smile"
CONFUSER_DESCRIPTOR = "zorblax brand logo on a billboard"


def quest_spec() -> CorpusSpec:
    """Target shares terms with the rewrite but not with the raw query; a
    confuser shares terms with the raw query only."""
    spec = CorpusSpec()
    for v in range(12):
        spec.add_video(f"q{v}", 3)
    spec.descriptors[("q2", 13)] = TARGET_DESCRIPTOR
    spec.descriptors[("q4", 6)] = CONFUSER_DESCRIPTOR
    # soft distractors: plush toys that are not purple monsters
    spec.descriptors[("q0", 0)] = "orange plush fox with a fluffy tail on a shelf"
    spec.descriptors[("q7", 23)] = "giant teddy bear plush in a toy store window"
    spec.descriptors[("q9", 10)] = "round blue ball rolling across a wooden floor"
    return spec


@pytest.fixture(scope="session")
def quest_corpus(tmp_path_factory) -> BuiltCorpus:
    return _build(tmp_path_factory.mktemp("quest"), quest_spec())
