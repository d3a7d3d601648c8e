import numpy as np
import pytest

from trake.errors import DimensionMismatch, EmptyStore, UnknownKeyframe
from trake.vector_index import (
    VectorStore,
    read_embeddings,
    row_scores,
    search_by_keyframe,
    search_topk,
    write_embeddings,
)


def unit_rows(raw: np.ndarray) -> np.ndarray:
    return (raw / np.linalg.norm(raw, axis=1)[:, None]).astype(np.float32)


def random_store(rng, count: int, dim: int = 64, duplicates: int = 0) -> VectorStore:
    raw = rng.normal(size=(count, dim))
    for _ in range(duplicates):
        i, j = rng.integers(0, count, size=2)
        raw[i] = raw[j]
    return VectorStore(np.arange(1, count + 1, dtype=np.uint64), unit_rows(raw))


def argsort_oracle(store: VectorStore, query, k, mask=None, threshold=None):
    """Full stable sort of the raw scores; the definition of correctness."""
    scores = store.matrix @ np.asarray(query, dtype=np.float32)
    order = np.argsort(-scores, kind="stable")
    out = []
    for pos in order:
        if mask is not None and not mask[pos]:
            continue
        if threshold is not None and not scores[pos] >= np.float32(threshold):
            continue
        out.append((int(store.ids[pos]), float(scores[pos])))
        if len(out) == k:
            break
    return out


def test_self_similarity_rank_one():
    rng = np.random.default_rng(7)
    store = random_store(rng, 50)
    query = store.matrix[17].astype(np.float64)
    hits = search_topk(store, query, 1)
    assert hits[0].keyframe_id == 18
    assert hits[0].score == pytest.approx(1.0, abs=1e-6)


def test_orthogonal_pair():
    store = VectorStore(
        np.array([1, 2], dtype=np.uint64),
        np.array([[1.0, 0.0], [0.0, 1.0]], dtype=np.float32),
    )
    hits = search_topk(store, [1.0, 0.0], 2)
    assert [(h.keyframe_id, h.score) for h in hits] == [(1, 1.0), (2, 0.0)]


def test_topk_equals_argsort_oracle():
    rng = np.random.default_rng(11)
    store = random_store(rng, 200)
    query = rng.normal(size=64)
    query /= np.linalg.norm(query)
    got = [(h.keyframe_id, h.score) for h in search_topk(store, query, 10)]
    assert got == argsort_oracle(store, query.astype(np.float32), 10)


def test_duplicate_rows_tie_by_ascending_id():
    rng = np.random.default_rng(3)
    raw = rng.normal(size=(10, 16))
    raw[7] = raw[2]  # ids 8 and 3 tie exactly
    store = VectorStore(np.arange(1, 11, dtype=np.uint64), unit_rows(raw))
    hits = search_topk(store, store.matrix[2], 2)
    assert [h.keyframe_id for h in hits] == [3, 8]
    assert hits[0].score == hits[1].score


def test_threshold_and_mask_filters():
    rng = np.random.default_rng(5)
    store = random_store(rng, 60)
    query = store.matrix[0]
    mask = np.zeros(60, dtype=bool)
    mask[:30] = True
    hits = search_topk(store, query, 60, mask=mask)
    assert all(h.keyframe_id <= 30 for h in hits)
    hits = search_topk(store, query, 60, threshold=0.2)
    assert all(h.score >= 0.2 for h in hits)
    assert hits == search_topk(store, query, 60, threshold=0.2, workers=4)
    assert search_topk(store, query, 5, threshold=2.0) == []


def test_parallel_scan_identical_to_serial():
    rng = np.random.default_rng(13)
    store = random_store(rng, 3000, dim=32, duplicates=5)
    query = rng.normal(size=32)
    serial = search_topk(store, query, 50, workers=1)
    parallel = search_topk(store, query, 50, workers=4)
    assert serial == parallel
    assert np.array_equal(row_scores(store, query, workers=1), row_scores(store, query, workers=4))


def test_topk_oracle_sweep_small_stores():
    rng = np.random.default_rng(17)
    for trial in range(60):
        count = int(rng.integers(2, 120))
        store = random_store(rng, count, dim=16, duplicates=int(rng.integers(0, 4)))
        query = rng.normal(size=16)
        k = int(rng.integers(1, count + 3))
        threshold = float(rng.uniform(-0.5, 0.5)) if trial % 3 == 0 else None
        mask = None
        if trial % 4 == 0:
            mask = rng.random(count) < 0.5
        got = [(h.keyframe_id, h.score) for h in search_topk(store, query, k, mask, threshold)]
        assert got == argsort_oracle(store, query.astype(np.float32), k, mask, threshold)


def test_row_scores_matches_scalar_loop():
    rng = np.random.default_rng(23)
    store = random_store(rng, 50, dim=16)
    query = rng.normal(size=16)
    query /= np.linalg.norm(query)
    got = row_scores(store, query)
    q32 = query.astype(np.float32)
    for pos in range(50):
        want = float(sum(float(a) * float(b) for a, b in zip(store.matrix[pos], q32)))
        assert got[pos] == pytest.approx(want, abs=1e-5)
    assert np.all(np.abs(got) <= 1.0 + 1e-6)


def test_query_scale_invariance_of_ranking():
    rng = np.random.default_rng(29)
    store = random_store(rng, 150)
    query = rng.normal(size=64)
    base = [h.keyframe_id for h in search_topk(store, query / np.linalg.norm(query), 20)]
    for scale in (1e-3, 7.0, 123.456):
        scaled = scale * query
        ranked = [h.keyframe_id for h in search_topk(store, scaled / np.linalg.norm(scaled), 20)]
        assert ranked == base


def test_dimension_and_empty_store_errors():
    rng = np.random.default_rng(31)
    store = random_store(rng, 5, dim=8)
    with pytest.raises(DimensionMismatch):
        search_topk(store, np.ones(9), 1)
    empty = VectorStore(np.empty(0, dtype=np.uint64), np.empty((0, 8), dtype=np.float32))
    with pytest.raises(EmptyStore):
        search_topk(empty, np.ones(8), 1)


def test_search_by_keyframe_equals_vector_search():
    rng = np.random.default_rng(37)
    store = random_store(rng, 80)
    anchor = 42
    direct = search_by_keyframe(store, anchor, 10)
    assert direct[0].keyframe_id == anchor
    assert direct[0].score == pytest.approx(1.0, abs=1e-6)
    assert direct == search_topk(store, store.get_vector(anchor), 10)
    with pytest.raises(UnknownKeyframe):
        search_by_keyframe(store, 10**6, 1)


def test_file_roundtrip_byte_identical(tmp_path):
    rng = np.random.default_rng(41)
    store = random_store(rng, 33, dim=24)
    first = tmp_path / "emb.trke"
    store.save(first)
    loaded = VectorStore.load(first)
    second = tmp_path / "again.trke"
    loaded.save(second)
    assert first.read_bytes() == second.read_bytes()
    assert np.array_equal(loaded.matrix, store.matrix)
    assert np.array_equal(loaded.ids, store.ids)


def test_loader_rejects_bad_magic_and_version(tmp_path):
    rng = np.random.default_rng(43)
    store = random_store(rng, 4, dim=8)
    path = tmp_path / "emb.trke"
    store.save(path)
    blob = bytearray(path.read_bytes())

    bad_magic = tmp_path / "bad_magic.trke"
    bad_magic.write_bytes(b"NOPE" + bytes(blob[4:]))
    with pytest.raises(ValueError, match="magic"):
        read_embeddings(bad_magic)

    bad_version = tmp_path / "bad_version.trke"
    tampered = bytearray(blob)
    tampered[4] = 9
    bad_version.write_bytes(bytes(tampered))
    with pytest.raises(ValueError, match="version"):
        read_embeddings(bad_version)

    truncated = tmp_path / "short.trke"
    truncated.write_bytes(bytes(blob[:-5]))
    with pytest.raises(ValueError, match="size"):
        read_embeddings(truncated)


def test_store_rejects_unsorted_ids_and_nonunit_rows():
    with pytest.raises(ValueError, match="ascending"):
        VectorStore(np.array([2, 1], dtype=np.uint64), unit_rows(np.random.default_rng(0).normal(size=(2, 4))))
    with pytest.raises(ValueError, match="non-unit"):
        VectorStore(np.array([1, 2], dtype=np.uint64), np.ones((2, 4), dtype=np.float32))
