import json
from importlib import resources

import jsonschema
import pytest
from fastapi.testclient import TestClient

from trake.ingest import load_outputs
from trake.quest import FixtureRewriter
from trake.server import RetrievalService, create_app

from conftest import OOK_QUERY, OOK_REWRITE, TARGET_DESCRIPTOR


def load_schema(name: str) -> dict:
    path = resources.files("trake.schemas").joinpath(f"{name}.json")
    return json.loads(path.read_text(encoding="utf-8"))


SCHEMAS = {
    name: load_schema(name)
    for name in (
        "search_response",
        "dante_response",
        "detail_response",
        "rewrite_response",
        "exemplar_response",
        "videos_response",
        "health_response",
        "error_response",
    )
}


def check(response, schema_name, status=200):
    assert response.status_code == status, response.text
    body = response.json()
    jsonschema.validate(body, SCHEMAS[schema_name])
    return body


@pytest.fixture(scope="module")
def client(small_corpus):
    catalog, store, text_index = load_outputs(small_corpus.index_dir)
    rewriter = FixtureRewriter({OOK_QUERY: OOK_REWRITE})
    service = RetrievalService(catalog, store, text_index, rewriter=rewriter)
    return TestClient(create_app(service))


def test_health_and_videos(client):
    body = check(client.get("/api/health"), "health_response")
    assert body["keyframes"] == 24 and body["videos"] == 3
    body = check(client.get("/api/videos"), "videos_response")
    assert [v["video_id"] for v in body["videos"]] == ["vid00", "vid01", "vid02"]
    assert body["videos"][0]["group"] == "batch-a"
    assert body["videos"][1]["fps"] == 30.0


def test_semantic_planted_descriptor_rank_one(client, small_corpus):
    target = 14
    body = check(
        client.post(
            "/api/search/semantic",
            json={"query": small_corpus.descriptors[target], "top_k": 5},
        ),
        "search_response",
    )
    assert body["hits"][0]["keyframe_id"] == target
    assert body["hits"][0]["score"] == pytest.approx(1.0, abs=1e-6)
    scores = [h["score"] for h in body["hits"]]
    assert scores == sorted(scores, reverse=True)
    assert body["rewrite"] is None


def test_semantic_source_exclusivity(client):
    body = check(
        client.post("/api/search/semantic", json={"query": "x y z", "keyframe_id": 1}),
        "error_response",
        400,
    )
    assert body["error"]["code"] == "BadRequest"
    check(client.post("/api/search/semantic", json={}), "error_response", 400)


def test_semantic_by_keyframe_self_hit(client):
    body = check(
        client.post("/api/search/semantic", json={"keyframe_id": 7, "top_k": 1}),
        "search_response",
    )
    assert body["hits"][0]["keyframe_id"] == 7
    assert body["hits"][0]["score"] == pytest.approx(1.0, abs=1e-6)


def test_semantic_unknown_sources_404(client):
    body = check(
        client.post("/api/search/semantic", json={"keyframe_id": 999}), "error_response", 404
    )
    assert body["error"]["code"] == "UnknownKeyframe"
    body = check(
        client.post("/api/search/semantic", json={"exemplar_id": "ex-0404"}),
        "error_response",
        404,
    )
    assert body["error"]["code"] == "UnknownExemplar"


def test_semantic_top_k_bounds(client):
    check(client.post("/api/search/semantic", json={"query": "abc", "top_k": 0}), "error_response", 400)
    check(client.post("/api/search/semantic", json={"query": "abc", "top_k": 1001}), "error_response", 400)


def test_semantic_filters(client, small_corpus):
    body = check(
        client.post(
            "/api/search/semantic",
            json={"query": small_corpus.descriptors[2], "top_k": 24, "video_filter": ["vid01"]},
        ),
        "search_response",
    )
    assert body["hits"] and all(h["video_id"] == "vid01" for h in body["hits"])
    body = check(
        client.post(
            "/api/search/semantic",
            json={"query": small_corpus.descriptors[2], "top_k": 24, "group_filter": ["batch-b"]},
        ),
        "search_response",
    )
    assert body["hits"] and all(h["video_id"] == "vid02" for h in body["hits"])
    check(
        client.post(
            "/api/search/semantic", json={"query": "abc", "video_filter": ["missing"]}
        ),
        "error_response",
        404,
    )


def test_semantic_enhance_echoes_rewrite(client, quest_corpus):
    body = check(
        client.post("/api/search/semantic", json={"query": OOK_QUERY, "enhance": True}),
        "search_response",
    )
    assert body["rewrite"] == {
        "rewritten_query": OOK_REWRITE,
        "used_fallback": False,
        "provider": "fixture",
    }
    assert body["query"] == OOK_REWRITE


def test_enhance_fallback_still_200(small_corpus):
    catalog, store, text_index = load_outputs(small_corpus.index_dir)
    service = RetrievalService(catalog, store, text_index, rewriter=None)
    with TestClient(create_app(service)) as offline:
        body = check(
            offline.post("/api/search/semantic", json={"query": "some text", "enhance": True}),
            "search_response",
        )
        assert body["rewrite"]["used_fallback"] is True
        assert body["query"] == "some text"


def test_ocr_endpoint(client):
    body = check(client.post("/api/search/ocr", json={"query": "chào", "top_k": 5}), "search_response")
    ids = [h["keyframe_id"] for h in body["hits"]]
    assert ids == [4, 23]  # both greetings, ascending id at equal score
    body = check(client.post("/api/search/ocr", json={"query": ""}), "error_response", 400)
    assert body["error"]["code"] == "EmptyQuery"
    body = check(client.post("/api/search/ocr", json={"query": "zzz qqq"}), "search_response")
    assert body["hits"] == []


def test_ocr_single_document_match(client):
    body = check(client.post("/api/search/ocr", json={"query": "breaking news"}), "search_response")
    assert [h["keyframe_id"] for h in body["hits"]] == [14]
    assert body["hits"][0]["ocr_text"] == "breaking news at nine"


def test_dante_endpoint_end_to_end(client, small_corpus):
    queries = [small_corpus.descriptors[10], small_corpus.descriptors[14]]
    body = check(
        client.post("/api/search/dante", json={"queries": queries, "lambda": 0.001, "top_k": 3}),
        "dante_response",
    )
    top = body["hits"][0]
    assert top["video_id"] == "vid01"
    assert [e["keyframe_id"] for e in top["path"]] == [10, 14]
    assert body["lambda"] == 0.001
    assert body["rewrites"] is None


def test_dante_request_validation(client):
    check(client.post("/api/search/dante", json={"queries": []}), "error_response", 400)
    check(
        client.post("/api/search/dante", json={"queries": ["q"] * 17}), "error_response", 400
    )
    body = check(
        client.post("/api/search/dante", json={"queries": ["abc"], "lambda": -0.5}),
        "error_response",
        400,
    )
    assert body["error"]["code"] == "BadRequest"
    check(
        client.post("/api/search/dante", json={"queries": ["abc"], "lambda": 1.5}),
        "error_response",
        400,
    )


def test_dante_vector_queries_accepted(client, small_corpus):
    vec = small_corpus.store.get_vector(10).astype(float).tolist()
    body = check(
        client.post("/api/search/dante", json={"queries": [vec], "top_k": 1}),
        "dante_response",
    )
    assert body["queries"] == [None]
    assert body["hits"][0]["video_id"] == "vid01"


def test_detail_endpoint_neighbors_and_player_url(client):
    body = check(client.get("/api/keyframes/10"), "detail_response")
    assert body["keyframe"]["video_id"] == "vid01"
    assert body["prev"]["keyframe_id"] == 9 and body["next"]["keyframe_id"] == 11
    rec = body["keyframe"]
    assert rec["timestamp_s"] == pytest.approx(rec["frame_number"] / rec["fps"])
    assert body["player_url"] == f"https://www.youtube.com/watch?v=vid01&t={int(rec['timestamp_s'])}"

    first = check(client.get("/api/keyframes/9"), "detail_response")
    assert first["prev"] is None
    last = check(client.get("/api/keyframes/16"), "detail_response")
    assert last["next"] is None
    check(client.get("/api/keyframes/4040"), "error_response", 404)


def test_rewrite_endpoint(client):
    body = check(
        client.post("/api/quest/rewrite", json={"original_query": OOK_QUERY}),
        "rewrite_response",
    )
    assert body["rewritten_query"] == OOK_REWRITE and body["used_fallback"] is False
    body = check(
        client.post("/api/quest/rewrite", json={"original_query": "not in fixture"}),
        "rewrite_response",
    )
    assert body["used_fallback"] is True
    check(client.post("/api/quest/rewrite", json={"original_query": " "}), "error_response", 400)


def test_exemplar_upload_and_search(client, small_corpus):
    vec = small_corpus.store.get_vector(20).astype(float).tolist()
    body = check(
        client.post("/api/quest/exemplar", json={"vector": vec, "note": "web find"}),
        "exemplar_response",
    )
    ex_id = body["exemplar_id"]
    hits = check(
        client.post("/api/search/semantic", json={"exemplar_id": ex_id, "top_k": 1}),
        "search_response",
    )["hits"]
    assert hits[0]["keyframe_id"] == 20
    assert hits[0]["score"] == pytest.approx(1.0, abs=1e-6)

    wrong = check(
        client.post("/api/quest/exemplar", json={"vector": [1.0, 2.0]}), "error_response", 422
    )
    assert wrong["error"]["code"] == "DimensionMismatch"
    check(client.post("/api/quest/exemplar", json={}), "error_response", 400)


def test_identical_requests_identical_bodies(client, small_corpus):
    payload = {"query": small_corpus.descriptors[5], "top_k": 7}
    a = client.post("/api/search/semantic", json=payload).json()
    b = client.post("/api/search/semantic", json=payload).json()
    a.pop("took_ms"), b.pop("took_ms")
    assert a == b


def test_concurrent_requests_share_frozen_state(client, small_corpus):
    from concurrent.futures import ThreadPoolExecutor

    semantic = {"query": small_corpus.descriptors[5], "top_k": 5}
    dante = {"queries": [small_corpus.descriptors[10], small_corpus.descriptors[14]], "top_k": 2}

    def one(i: int):
        if i % 2 == 0:
            r = client.post("/api/search/semantic", json=semantic)
        else:
            r = client.post("/api/search/dante", json=dante)
        assert r.status_code == 200
        body = r.json()
        body.pop("took_ms")
        return i % 2, body

    with ThreadPoolExecutor(max_workers=8) as pool:
        outcomes = list(pool.map(one, range(16)))
    reference = {0: None, 1: None}
    for kind, body in outcomes:
        if reference[kind] is None:
            reference[kind] = body
        assert body == reference[kind]
