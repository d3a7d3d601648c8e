"""Operator command line: build indexes, search headlessly, verify, serve.

Search output in ``--format json`` is the same body the HTTP API returns
(minus the timing field, which only the HTTP layer adds), so scripted
clients can treat both interchangeably.
"""

from __future__ import annotations

import argparse
import logging
import os
import socket
import sys
from pathlib import Path

from .errors import TrakeError
from .ingest import IngestManifest, ingest_all, load_outputs, write_outputs
from .server import RetrievalService, ServiceConfig, create_app
from .util import canonical_json
from .verify import run_verification

logger = logging.getLogger(__name__)

ENV_INDEX_DIR = "TRAKE_INDEX_DIR"
ENV_REWRITER_URL = "TRAKE_REWRITER_URL"
ENV_REWRITER_KEY = "TRAKE_REWRITER_KEY"
ENV_REWRITER_FIXTURE = "TRAKE_REWRITER_FIXTURE"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trake", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="build catalog and indexes from input files")
    p_ingest.add_argument("--scenes", required=True, help="scenes.jsonl path")
    p_ingest.add_argument("--embeddings", required=True, help="embeddings binary path")
    p_ingest.add_argument("--ocr", required=True, help="ocr.jsonl path")
    p_ingest.add_argument("--out", required=True, help="output index directory")
    p_ingest.add_argument("--dim", type=int, default=64, help="expected embedding dim")

    p_search = sub.add_parser("search", help="run a search against a built index")
    p_search.add_argument("--index", default=os.environ.get(ENV_INDEX_DIR))
    p_search.add_argument("--mode", choices=["semantic", "ocr", "dante"], required=True)
    p_search.add_argument(
        "--query", action="append", default=[], help="query text (repeat for dante events)"
    )
    p_search.add_argument("--lambda", dest="lam", type=float, default=0.001)
    p_search.add_argument("--top-k", type=int, default=10)
    p_search.add_argument("--format", choices=["json", "table"], default="table")
    p_search.add_argument("--seed", type=int, default=None, help="unused; accepted for parity")

    p_verify = sub.add_parser("verify", help="run the randomized oracle suite")
    p_verify.add_argument("--trials", type=int, default=1000)
    p_verify.add_argument("--seed", type=int, default=42)
    p_verify.add_argument("--index", default=None, help="also integrity-check this index dir")
    p_verify.add_argument(
        "--inject-fault",
        choices=["tie-late"],
        default=None,
        help="deliberately break a tie rule (self-test of the suite)",
    )

    p_serve = sub.add_parser("serve", help="serve the HTTP API over a built index")
    p_serve.add_argument("--index", default=os.environ.get(ENV_INDEX_DIR))
    p_serve.add_argument("--addr", default="127.0.0.1:8765")
    p_serve.add_argument("--ui", default=None, help="static UI directory to mount at /")
    p_serve.add_argument("--workers", type=int, default=1, help="scan worker threads")

    return parser


def _require_index(index_dir: str | None) -> Path:
    if not index_dir:
        raise FileNotFoundError(f"no index dir given (flag --index or ${ENV_INDEX_DIR})")
    path = Path(index_dir)
    if not path.is_dir():
        raise FileNotFoundError(f"index dir not found: {path}")
    return path


def _build_rewriter():
    fixture = os.environ.get(ENV_REWRITER_FIXTURE)
    if fixture:
        from .quest import FixtureRewriter

        return FixtureRewriter(path=fixture)
    url = os.environ.get(ENV_REWRITER_URL)
    if url:
        from .quest import HttpRewriter

        return HttpRewriter(url, api_key=os.environ.get(ENV_REWRITER_KEY))
    return None


def cmd_ingest(args) -> int:
    for label, value in (("scenes", args.scenes), ("embeddings", args.embeddings), ("ocr", args.ocr)):
        if not Path(value).is_file():
            print(f"error: {label} file not found: {value}", file=sys.stderr)
            return 2
    manifest = IngestManifest(
        scenes_path=args.scenes,
        embeddings_path=args.embeddings,
        ocr_path=args.ocr,
        embedding_dim=args.dim,
    )
    result = ingest_all(manifest)
    summary = write_outputs(result, args.out)
    print(canonical_json(summary))
    return 0


def cmd_search(args) -> int:
    index_dir = _require_index(args.index)
    catalog, store, text_index = load_outputs(index_dir)
    service = RetrievalService(catalog, store, text_index)

    if args.mode == "dante":
        if not args.query:
            print("error: dante mode needs at least one --query", file=sys.stderr)
            return 2
        body = service.dante(queries=list(args.query), lam=args.lam, top_k=args.top_k)
    else:
        if len(args.query) != 1:
            print(f"error: {args.mode} mode needs exactly one --query", file=sys.stderr)
            return 2
        if args.mode == "semantic":
            body = service.semantic(query=args.query[0], top_k=args.top_k)
        else:
            body = service.ocr(query=args.query[0], top_k=args.top_k)

    if args.format == "json":
        print(canonical_json(body))
    else:
        _print_table(body)
    return 0


def _print_table(body: dict) -> None:
    if body["mode"] == "dante":
        print(f"{'rank':>4}  {'score':>10}  video / path")
        for rank, hit in enumerate(body["hits"], start=1):
            frames = " -> ".join(str(e["keyframe_id"]) for e in hit["path"])
            print(f"{rank:>4}  {hit['score']:>10.4f}  {hit['video_id']}  [{frames}]")
    else:
        print(f"{'rank':>4}  {'score':>10}  {'keyframe':>8}  {'video':<12} {'time':>8}")
        for rank, hit in enumerate(body["hits"], start=1):
            print(
                f"{rank:>4}  {hit['score']:>10.4f}  {hit['keyframe_id']:>8}  "
                f"{hit['video_id']:<12} {hit['timestamp_s']:>8.2f}"
            )
    if not body["hits"]:
        print("(no results)")


def _integrity_check(index_dir: Path) -> list[str]:
    import numpy as np

    problems: list[str] = []
    catalog, store, text_index = load_outputs(index_dir)
    spans = sorted(catalog.spans(), key=lambda s: s.start)
    cursor = 1
    for span in spans:
        if span.start != cursor:
            problems.append(f"span {span.video_id} starts at {span.start}, expected {cursor}")
        cursor = span.end + 1
    if cursor != catalog.size + 1:
        problems.append(f"spans cover [1, {cursor - 1}] but catalog has {catalog.size}")
    norms = np.linalg.norm(store.matrix.astype(np.float64), axis=1)
    worst = float(np.abs(norms - 1.0).max()) if len(store) else 0.0
    if worst > 1e-6:
        problems.append(f"worst row norm deviation {worst:.3e} exceeds 1e-6")
    if text_index.doc_count != catalog.size:
        problems.append(
            f"text index holds {text_index.doc_count} docs for {catalog.size} keyframes"
        )
    return problems


def cmd_verify(args) -> int:
    report = run_verification(args.trials, args.seed, fault=args.inject_fault)
    for line in report.lines():
        print(line)
    ok = report.ok
    if args.index:
        problems = _integrity_check(_require_index(args.index))
        if problems:
            ok = False
            for problem in problems:
                print(f"index integrity: {problem}")
        else:
            print("index integrity: ok")
    return 0 if ok else 1


def cmd_serve(args) -> int:
    index_dir = _require_index(args.index)
    catalog, store, text_index = load_outputs(index_dir)
    service = RetrievalService(
        catalog,
        store,
        text_index,
        rewriter=_build_rewriter(),
        config=ServiceConfig(workers=args.workers),
    )

    host, _, port_text = args.addr.rpartition(":")
    if not host or not port_text.isdigit():
        print(f"error: --addr must be host:port, got {args.addr!r}", file=sys.stderr)
        return 2
    port = int(port_text)
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((host, port))
    except OSError as exc:
        print(f"error: cannot bind {args.addr}: {exc}", file=sys.stderr)
        return 2
    finally:
        probe.close()

    ui_dir = None
    if args.ui:
        ui_dir = Path(args.ui)
        if not ui_dir.is_dir():
            print(f"error: UI dir not found: {ui_dir}", file=sys.stderr)
            return 2

    import uvicorn

    app = create_app(service, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "ingest": cmd_ingest,
        "search": cmd_search,
        "verify": cmd_verify,
        "serve": cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except TrakeError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return 2
    except (FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
