"""HTTP facade over ingestion, the graph store, and retrieval.

Endpoints (all JSON):

- ``POST /ingest``        multipart file -> ``{"doc_id", "doc_ids", "warnings"}``
- ``GET  /nodes``         query params kind/contains/years/doc -> ``{"nodes": [...]}``
- ``GET  /neighbors``     id/hops/rels/direction -> subgraph
- ``POST /query``         NodeFilter JSON -> components-with-roots subgraph
- ``POST /retrieve``      ``{"query", "k", "hops"}`` -> anchors + subgraph + context
- ``GET  /graph/summary`` node/edge/document counts
- ``GET  /export``        the canonical JSONL stream

Subgraphs reuse the JSONL record objects inside arrays, so there is exactly
one wire schema. Reads run against an immutable store snapshot; /ingest
takes the writer lock, persists, and swaps the snapshot.
"""

from __future__ import annotations

import email
import email.policy
import json
import logging
import threading
import urllib.parse
from dataclasses import dataclass
from enum import Enum
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from . import retrieval
from .errors import (
    Docs2kgError,
    PortInUseError,
    StoreError,
    UnknownFormatError,
    UnknownNodeError,
)
from .ingest import IngestOptions
from .model import NodeKind, RelKind
from .pipeline import ingest_into
from .retrieval import (
    Embedder,
    EmbeddingIndex,
    HashingEmbedder,
    RemoteEmbedder,
    build_index,
)
from .store import GraphStore, NodeFilter, Subgraph, edge_record, node_record

logger = logging.getLogger(__name__)

DEFAULT_PORT = 8402

ENV_STORE = "DOCS2KG_STORE"
ENV_PORT = "DOCS2KG_PORT"
ENV_LAYOUT_ENDPOINT = "DOCS2KG_LAYOUT_ENDPOINT"
ENV_EMBED_ENDPOINT = "DOCS2KG_EMBED_ENDPOINT"


class ApiCode(str, Enum):
    BAD_REQUEST = "BadRequest"
    NOT_FOUND = "NotFound"
    UNSUPPORTED = "Unsupported"
    INTERNAL = "Internal"


_HTTP_STATUS = {
    ApiCode.BAD_REQUEST: 400,
    ApiCode.NOT_FOUND: 404,
    ApiCode.UNSUPPORTED: 415,
    ApiCode.INTERNAL: 500,
}


class ApiError(Docs2kgError):
    def __init__(self, code: ApiCode, message: str):
        super().__init__(message)
        self.code = code
        self.status = _HTTP_STATUS[code]


def subgraph_payload(subgraph: Subgraph) -> dict:
    return {
        "nodes": [node_record(n) for n in subgraph.nodes],
        "edges": [edge_record(e) for e in subgraph.edges],
    }


@dataclass(frozen=True)
class Snapshot:
    """Immutable (store, index) pair; readers grab one reference per request."""

    store: GraphStore
    index: EmbeddingIndex


@dataclass
class AppState:
    """Shared service state; the snapshot is swapped wholesale on ingest."""

    snapshot: Snapshot
    embedder: Embedder
    store_dir: Path
    options: IngestOptions
    write_lock: threading.Lock

    @property
    def store(self) -> GraphStore:
        return self.snapshot.store

    @classmethod
    def create(
        cls,
        store_dir: str | Path,
        layout_endpoint: str | None = None,
        embed_endpoint: str | None = None,
        options: IngestOptions | None = None,
    ) -> "AppState":
        options = options or IngestOptions()
        options.layout_endpoint = layout_endpoint or options.layout_endpoint
        embedder: Embedder = (
            RemoteEmbedder(embed_endpoint) if embed_endpoint else HashingEmbedder()
        )
        store = GraphStore.load_or_empty(store_dir)
        return cls(
            snapshot=Snapshot(store=store, index=build_index(store.kg, embedder)),
            embedder=embedder,
            store_dir=Path(store_dir),
            options=options,
            write_lock=threading.Lock(),
        )

    def ingest(self, data: bytes, filename: str) -> dict:
        with self.write_lock:
            report = ingest_into(
                self.snapshot.store.kg, [(data, filename, None)], self.options
            )
            store = GraphStore(report.graph)
            store.save(self.store_dir)
            self.snapshot = Snapshot(
                store=store, index=build_index(store.kg, self.embedder)
            )
        doc_ids = report.added_doc_ids
        return {
            "doc_id": doc_ids[0] if doc_ids else None,
            "doc_ids": doc_ids,
            "skipped": report.skipped,
            "warnings": report.warnings,
        }


class _Handler(BaseHTTPRequestHandler):
    server_version = "docs2kg"

    @property
    def state(self) -> AppState:
        return self.server.app_state  # type: ignore[attr-defined]

    # -- plumbing -----------------------------------------------------------------

    def log_message(self, format: str, *args) -> None:
        logger.debug("%s %s", self.address_string(), format % args)

    def _send_json(self, payload: dict | list, status: int = 200) -> None:
        body = json.dumps(payload, sort_keys=True, ensure_ascii=False).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_api_error(self, error: ApiError) -> None:
        self._send_json(
            {"code": error.code.value, "message": str(error)}, status=error.status
        )

    def _read_body(self) -> bytes:
        length = int(self.headers.get("Content-Length", "0"))
        return self.rfile.read(length)

    def _json_body(self) -> dict:
        try:
            body = json.loads(self._read_body() or b"{}")
        except json.JSONDecodeError as exc:
            raise ApiError(ApiCode.BAD_REQUEST, f"bad JSON body: {exc}") from exc
        if not isinstance(body, dict):
            raise ApiError(ApiCode.BAD_REQUEST, "body must be a JSON object")
        return body

    def _dispatch(self, method: str) -> None:
        parsed = urllib.parse.urlsplit(self.path)
        route = (method, parsed.path.rstrip("/") or "/")
        params = urllib.parse.parse_qs(parsed.query)
        try:
            handler = _ROUTES.get(route)
            if handler is None:
                raise ApiError(ApiCode.NOT_FOUND, f"no route {method} {parsed.path}")
            handler(self, params)
        except ApiError as exc:
            self._send_api_error(exc)
        except UnknownNodeError as exc:
            self._send_api_error(ApiError(ApiCode.NOT_FOUND, str(exc)))
        except UnknownFormatError as exc:
            self._send_api_error(ApiError(ApiCode.UNSUPPORTED, str(exc)))
        except Docs2kgError as exc:
            self._send_api_error(ApiError(ApiCode.BAD_REQUEST, str(exc)))
        except Exception as exc:  # pragma: no cover - last resort
            logger.exception("internal error on %s", self.path)
            self._send_api_error(ApiError(ApiCode.INTERNAL, str(exc)))

    def do_GET(self) -> None:  # noqa: N802
        self._dispatch("GET")

    def do_POST(self) -> None:  # noqa: N802
        self._dispatch("POST")

    # -- handlers -------------------------------------------------------------------

    def handle_summary(self, params: dict) -> None:
        self._send_json(self.state.store.summary())

    def handle_nodes(self, params: dict) -> None:
        store = self.state.store
        node_filter = _filter_from_params(params)
        nodes = store.find_nodes(node_filter)
        self._send_json({"nodes": [node_record(n) for n in nodes]})

    def handle_neighbors(self, params: dict) -> None:
        store = self.state.store
        node_id = _one(params, "id")
        if node_id is None:
            raise ApiError(ApiCode.BAD_REQUEST, "missing id parameter")
        hops = _int_param(params, "hops", 1)
        rels = _rels_param(params)
        direction = _one(params, "direction") or "both"
        if direction not in ("out", "in", "both"):
            raise ApiError(ApiCode.BAD_REQUEST, f"bad direction {direction!r}")
        subgraph = store.neighbors(node_id, hops, rels=rels, direction=direction)
        self._send_json(subgraph_payload(subgraph))

    def handle_query(self, params: dict) -> None:
        body = self._json_body()
        node_filter = _filter_from_json(body)
        subgraph = self.state.store.components_with_roots(node_filter)
        self._send_json(subgraph_payload(subgraph))

    def handle_retrieve(self, params: dict) -> None:
        body = self._json_body()
        query = body.get("query")
        if not isinstance(query, str) or not query:
            raise ApiError(ApiCode.BAD_REQUEST, "missing query")
        k = _as_int(body.get("k", retrieval.DEFAULT_TOP_K), "k")
        hops = _as_int(body.get("hops", retrieval.DEFAULT_HOPS), "hops")
        if k < 1 or hops < 0:
            raise ApiError(ApiCode.BAD_REQUEST, "k must be >= 1 and hops >= 0")
        rels = _rels_from_json(body.get("rels"))
        snapshot = self.state.snapshot  # one consistent (store, index) pair
        anchors = retrieval.top_k_anchors(
            snapshot.index, query, k=k, embedder=self.state.embedder
        )
        subgraph = retrieval.expand_anchors(snapshot.store, anchors, hops=hops, rels=rels)
        context = retrieval.assemble_context(
            subgraph, budget_chars=_as_int(body.get("budget_chars", 4000), "budget_chars")
        )
        self._send_json(
            {
                "anchors": [
                    {"node_id": a.node_id, "score": a.score} for a in anchors
                ],
                "subgraph": subgraph_payload(subgraph),
                "context": context,
            }
        )

    def handle_export(self, params: dict) -> None:
        from .store import export_bytes

        body = export_bytes(self.state.store.kg)
        self.send_response(200)
        self.send_header("Content-Type", "application/x-ndjson")
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def handle_ingest(self, params: dict) -> None:
        filename, data = self._multipart_file()
        if not data:
            raise ApiError(ApiCode.BAD_REQUEST, "empty upload")
        result = self.state.ingest(data, filename)
        self._send_json(result)

    def _multipart_file(self) -> tuple[str, bytes]:
        content_type = self.headers.get("Content-Type", "")
        body = self._read_body()
        if not content_type.startswith("multipart/form-data"):
            raise ApiError(
                ApiCode.BAD_REQUEST, "expected multipart/form-data with a file part"
            )
        message = email.message_from_bytes(
            b"Content-Type: " + content_type.encode("latin-1") + b"\r\n\r\n" + body,
            policy=email.policy.default,
        )
        for part in message.walk():
            if part.is_multipart():
                continue
            filename = part.get_filename()
            if filename:
                return filename, part.get_payload(decode=True) or b""
        raise ApiError(ApiCode.BAD_REQUEST, "no file part in upload")


_ROUTES = {
    ("GET", "/graph/summary"): _Handler.handle_summary,
    ("GET", "/nodes"): _Handler.handle_nodes,
    ("GET", "/neighbors"): _Handler.handle_neighbors,
    ("GET", "/export"): _Handler.handle_export,
    ("POST", "/query"): _Handler.handle_query,
    ("POST", "/retrieve"): _Handler.handle_retrieve,
    ("POST", "/ingest"): _Handler.handle_ingest,
}


def _one(params: dict, key: str) -> str | None:
    values = params.get(key)
    return values[0] if values else None


def _int_param(params: dict, key: str, default: int) -> int:
    raw = _one(params, key)
    if raw is None:
        return default
    return _as_int(raw, key)


def _as_int(value, key: str) -> int:
    try:
        return int(value)
    except (TypeError, ValueError) as exc:
        raise ApiError(ApiCode.BAD_REQUEST, f"bad integer for {key}: {value!r}") from exc


def _csv(params: dict, key: str) -> list[str]:
    out: list[str] = []
    for raw in params.get(key, []):
        out.extend(part.strip() for part in raw.split(",") if part.strip())
    return out


def _rels_param(params: dict) -> set[RelKind] | None:
    names = _csv(params, "rels")
    if not names:
        return None
    return _parse_rels(names)


def _rels_from_json(raw) -> set[RelKind] | None:
    if raw is None:
        return None
    if not isinstance(raw, list):
        raise ApiError(ApiCode.BAD_REQUEST, "rels must be a list")
    return _parse_rels(raw)


def _parse_rels(names) -> set[RelKind]:
    rels = set()
    for name in names:
        try:
            rels.add(RelKind(name))
        except ValueError as exc:
            raise ApiError(ApiCode.BAD_REQUEST, f"unknown relation {name!r}") from exc
    return rels


def _parse_kinds(names) -> set[NodeKind]:
    kinds = set()
    for name in names:
        try:
            kinds.add(NodeKind(name))
        except ValueError as exc:
            raise ApiError(ApiCode.BAD_REQUEST, f"unknown node kind {name!r}") from exc
    return kinds


def _filter_from_params(params: dict) -> NodeFilter:
    kinds = _csv(params, "kind")
    years = _csv(params, "years")
    docs = _csv(params, "doc")
    return NodeFilter(
        kinds=_parse_kinds(kinds) if kinds else None,
        text_contains=_one(params, "contains"),
        years={_as_int(y, "years") for y in years} if years else None,
        doc_ids=set(docs) if docs else None,
    )


def _filter_from_json(body: dict) -> NodeFilter:
    kinds = body.get("kinds")
    years = body.get("years")
    doc_ids = body.get("doc_ids")
    text_contains = body.get("text_contains")
    if kinds is not None and not isinstance(kinds, list):
        raise ApiError(ApiCode.BAD_REQUEST, "kinds must be a list")
    if years is not None and not isinstance(years, list):
        raise ApiError(ApiCode.BAD_REQUEST, "years must be a list")
    if doc_ids is not None and not isinstance(doc_ids, list):
        raise ApiError(ApiCode.BAD_REQUEST, "doc_ids must be a list")
    return NodeFilter(
        kinds=_parse_kinds(kinds) if kinds else None,
        text_contains=str(text_contains) if text_contains is not None else None,
        years={_as_int(y, "years") for y in years} if years else None,
        doc_ids={str(d) for d in doc_ids} if doc_ids else None,
    )


class Docs2kgServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address: tuple[str, int], state: AppState):
        try:
            super().__init__(address, _Handler)
        except OSError as exc:
            if exc.errno == 98:  # EADDRINUSE
                raise PortInUseError(f"port {address[1]} already in use") from exc
            raise
        self.app_state = state


def make_server(
    store_dir: str | Path,
    port: int = DEFAULT_PORT,
    host: str = "127.0.0.1",
    layout_endpoint: str | None = None,
    embed_endpoint: str | None = None,
    options: IngestOptions | None = None,
    require_store: bool = True,
) -> Docs2kgServer:
    """Build (but do not start) the service; port 0 picks a free port."""
    if require_store and not (Path(store_dir) / "graph.jsonl").is_file():
        raise StoreError(f"no graph store under {store_dir}")
    state = AppState.create(
        store_dir,
        layout_endpoint=layout_endpoint,
        embed_endpoint=embed_endpoint,
        options=options,
    )
    return Docs2kgServer((host, port), state)


def serve(
    store_dir: str | Path,
    port: int = DEFAULT_PORT,
    host: str = "0.0.0.0",
    layout_endpoint: str | None = None,
    embed_endpoint: str | None = None,
    options: IngestOptions | None = None,
) -> None:
    """Run the service until interrupted."""
    server = make_server(
        store_dir,
        port=port,
        host=host,
        layout_endpoint=layout_endpoint,
        embed_endpoint=embed_endpoint,
        options=options,
    )
    logger.info("serving %s on %s:%d", store_dir, host, server.server_address[1])
    try:
        server.serve_forever()
    finally:
        server.server_close()
