"""Command-line driver.

Exit codes: 0 success, 1 usage error, 2 ingestion failure, 3 store failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import retrieval, service
from .errors import (
    DanglingEdgeError,
    Docs2kgError,
    JsonlParseError,
    SinkError,
    StoreError,
)
from .ingest import IngestOptions
from .model import DocFormat, NodeKind
from .pipeline import ingest_into, read_input
from .retrieval import HashingEmbedder, RemoteEmbedder, build_index
from .store import (
    GraphStore,
    NodeFilter,
    edge_record,
    export_bytes,
    node_record,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INGEST = 2
EXIT_STORE = 3

_FORMAT_FLAGS = {
    "auto": None,
    "pdf": DocFormat.PDF_GENERATED,
    "html": DocFormat.HTML,
    "eml": DocFormat.EMAIL,
    "xlsx": DocFormat.EXCEL,
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems instead of exiting with code 2."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="docs2kg", description="Documents to knowledge graph")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_store_arg(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--kg",
            default=os.environ.get(service.ENV_STORE),
            help="graph store directory (env DOCS2KG_STORE)",
        )

    p_ingest = sub.add_parser("ingest", help="parse files into the store")
    p_ingest.add_argument("paths", nargs="+")
    add_store_arg(p_ingest)
    p_ingest.add_argument("--format", choices=sorted(_FORMAT_FLAGS), default="auto")
    p_ingest.add_argument(
        "--layout-endpoint",
        default=os.environ.get(service.ENV_LAYOUT_ENDPOINT),
        help="layout-analysis service for scanned PDFs (env DOCS2KG_LAYOUT_ENDPOINT)",
    )
    p_ingest.add_argument(
        "--scanned-threshold",
        type=int,
        default=IngestOptions.scanned_threshold,
        help="chars/page below which a PDF routes to the layout service",
    )

    p_export = sub.add_parser("export", help="write the canonical JSONL")
    add_store_arg(p_export)
    p_export.add_argument("--out", required=True)

    p_query = sub.add_parser("query", help="components-with-roots as JSONL")
    add_store_arg(p_query)
    p_query.add_argument("--years", help="comma-separated years")
    p_query.add_argument("--kind", help="comma-separated node kinds")
    p_query.add_argument("--contains", help="case-insensitive text match")
    p_query.add_argument("--doc", help="comma-separated doc ids")

    p_retrieve = sub.add_parser("retrieve", help="anchors + assembled context")
    add_store_arg(p_retrieve)
    p_retrieve.add_argument("--query", required=True)
    p_retrieve.add_argument("--top-k", type=int, default=retrieval.DEFAULT_TOP_K)
    p_retrieve.add_argument("--hops", type=int, default=retrieval.DEFAULT_HOPS)
    p_retrieve.add_argument(
        "--embed-endpoint", default=os.environ.get(service.ENV_EMBED_ENDPOINT)
    )

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    add_store_arg(p_serve)
    p_serve.add_argument(
        "--port",
        type=int,
        default=int(os.environ.get(service.ENV_PORT, service.DEFAULT_PORT)),
    )
    p_serve.add_argument(
        "--layout-endpoint", default=os.environ.get(service.ENV_LAYOUT_ENDPOINT)
    )
    p_serve.add_argument(
        "--embed-endpoint", default=os.environ.get(service.ENV_EMBED_ENDPOINT)
    )
    return parser


def _require_store_dir(args: argparse.Namespace) -> Path:
    if not args.kg:
        raise _UsageError("--kg (or DOCS2KG_STORE) is required")
    return Path(args.kg)


def _positive(name: str, value: int) -> int:
    if value <= 0:
        raise _UsageError(f"{name} must be positive")
    return value


def main(argv: list[str] | None = None) -> int:
    # warnings already reach stderr via explicit prints; DOCS2KG_LOG opts in
    logging.basicConfig(level=os.environ.get("DOCS2KG_LOG", "ERROR"))
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _run(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (StoreError, SinkError, JsonlParseError, DanglingEdgeError) as exc:
        print(f"store error: {exc}", file=sys.stderr)
        return EXIT_STORE
    except Docs2kgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INGEST
    except KeyboardInterrupt:
        return EXIT_OK


def _run(args: argparse.Namespace) -> int:
    if args.command == "ingest":
        return _cmd_ingest(args)
    if args.command == "export":
        return _cmd_export(args)
    if args.command == "query":
        return _cmd_query(args)
    if args.command == "retrieve":
        return _cmd_retrieve(args)
    if args.command == "serve":
        return _cmd_serve(args)
    raise _UsageError(f"unknown command {args.command!r}")


def _cmd_ingest(args: argparse.Namespace) -> int:
    store_dir = _require_store_dir(args)
    options = IngestOptions(
        scanned_threshold=_positive("--scanned-threshold", args.scanned_threshold),
        layout_endpoint=args.layout_endpoint,
    )
    fmt = _FORMAT_FLAGS[args.format]
    inputs = [(read_input(path), str(path), fmt) for path in args.paths]
    store = GraphStore.load_or_empty(store_dir)
    report = ingest_into(store.kg, inputs, options)
    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    GraphStore(report.graph).save(store_dir)
    print(
        f"ingested {len(report.added_doc_ids)} document(s), "
        f"skipped {len(report.skipped)}, store at {store_dir}"
    )
    return EXIT_OK


def _cmd_export(args: argparse.Namespace) -> int:
    store = GraphStore.load(_require_store_dir(args))
    data = export_bytes(store.kg)
    try:
        if args.out == "-":
            sys.stdout.buffer.write(data)
        else:
            Path(args.out).write_bytes(data)
    except OSError as exc:
        raise SinkError(str(exc)) from exc
    return EXIT_OK


def _parse_filter(args: argparse.Namespace) -> NodeFilter:
    kinds = None
    if args.kind:
        try:
            kinds = {NodeKind(k.strip()) for k in args.kind.split(",") if k.strip()}
        except ValueError as exc:
            raise _UsageError(str(exc)) from exc
    years = None
    if args.years:
        try:
            years = {int(y) for y in args.years.split(",") if y.strip()}
        except ValueError as exc:
            raise _UsageError(f"bad --years: {exc}") from exc
    doc_ids = None
    if args.doc:
        doc_ids = {d.strip() for d in args.doc.split(",") if d.strip()}
    return NodeFilter(
        kinds=kinds, text_contains=args.contains, years=years, doc_ids=doc_ids
    )


def _cmd_query(args: argparse.Namespace) -> int:
    store = GraphStore.load(_require_store_dir(args))
    subgraph = store.components_with_roots(_parse_filter(args))
    out = sys.stdout
    for node in subgraph.nodes:
        out.write(json.dumps(node_record(node), sort_keys=True, ensure_ascii=False))
        out.write("\n")
    for edge in subgraph.edges:
        out.write(json.dumps(edge_record(edge), sort_keys=True, ensure_ascii=False))
        out.write("\n")
    return EXIT_OK


def _cmd_retrieve(args: argparse.Namespace) -> int:
    store = GraphStore.load(_require_store_dir(args))
    embedder = (
        RemoteEmbedder(args.embed_endpoint) if args.embed_endpoint else HashingEmbedder()
    )
    index = build_index(store.kg, embedder)
    k = _positive("--top-k", args.top_k)
    if args.hops < 0:
        raise _UsageError("--hops must be >= 0")
    anchors = retrieval.top_k_anchors(index, args.query, k=k, embedder=embedder)
    subgraph = retrieval.expand_anchors(store, anchors, hops=args.hops)
    context = retrieval.assemble_context(subgraph)
    for anchor in anchors:
        node = store.kg.nodes[anchor.node_id]
        print(f"{anchor.score:.6f}\t{anchor.node_id}\t[{node.kind.value}] {node.text}")
    print()
    print(context)
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    store_dir = _require_store_dir(args)
    service.serve(
        store_dir,
        port=args.port,
        layout_endpoint=args.layout_endpoint,
        embed_endpoint=args.embed_endpoint,
    )
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
