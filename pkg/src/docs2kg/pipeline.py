"""End-to-end ingestion: bytes in, unified knowledge graph out.

The CLI and HTTP service both route through here so behavior stays
identical. Ingest is idempotent by content hash: bytes already present in
the store are skipped with a warning.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

from .builder import (
    KnowledgeGraph,
    annotate_explain,
    build_structural,
    link_attachments,
    merge,
)
from .errors import Docs2kgError, IngestionError
from .ingest import IngestOptions, segment_bytes
from .model import DocFormat, RelKind, mk_doc_id, mk_node_id

logger = logging.getLogger(__name__)


@dataclass
class IngestReport:
    """What one ingest call produced."""

    graph: KnowledgeGraph
    added_doc_ids: list[str] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


def graph_for_bytes(
    data: bytes,
    origin: str,
    fmt: DocFormat | None = None,
    options: IngestOptions | None = None,
) -> tuple[KnowledgeGraph, list[str]]:
    """Build the per-file graph: body + attachments + HasAttachment links.

    Explain edges are derived here (they only need intra-document
    structure); SameTime edges come from the merge so they always span the
    whole corpus.
    """
    ingested = segment_bytes(data, origin, fmt=fmt, options=options)
    graphs = []
    for tree in ingested.trees:
        kg = build_structural(tree)
        kg.edges.extend(annotate_explain(kg))
        graphs.append(kg)
    combined = merge(graphs)
    children_of: dict[str, list[str]] = {}
    for parent_doc, child_doc in ingested.attachment_links:
        children_of.setdefault(parent_doc, []).append(child_doc)
    for parent_doc, child_docs in children_of.items():
        combined.edges.extend(
            link_attachments(
                combined,
                mk_node_id(parent_doc, []),
                [mk_node_id(child, []) for child in child_docs],
            )
        )
    return combined, ingested.warnings


def ingest_into(
    existing: KnowledgeGraph,
    inputs: list[tuple[bytes, str, DocFormat | None]],
    options: IngestOptions | None = None,
) -> IngestReport:
    """Merge new documents into an existing graph.

    ``inputs`` are (bytes, origin, forced-format-or-None) triples. Content
    already present (by doc id) is skipped: whole files become no-ops, while
    a duplicated attachment keeps only its HasAttachment edge, pointed at
    the already-present document node (ids are content-addressed, so the
    edge resolves after the merge).
    """
    known = {source.doc_id for source in existing.sources}
    report = IngestReport(graph=existing)
    graphs: list[KnowledgeGraph] = [existing]
    for data, origin, fmt in inputs:
        doc_id = mk_doc_id(data)
        if doc_id in known:
            message = f"{origin}: already ingested (doc {doc_id}), skipping"
            logger.warning(message)
            report.skipped.append(origin)
            report.warnings.append(message)
            continue
        kg, warnings = graph_for_bytes(data, origin, fmt=fmt, options=options)
        report.warnings.extend(warnings)
        for duplicate in [s.doc_id for s in kg.sources if s.doc_id in known]:
            message = (
                f"{origin}: attachment duplicates already-ingested doc {duplicate};"
                " linking to the existing document"
            )
            logger.warning(message)
            report.warnings.append(message)
            kg = _drop_document(kg, duplicate)
        known.update(s.doc_id for s in kg.sources)
        report.added_doc_ids.extend(s.doc_id for s in kg.sources)
        graphs.append(kg)
    report.graph = merge(graphs) if len(graphs) > 1 else existing
    return report


def _drop_document(kg: KnowledgeGraph, doc_id: str) -> KnowledgeGraph:
    """Remove one document's subgraph, keeping HasAttachment edges to its root.

    The kept edges dangle inside this per-file graph but resolve in the
    final merge, where the duplicated document's nodes already exist.
    """
    root_id = mk_node_id(doc_id, [])
    nodes = {i: n for i, n in kg.nodes.items() if n.doc_id != doc_id}
    edges = [
        e
        for e in kg.edges
        if (e.src in nodes and e.dst in nodes)
        or (e.rel is RelKind.HAS_ATTACHMENT and e.src in nodes and e.dst == root_id)
    ]
    sources = [s for s in kg.sources if s.doc_id != doc_id]
    return KnowledgeGraph(nodes=nodes, edges=edges, sources=sources)


def read_input(path: str | Path) -> bytes:
    p = Path(path)
    if not p.is_file():
        raise IngestionError(f"input file not found: {p}")
    try:
        return p.read_bytes()
    except OSError as exc:
        raise IngestionError(f"cannot read {p}: {exc}") from exc


__all__ = [
    "Docs2kgError",
    "IngestReport",
    "graph_for_bytes",
    "ingest_into",
    "read_input",
]
