"""docs2kg: heterogeneous documents into one multimodal knowledge graph.

Parsers normalize web pages, emails, workbooks and PDFs into segment trees;
the builder turns trees into a unified graph of structural and semantic
relations; the store persists it as byte-stable JSONL and answers
structural queries; retrieval selects embedding anchors and expands them
n hops into an augmented context.
"""

from .builder import (
    KnowledgeGraph,
    annotate_explain,
    annotate_same_time,
    apply_annotators,
    build_structural,
    link_attachments,
    merge,
)
from .ingest import (
    IngestOptions,
    detect_format,
    parse_email,
    parse_excel,
    parse_html,
    route_pdf,
    segment_bytes,
)
from .model import (
    DocFormat,
    DocNode,
    KgEdge,
    NodeKind,
    RelKind,
    SegmentBlock,
    SegmentTree,
    SourceDocument,
    mk_doc_id,
    mk_node_id,
)
from .pipeline import graph_for_bytes, ingest_into
from .retrieval import (
    Anchor,
    EmbeddingIndex,
    HashingEmbedder,
    assemble_context,
    build_index,
    cosine,
    expand_anchors,
    top_k_anchors,
)
from .store import (
    GraphStore,
    NodeFilter,
    Subgraph,
    export_jsonl,
    import_jsonl,
)
from .text import extract_years, split_sentences

__version__ = "0.1.0"

__all__ = [
    "Anchor",
    "DocFormat",
    "DocNode",
    "EmbeddingIndex",
    "GraphStore",
    "HashingEmbedder",
    "IngestOptions",
    "KgEdge",
    "KnowledgeGraph",
    "NodeFilter",
    "NodeKind",
    "RelKind",
    "SegmentBlock",
    "SegmentTree",
    "SourceDocument",
    "Subgraph",
    "annotate_explain",
    "annotate_same_time",
    "apply_annotators",
    "assemble_context",
    "build_index",
    "build_structural",
    "cosine",
    "detect_format",
    "expand_anchors",
    "export_jsonl",
    "extract_years",
    "graph_for_bytes",
    "import_jsonl",
    "ingest_into",
    "link_attachments",
    "merge",
    "mk_doc_id",
    "mk_node_id",
    "parse_email",
    "parse_excel",
    "parse_html",
    "route_pdf",
    "segment_bytes",
    "split_sentences",
    "top_k_anchors",
]
