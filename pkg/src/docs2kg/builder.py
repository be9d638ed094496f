"""Knowledge-graph construction from segment trees.

Structural pass: one Document node per source, Page/Sheet layers where the
format has them, content nodes for blocks, Sentence children under every
Paragraph, HasChild tree edges and Before/After between adjacent siblings.

Semantic pass: SameTime edges between year-co-mentioning content nodes and
Explain edges from caption-like sentences to nearby tables/figures. Focus
and SupportedBy stay reserved for pluggable annotators; no built-in rule
emits them.
"""

from __future__ import annotations

import posixpath
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .errors import DuplicateNodeIdError, UnknownNodeError
from .model import (
    BlockKind,
    DocNode,
    KgEdge,
    NodeKind,
    RelKind,
    SegmentBlock,
    SegmentTree,
    SourceDocument,
    mk_node_id,
)
from .text import extract_years, split_sentences

DEFAULT_SAME_TIME_DEGREE = 16

# Node kinds eligible for year co-mention linking.
_SAME_TIME_KINDS = frozenset(
    {NodeKind.SENTENCE, NodeKind.TABLE, NodeKind.TABLE_ROW, NodeKind.FIGURE}
)

_MEDIA_KINDS = frozenset({NodeKind.TABLE, NodeKind.FIGURE})

_NODE_KIND_OF_BLOCK = {
    BlockKind.HEADER: NodeKind.HEADER,
    BlockKind.PARAGRAPH: NodeKind.PARAGRAPH,
    BlockKind.TABLE: NodeKind.TABLE,
    BlockKind.TABLE_ROW: NodeKind.TABLE_ROW,
    BlockKind.FIGURE: NodeKind.FIGURE,
    BlockKind.SHEET: NodeKind.SHEET,
}

# An annotator takes the graph and returns new edges; the built-in rules and
# any Focus/SupportedBy plugins share this shape.
Annotator = Callable[["KnowledgeGraph"], list[KgEdge]]


def apply_annotators(kg: "KnowledgeGraph", annotators: Iterable[Annotator]) -> int:
    """Run pluggable annotators, appending their edges; returns edges added.

    This is the extension point for the reserved Focus/SupportedBy relations,
    which no built-in rule derives.
    """
    added = 0
    for annotator in annotators:
        edges = annotator(kg)
        kg.edges.extend(edges)
        added += len(edges)
    return added


@dataclass
class KnowledgeGraph:
    """The unified multimodal graph: nodes, typed edges, and provenance."""

    nodes: dict[str, DocNode] = field(default_factory=dict)
    edges: list[KgEdge] = field(default_factory=list)
    sources: list[SourceDocument] = field(default_factory=list)

    def add_node(self, node: DocNode) -> DocNode:
        if node.id in self.nodes:
            raise DuplicateNodeIdError(f"node id {node.id} already present")
        self.nodes[node.id] = node
        return node

    def document_nodes(self) -> list[DocNode]:
        return [n for n in self.nodes.values() if n.kind is NodeKind.DOCUMENT]


def build_structural(tree: SegmentTree) -> KnowledgeGraph:
    """Structural sub-graph for one document (has-child / before / after)."""
    kg = KnowledgeGraph(sources=[tree.source])
    src = tree.source
    doc_node = kg.add_node(
        DocNode(
            id=mk_node_id(src.doc_id, []),
            kind=NodeKind.DOCUMENT,
            text=posixpath.basename(src.origin.rstrip("/")) or src.origin,
            doc_id=src.doc_id,
            meta={
                "origin": src.origin,
                "format": src.format.value,
                "byte_len": str(src.byte_len),
            },
        )
    )

    top_blocks = tree.root.children
    if src.format.is_pdf and any(b.page is not None for b in top_blocks):
        _add_paged(kg, doc_node, top_blocks, src.doc_id)
    else:
        children = [
            _add_block(kg, doc_node, block, src.doc_id, [i])
            for i, block in enumerate(top_blocks)
        ]
        _link_siblings(kg, children)
    return kg


def _add_paged(
    kg: KnowledgeGraph,
    doc_node: DocNode,
    top_blocks: Sequence[SegmentBlock],
    doc_id: str,
) -> None:
    """Insert a Page layer: top-level blocks grouped by their page number."""
    by_page: dict[int, list[SegmentBlock]] = {}
    for block in top_blocks:
        by_page.setdefault(block.page or 1, []).append(block)
    page_nodes: list[DocNode] = []
    for index, page_no in enumerate(sorted(by_page)):
        page_node = kg.add_node(
            DocNode(
                id=mk_node_id(doc_id, [index]),
                kind=NodeKind.PAGE,
                text=f"page {page_no}",
                doc_id=doc_id,
                page=page_no,
            )
        )
        kg.edges.append(KgEdge(src=doc_node.id, dst=page_node.id, rel=RelKind.HAS_CHILD))
        page_nodes.append(page_node)
        children = [
            _add_block(kg, page_node, block, doc_id, [index, i])
            for i, block in enumerate(by_page[page_no])
        ]
        _link_siblings(kg, children)
    _link_siblings(kg, page_nodes)


def _add_block(
    kg: KnowledgeGraph,
    parent: DocNode,
    block: SegmentBlock,
    doc_id: str,
    path: list[int],
) -> DocNode:
    meta = dict(block.meta)
    if block.kind is BlockKind.HEADER and block.level:
        meta["level"] = str(block.level)
    node = kg.add_node(
        DocNode(
            id=mk_node_id(doc_id, path),
            kind=_NODE_KIND_OF_BLOCK[block.kind],
            text=block.text,
            doc_id=doc_id,
            page=block.page,
            bbox=block.bbox,
            meta=meta,
        )
    )
    kg.edges.append(KgEdge(src=parent.id, dst=node.id, rel=RelKind.HAS_CHILD))

    if block.kind is BlockKind.PARAGRAPH:
        sentences = [
            kg.add_node(
                DocNode(
                    id=mk_node_id(doc_id, path + [k]),
                    kind=NodeKind.SENTENCE,
                    text=sentence,
                    doc_id=doc_id,
                    page=block.page,
                    bbox=block.bbox,
                )
            )
            for k, sentence in enumerate(split_sentences(block.text))
        ]
        for sentence_node in sentences:
            kg.edges.append(
                KgEdge(src=node.id, dst=sentence_node.id, rel=RelKind.HAS_CHILD)
            )
        _link_siblings(kg, sentences)
    else:
        children = [
            _add_block(kg, node, child, doc_id, path + [i])
            for i, child in enumerate(block.children)
        ]
        _link_siblings(kg, children)
    return node


def _link_siblings(kg: KnowledgeGraph, siblings: Sequence[DocNode]) -> None:
    for a, b in zip(siblings, siblings[1:]):
        kg.edges.append(KgEdge(src=a.id, dst=b.id, rel=RelKind.BEFORE))
        kg.edges.append(KgEdge(src=b.id, dst=a.id, rel=RelKind.AFTER))


# -- semantic annotation -------------------------------------------------------


def annotate_same_time(
    kg: KnowledgeGraph, max_degree: int = DEFAULT_SAME_TIME_DEGREE
) -> list[KgEdge]:
    """Canonical SameTime edge set: year co-mention between content nodes.

    The relation is symmetric, so each edge runs from the lexicographically
    smaller id to the larger. The per-node degree cap keeps dense corpora
    bounded: edges are considered in ascending (src, dst) order and kept only
    while both endpoints are under the cap, which retains the smallest-id
    partners deterministically.
    """
    by_year: dict[int, list[str]] = {}
    for node in kg.nodes.values():
        if node.kind not in _SAME_TIME_KINDS:
            continue
        for year in extract_years(node.text):
            by_year.setdefault(year, []).append(node.id)

    shared: dict[tuple[str, str], set[int]] = {}
    for year, ids in by_year.items():
        ids = sorted(ids)
        for i, a in enumerate(ids):
            for b in ids[i + 1 :]:
                shared.setdefault((a, b), set()).add(year)

    degree: dict[str, int] = {}
    edges: list[KgEdge] = []
    for (a, b), years in sorted(shared.items()):
        if degree.get(a, 0) >= max_degree or degree.get(b, 0) >= max_degree:
            continue
        degree[a] = degree.get(a, 0) + 1
        degree[b] = degree.get(b, 0) + 1
        edges.append(
            KgEdge(
                src=a,
                dst=b,
                rel=RelKind.SAME_TIME,
                meta={"years": ",".join(str(y) for y in sorted(years))},
            )
        )
    return edges


# Caption-like sentence openers: "Table 1 ...", "Figure 2: ...", "Fig. 3 ...".
_CAPTION_RE = re.compile(r"^\s*(table|figure|fig\.?)(?![a-z0-9])", re.IGNORECASE)


def _is_caption(text: str) -> bool:
    return _CAPTION_RE.match(text) is not None


def annotate_explain(kg: KnowledgeGraph) -> list[KgEdge]:
    """Explain edges: sentence -> table/figure, never the reverse.

    A sentence explains a media node when (a) it reads like a caption
    ("Table ...", "Figure ...", "Fig. ...") and the media node is the nearest
    table/figure sibling of its paragraph (earlier wins ties), or (b) its
    paragraph sits immediately next to the media node.
    """
    children: dict[str, list[str]] = {}
    parent: dict[str, str] = {}
    for edge in kg.edges:
        if edge.rel is RelKind.HAS_CHILD:
            children.setdefault(edge.src, []).append(edge.dst)
            parent[edge.dst] = edge.src

    ordinal = {
        child: i for kids in children.values() for i, child in enumerate(kids)
    }

    pairs: set[tuple[str, str]] = set()

    def sentence_ids(paragraph_id: str) -> list[str]:
        return [
            child
            for child in children.get(paragraph_id, [])
            if kg.nodes[child].kind is NodeKind.SENTENCE
        ]

    for node in kg.nodes.values():
        if node.kind is not NodeKind.SENTENCE or not _is_caption(node.text):
            continue
        paragraph_id = parent.get(node.id)
        grandparent_id = parent.get(paragraph_id) if paragraph_id else None
        if grandparent_id is None:
            continue
        media = [
            sibling
            for sibling in children.get(grandparent_id, [])
            if kg.nodes[sibling].kind in _MEDIA_KINDS
        ]
        if not media:
            continue
        p_ord = ordinal[paragraph_id]
        nearest = min(media, key=lambda m: (abs(ordinal[m] - p_ord), ordinal[m]))
        pairs.add((node.id, nearest))

    for node in kg.nodes.values():
        if node.kind not in _MEDIA_KINDS:
            continue
        parent_id = parent.get(node.id)
        if parent_id is None:
            continue
        m_ord = ordinal[node.id]
        for sibling in children.get(parent_id, []):
            if kg.nodes[sibling].kind is not NodeKind.PARAGRAPH:
                continue
            if abs(ordinal[sibling] - m_ord) == 1:
                for sentence_id in sentence_ids(sibling):
                    pairs.add((sentence_id, node.id))

    return [
        KgEdge(src=s, dst=m, rel=RelKind.EXPLAIN) for s, m in sorted(pairs)
    ]


def link_attachments(
    kg: KnowledgeGraph, parent_doc_id: str, child_doc_ids: Sequence[str]
) -> list[KgEdge]:
    """HasAttachment edges from an email's Document to attachment Documents."""
    edges = []
    for index, child_id in enumerate(child_doc_ids):
        for node_id in (parent_doc_id, child_id):
            node = kg.nodes.get(node_id)
            if node is None:
                raise UnknownNodeError(f"no node {node_id}")
            if node.kind is not NodeKind.DOCUMENT:
                raise UnknownNodeError(f"{node_id} is {node.kind.value}, not Document")
        edges.append(
            KgEdge(
                src=parent_doc_id,
                dst=child_id,
                rel=RelKind.HAS_ATTACHMENT,
                meta={"index": str(index)},
            )
        )
    return edges


def merge(
    graphs: Iterable[KnowledgeGraph],
    max_same_time_degree: int = DEFAULT_SAME_TIME_DEGREE,
) -> KnowledgeGraph:
    """Union the graphs, then re-derive SameTime across the whole union.

    SameTime edges are replaced by the canonical set computed over the merged
    node set, so the result depends only on which documents are present:
    merging is idempotent and independent of ingest order.
    """
    merged = KnowledgeGraph()
    seen_sources: set[str] = set()
    for graph in graphs:
        for node in graph.nodes.values():
            merged.add_node(node)
        merged.edges.extend(e for e in graph.edges if e.rel is not RelKind.SAME_TIME)
        for source in graph.sources:
            if source.doc_id not in seen_sources:
                seen_sources.add(source.doc_id)
                merged.sources.append(source)
    merged.edges.extend(annotate_same_time(merged, max_degree=max_same_time_degree))
    return merged
