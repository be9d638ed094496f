"""Shared domain types and deterministic identifiers.

Everything downstream (parsers, graph builder, store, retrieval) speaks in
terms of these types. Identifiers are content/path hashes so that repeated
runs over the same inputs produce byte-identical graphs.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Sequence

from .errors import SegmentTreeError

Bbox = tuple[float, float, float, float]


class DocFormat(str, Enum):
    """Supported source document formats."""

    HTML = "html"
    EMAIL = "email"
    EXCEL = "excel"
    PDF_GENERATED = "pdf_generated"
    PDF_SCANNED = "pdf_scanned"

    @property
    def is_pdf(self) -> bool:
        return self in (DocFormat.PDF_GENERATED, DocFormat.PDF_SCANNED)


class BlockKind(str, Enum):
    """Kinds of blocks in the format-neutral segment tree."""

    HEADER = "header"
    PARAGRAPH = "paragraph"
    TABLE = "table"
    TABLE_ROW = "table_row"
    FIGURE = "figure"
    SHEET = "sheet"


class NodeKind(str, Enum):
    """Kinds of knowledge-graph nodes. Values are the wire spellings."""

    DOCUMENT = "Document"
    PAGE = "Page"
    SHEET = "Sheet"
    HEADER = "Header"
    PARAGRAPH = "Paragraph"
    SENTENCE = "Sentence"
    TABLE = "Table"
    TABLE_ROW = "TableRow"
    FIGURE = "Figure"


class RelKind(str, Enum):
    """Edge relation vocabulary. Values are the wire spellings.

    Focus and SupportedBy are schema-reserved: they are never emitted by the
    built-in rules, only by pluggable annotators.
    """

    HAS_CHILD = "HasChild"
    BEFORE = "Before"
    AFTER = "After"
    HAS_ATTACHMENT = "HasAttachment"
    SAME_TIME = "SameTime"
    FOCUS = "Focus"
    SUPPORTED_BY = "SupportedBy"
    EXPLAIN = "Explain"


def mk_doc_id(data: bytes) -> str:
    """Content hash of a source document: first 16 hex chars of SHA-256."""
    return hashlib.sha256(data).hexdigest()[:16]


def mk_node_id(doc_id: str, ordinal_path: Sequence[int]) -> str:
    """Deterministic node id from a document id and an ordinal path.

    Hashes the UTF-8 string ``doc_id + "/" + ordinals joined by "."`` and
    keeps the first 16 hex chars of the SHA-256 digest.
    """
    key = doc_id + "/" + ".".join(str(o) for o in ordinal_path)
    return hashlib.sha256(key.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class SourceDocument:
    """One ingested file: identity, format and raw provenance."""

    doc_id: str
    format: DocFormat
    origin: str
    byte_len: int

    @classmethod
    def from_bytes(cls, data: bytes, fmt: DocFormat, origin: str) -> "SourceDocument":
        return cls(doc_id=mk_doc_id(data), format=fmt, origin=origin, byte_len=len(data))


@dataclass
class SegmentBlock:
    """A block in the format-neutral segment tree.

    ``level`` is only meaningful for HEADER blocks (1..6; 0 marks the
    pseudo-root wrapper). ``meta`` carries parser extras such as an image's
    src attribute.
    """

    kind: BlockKind
    text: str = ""
    ordinal: int = 0
    level: int = 0
    bbox: Bbox | None = None
    page: int | None = None
    meta: dict[str, str] = field(default_factory=dict)
    children: list["SegmentBlock"] = field(default_factory=list)

    def add(self, child: "SegmentBlock") -> "SegmentBlock":
        """Append a child, assigning the next sibling ordinal."""
        child.ordinal = len(self.children)
        self.children.append(child)
        return child

    def walk(self) -> Iterator["SegmentBlock"]:
        """Pre-order traversal including self."""
        yield self
        for child in self.children:
            yield from child.walk()


@dataclass
class SegmentTree:
    """Parser output: a pseudo-root header (level 0) over content blocks."""

    root: SegmentBlock
    source: SourceDocument

    @classmethod
    def empty(cls, source: SourceDocument) -> "SegmentTree":
        return cls(root=SegmentBlock(kind=BlockKind.HEADER, level=0), source=source)

    def walk(self) -> Iterator[SegmentBlock]:
        yield from self.root.walk()


def validate_segment_tree(tree: SegmentTree) -> None:
    """Check every SegmentBlock invariant recursively.

    Raises SegmentTreeError on the first violation. Used by tests as the
    shared validator for all parser outputs.
    """
    root = tree.root
    if root.kind is not BlockKind.HEADER or root.level != 0:
        raise SegmentTreeError("root must be a level-0 header wrapper")
    if root.ordinal != 0:
        raise SegmentTreeError("root ordinal must be 0")
    _validate_block(root, parent=None)


def _validate_block(block: SegmentBlock, parent: SegmentBlock | None) -> None:
    if block.kind is BlockKind.HEADER:
        is_root = parent is None
        if not is_root and not 1 <= block.level <= 6:
            raise SegmentTreeError(f"header level {block.level} outside 1..6")
    if block.kind is BlockKind.TABLE_ROW:
        if parent is None or parent.kind is not BlockKind.TABLE:
            raise SegmentTreeError("table row outside a table")
    if block.bbox is not None:
        x0, y0, x1, y1 = block.bbox
        if x0 > x1 or y0 > y1:
            raise SegmentTreeError(f"malformed bbox {block.bbox}")
    if block.page is not None and block.page < 1:
        raise SegmentTreeError(f"page {block.page} below 1")
    for i, child in enumerate(block.children):
        if child.ordinal != i:
            raise SegmentTreeError(
                f"sibling ordinal {child.ordinal} at position {i} under {block.kind.value}"
            )
        _validate_block(child, parent=block)


@dataclass(frozen=True)
class DocNode:
    """A knowledge-graph node."""

    id: str
    kind: NodeKind
    text: str
    doc_id: str
    page: int | None = None
    bbox: Bbox | None = None
    meta: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class KgEdge:
    """A directed, typed knowledge-graph edge (head -> tail)."""

    src: str
    dst: str
    rel: RelKind
    meta: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.src == self.dst:
            raise ValueError(f"self-loop edge on {self.src}")
