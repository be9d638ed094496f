"""Document ingestion: format detection and parsing into segment trees.

``segment_bytes`` is the one entry point the pipeline uses; it detects the
format, parses, and for emails recursively ingests attachments, reporting
per-attachment failures as warnings instead of aborting the body.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field

from ..errors import (
    Docs2kgError,
    EmptyDocumentError,
    IngestionError,
)
from ..model import (
    BlockKind,
    DocFormat,
    SegmentBlock,
    SegmentTree,
    SourceDocument,
)
from .detect import detect_format
from .eml import EmailParts, parse_email
from .html import parse_html, render_html
from .nesting import nest_by_level
from .pdf import (
    DEFAULT_SCANNED_THRESHOLD,
    ImageRoute,
    MarkdownRoute,
    PdfRoute,
    route_pdf,
)
from .xlsx import parse_excel

__all__ = [
    "DEFAULT_SCANNED_THRESHOLD",
    "EmailParts",
    "ImageRoute",
    "IngestOptions",
    "IngestedDocument",
    "MarkdownRoute",
    "PdfRoute",
    "build_pdf_tree",
    "detect_format",
    "ingest_email",
    "parse_email",
    "parse_excel",
    "parse_html",
    "parse_pdf",
    "render_html",
    "route_pdf",
    "segment_bytes",
]

logger = logging.getLogger(__name__)

_BLANK_LINE_RE = re.compile(r"\n\s*\n")


@dataclass
class IngestOptions:
    """Knobs shared by every parse path."""

    scanned_threshold: int = DEFAULT_SCANNED_THRESHOLD
    layout_endpoint: str | None = None
    layout_min_confidence: float = 0.5
    layout_timeout: float = 30.0


@dataclass
class IngestedDocument:
    """All segment trees produced by one input file.

    ``trees[0]`` is the document itself (an email's body); further trees come
    from attachments. ``attachment_links`` records (parent doc_id, child
    doc_id) pairs for the graph builder to turn into HasAttachment edges.
    """

    trees: list[SegmentTree]
    attachment_links: list[tuple[str, str]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


def segment_bytes(
    data: bytes,
    origin: str,
    fmt: DocFormat | None = None,
    options: IngestOptions | None = None,
) -> IngestedDocument:
    """Detect the format (unless forced) and parse into segment trees."""
    options = options or IngestOptions()
    if fmt is None or fmt.is_pdf:
        # PDFs re-probe so the generated/scanned subtype is always accurate.
        fmt = detect_format(data, origin, scanned_threshold=options.scanned_threshold)

    if fmt is DocFormat.EMAIL:
        src = SourceDocument.from_bytes(data, DocFormat.EMAIL, origin)
        return ingest_email(data, src, options)

    if fmt is DocFormat.HTML:
        src = SourceDocument.from_bytes(data, DocFormat.HTML, origin)
        return IngestedDocument(trees=[parse_html(data, src)])

    if fmt is DocFormat.EXCEL:
        src = SourceDocument.from_bytes(data, DocFormat.EXCEL, origin)
        return IngestedDocument(trees=[parse_excel(data, src)])

    # PDF: route decides the final subtype.
    src = SourceDocument.from_bytes(data, fmt, origin)
    return IngestedDocument(trees=[parse_pdf(data, src, options)])


def parse_pdf(
    data: bytes, src: SourceDocument, options: IngestOptions | None = None
) -> SegmentTree:
    """Parse a PDF via the text path, or the layout service for scans."""
    options = options or IngestOptions()
    route = route_pdf(data, scanned_threshold=options.scanned_threshold)
    if isinstance(route, MarkdownRoute):
        return build_pdf_tree(route, src)

    if not options.layout_endpoint:
        raise IngestionError(
            f"{src.origin!r} has no text layer; a layout service endpoint is required"
        )
    from ..layout import analyze_pages, segments_to_tree

    segments = analyze_pages(
        route.page_images,
        options.layout_endpoint,
        min_confidence=options.layout_min_confidence,
        timeout=options.layout_timeout,
    )
    scanned_src = SourceDocument(
        doc_id=src.doc_id,
        format=DocFormat.PDF_SCANNED,
        origin=src.origin,
        byte_len=src.byte_len,
    )
    return segments_to_tree(segments, scanned_src)


def build_pdf_tree(route: MarkdownRoute, src: SourceDocument) -> SegmentTree:
    """Nest a text-path block sequence, page by page."""
    tree = SegmentTree.empty(src)
    by_page: dict[int, list[SegmentBlock]] = {}
    for block in route.blocks:
        by_page.setdefault(block.page or 1, []).append(block)
    for page in sorted(by_page):
        nest_by_level(by_page[page], tree.root)
    return tree


def ingest_email(
    data: bytes, src: SourceDocument, options: IngestOptions | None = None
) -> IngestedDocument:
    """Body tree first, then one tree per parseable attachment.

    Attachment failures become warnings; only an unparseable message itself
    is fatal.
    """
    options = options or IngestOptions()
    parts = parse_email(data)
    result = IngestedDocument(trees=[_body_tree(parts, src)])
    seen_doc_ids = {src.doc_id}

    for index, (filename, payload) in enumerate(parts.attachments):
        try:
            nested = segment_bytes(payload, filename, options=options)
        except Docs2kgError as exc:
            message = f"attachment {index} ({filename!r}): {exc}"
            logger.warning("%s: %s", src.origin, message)
            result.warnings.append(message)
            continue
        child_id = nested.trees[0].source.doc_id
        if child_id in seen_doc_ids:
            message = f"attachment {index} ({filename!r}): duplicate content, skipped"
            logger.warning("%s: %s", src.origin, message)
            result.warnings.append(message)
            continue
        seen_doc_ids.update(tree.source.doc_id for tree in nested.trees)
        result.trees.extend(nested.trees)
        result.attachment_links.append((src.doc_id, child_id))
        result.attachment_links.extend(nested.attachment_links)
        result.warnings.extend(nested.warnings)
    return result


def _body_tree(parts: EmailParts, src: SourceDocument) -> SegmentTree:
    if parts.html_body:
        try:
            return parse_html(parts.html_body, src)
        except EmptyDocumentError:
            pass
    if parts.plain_text:
        tree = SegmentTree.empty(src)
        for chunk in _BLANK_LINE_RE.split(parts.plain_text):
            text = " ".join(chunk.split())
            if text:
                tree.root.add(SegmentBlock(kind=BlockKind.PARAGRAPH, text=text))
        return tree
    return SegmentTree.empty(src)
