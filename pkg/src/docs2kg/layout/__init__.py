"""Client for the external document-layout-analysis service.

The engine never runs the layout model in process: page images go out over
HTTP and classified segments come back. ``segments_to_tree`` then converts
those segments into the same segment-tree shape the native parsers emit.

Wire protocol: POST {endpoint}/analyze with
``{"pages": [{"page": 1, "png_b64": "..."}]}``; the response is
``{"segments": [{"page": 1, "class": "Title|Text|Table|Figure",
"bbox": [x0, y0, x1, y1], "text": "...", "confidence": 0.97}]}``.
"""

from __future__ import annotations

import base64
import json
import urllib.error
import urllib.request
from dataclasses import dataclass
from enum import Enum

from ..errors import ProtocolError, ServiceUnreachableError
from ..model import Bbox, BlockKind, SegmentBlock, SegmentTree, SourceDocument
from ..ingest.nesting import nest_by_level

DEFAULT_MIN_CONFIDENCE = 0.5
DEFAULT_TIMEOUT = 30.0


class SegmentClass(str, Enum):
    TITLE = "Title"
    TEXT = "Text"
    TABLE = "Table"
    FIGURE = "Figure"


@dataclass(frozen=True)
class LayoutSegment:
    """One classified region returned by the layout service."""

    page: int
    cls: SegmentClass
    bbox: Bbox
    text: str | None
    confidence: float


def analyze_pages(
    images: list[tuple[int, bytes]],
    endpoint: str,
    *,
    min_confidence: float = DEFAULT_MIN_CONFIDENCE,
    timeout: float = DEFAULT_TIMEOUT,
) -> list[LayoutSegment]:
    """Send page PNGs to the service and return confident segments.

    Segments under ``min_confidence`` are dropped; segment classes outside
    the known four are ignored rather than guessed.
    """
    if not images:
        raise ValueError("at least one page image is required")
    body = json.dumps(
        {
            "pages": [
                {"page": page, "png_b64": base64.b64encode(png).decode("ascii")}
                for page, png in images
            ]
        }
    ).encode("utf-8")
    request = urllib.request.Request(
        endpoint.rstrip("/") + "/analyze",
        data=body,
        headers={"Content-Type": "application/json"},
        method="POST",
    )
    try:
        with urllib.request.urlopen(request, timeout=timeout) as response:
            payload = response.read()
    except (urllib.error.URLError, OSError) as exc:
        raise ServiceUnreachableError(f"layout service at {endpoint}: {exc}") from exc

    try:
        parsed = json.loads(payload)
        raw_segments = parsed["segments"]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ProtocolError(f"malformed layout response: {exc}") from exc

    segments: list[LayoutSegment] = []
    for raw in raw_segments:
        segment = _parse_segment(raw)
        if segment is not None and segment.confidence >= min_confidence:
            segments.append(segment)
    return segments


def _parse_segment(raw: object) -> LayoutSegment | None:
    if not isinstance(raw, dict):
        raise ProtocolError(f"segment is not an object: {raw!r}")
    page = raw.get("page")
    try:
        cls = SegmentClass(raw.get("class"))
    except ValueError:
        return None  # unknown class from a richer model: ignore
    try:
        x0, y0, x1, y1 = (float(v) for v in raw.get("bbox", ()))
        confidence = float(raw.get("confidence", 0.0))
        page_no = int(page)
    except (TypeError, ValueError) as exc:
        raise ProtocolError(f"malformed segment on page {page!r}: {exc}") from exc
    if page_no < 1 or x0 > x1 or y0 > y1 or not 0.0 <= confidence <= 1.0:
        raise ProtocolError(f"malformed segment on page {page!r}")
    text = raw.get("text")
    return LayoutSegment(
        page=page_no,
        cls=cls,
        bbox=(x0, y0, x1, y1),
        text=str(text) if text is not None else None,
        confidence=confidence,
    )


_KIND_OF = {
    SegmentClass.TITLE: BlockKind.HEADER,
    SegmentClass.TEXT: BlockKind.PARAGRAPH,
    SegmentClass.TABLE: BlockKind.TABLE,
    SegmentClass.FIGURE: BlockKind.FIGURE,
}


def segments_to_tree(segments: list[LayoutSegment], src: SourceDocument) -> SegmentTree:
    """Order segments top-to-bottom, left-to-right and nest under titles.

    Reading order is (page, y0, x0) with input position as the tiebreak, so
    permuting the input never changes the tree.
    """
    ordered = sorted(
        enumerate(segments),
        key=lambda item: (item[1].page, item[1].bbox[1], item[1].bbox[0], item[0]),
    )
    blocks: list[SegmentBlock] = []
    for _, segment in ordered:
        kind = _KIND_OF[segment.cls]
        block = SegmentBlock(
            kind=kind,
            text=segment.text or "",
            level=1 if kind is BlockKind.HEADER else 0,
            bbox=segment.bbox,
            page=segment.page,
        )
        if kind is BlockKind.TABLE and segment.text:
            block.text = ""
            block.add(
                SegmentBlock(
                    kind=BlockKind.TABLE_ROW,
                    text=segment.text,
                    bbox=segment.bbox,
                    page=segment.page,
                )
            )
        blocks.append(block)
    tree = SegmentTree.empty(src)
    nest_by_level(blocks, tree.root)
    return tree
