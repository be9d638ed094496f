"""PDF routing and text-layer extraction.

A PDF either carries an extractable text layer (generated files) or it does
not (scans). ``route_pdf`` probes the text layer and returns either a
``MarkdownRoute`` of classified blocks or an ``ImageRoute`` whose page images
must be sent to the external layout-analysis service.

Coordinates: blocks carry top-origin bounding boxes (x0, y0, x1, y1) with y
growing downwards, matching the layout service convention, so reading order
is ascending (page, y0, x0).
"""

from __future__ import annotations

import io
import logging
import re
import statistics
from dataclasses import dataclass, field
from typing import Any, Iterator

from ..errors import CorruptPdfError
from ..model import Bbox, BlockKind, SegmentBlock
from . import pdfio
from .pdfio import Name, PdfDocument, Stream

logger = logging.getLogger(__name__)

DEFAULT_SCANNED_THRESHOLD = 10

# Classified as a header when the line's font size reaches this multiple of
# the document's median line size.
HEADER_SIZE_RATIO = 1.3
MAX_HEADER_LEVEL = 3

# Consecutive body lines closer than this multiple of the font size are
# merged into one paragraph block.
_PARA_GAP_FACTOR = 1.8

# Crude Helvetica-ish advance per character, as a fraction of the font size;
# used for bbox estimation since no font metrics are embedded in the reader.
_CHAR_WIDTH = 0.5
_ASCENT = 0.8
_DESCENT = 0.2


@dataclass
class TextLine:
    """One baseline-grouped line of page text."""

    text: str
    size: float
    bbox: Bbox
    page: int


@dataclass
class ImageRef:
    """A raster XObject drawn on a page."""

    bbox: Bbox
    page: int
    stream: Stream | None = None


@dataclass
class PageContent:
    number: int
    width: float
    height: float
    lines: list[TextLine] = field(default_factory=list)
    images: list[ImageRef] = field(default_factory=list)


@dataclass
class MarkdownRoute:
    """Text layer found: flat reading-order blocks with page and bbox."""

    blocks: list[SegmentBlock]
    page_count: int


@dataclass
class ImageRoute:
    """No usable text layer: one PNG per page for the layout service."""

    page_images: list[tuple[int, bytes]]
    page_count: int


PdfRoute = MarkdownRoute | ImageRoute


# -- content stream interpretation -------------------------------------------

Matrix = tuple[float, float, float, float, float, float]
_IDENTITY: Matrix = (1.0, 0.0, 0.0, 1.0, 0.0, 0.0)


def _mat_mul(m: Matrix, n: Matrix) -> Matrix:
    a, b, c, d, e, f = m
    a2, b2, c2, d2, e2, f2 = n
    return (
        a * a2 + b * c2,
        a * b2 + b * d2,
        c * a2 + d * c2,
        c * b2 + d * d2,
        e * a2 + f * c2 + e2,
        e * b2 + f * d2 + f2,
    )


def _mat_apply(m: Matrix, x: float, y: float) -> tuple[float, float]:
    a, b, c, d, e, f = m
    return (a * x + c * y + e, b * x + d * y + f)


def _translate(tx: float, ty: float) -> Matrix:
    return (1.0, 0.0, 0.0, 1.0, tx, ty)


def _yscale(m: Matrix) -> float:
    return (m[2] * m[2] + m[3] * m[3]) ** 0.5


_OPERATOR_RE = re.compile(rb"[A-Za-z'\"][A-Za-z0-9*'\"]*")


def _tokenize_content(data: bytes) -> Iterator[Any]:
    """Yield operands (python values) and operators (Name-tagged)."""
    lexer = pdfio._Lexer(data)
    pos = 0
    n = len(data)
    while True:
        pos = lexer.skip_ws(pos)
        if pos >= n:
            return
        c = data[pos]
        if c in b"<[(/+-.0123456789":
            try:
                value, pos = lexer.parse_value(pos)
            except CorruptPdfError:
                pos += 1
                continue
            yield value
        else:
            m = _OPERATOR_RE.match(data, pos)
            if not m:
                pos += 1
                continue
            op = m.group(0).decode("latin-1")
            pos = m.end()
            if op == "BI":
                # inline image: skip to EI
                end = data.find(b"EI", pos)
                pos = n if end < 0 else end + 2
                continue
            yield _Op(op)


class _Op(str):
    pass


@dataclass
class _Span:
    x: float
    y: float  # baseline, PDF coordinates (origin bottom-left)
    size: float
    text: str


def _decode_pdf_text(raw: bytes) -> str:
    try:
        return raw.decode("cp1252")
    except UnicodeDecodeError:
        return raw.decode("latin-1")


def _interpret_page(doc: PdfDocument, page: dict[str, Any], number: int) -> PageContent:
    media = doc.resolve(page.get("MediaBox")) or [0, 0, 612, 792]
    width = float(doc.resolve(media[2])) - float(doc.resolve(media[0]))
    height = float(doc.resolve(media[3])) - float(doc.resolve(media[1]))
    content = PageContent(number=number, width=width, height=height)

    resources = doc.resolve(page.get("Resources")) or {}
    xobjects = doc.resolve(resources.get("XObject")) or {}

    ctm: Matrix = _IDENTITY
    stack: list[tuple[Matrix, float, float]] = []
    tm: Matrix = _IDENTITY
    tlm: Matrix = _IDENTITY
    font_size = 12.0
    leading = 0.0
    spans: list[_Span] = []
    operands: list[Any] = []

    def emit(raw: bytes) -> None:
        nonlocal tm
        text = _decode_pdf_text(raw)
        if not text:
            return
        trm = _mat_mul(tm, ctm)
        x, y = _mat_apply(trm, 0.0, 0.0)
        esize = font_size * _yscale(tm) * _yscale(ctm)
        spans.append(_Span(x=x, y=y, size=esize, text=text))
        advance = _CHAR_WIDTH * font_size * len(text)
        tm = _mat_mul(_translate(advance, 0.0), tm)

    def next_line(tx: float, ty: float) -> None:
        nonlocal tm, tlm
        tlm = _mat_mul(_translate(tx, ty), tlm)
        tm = tlm

    for token in _tokenize_content(doc.page_content(page)):
        if not isinstance(token, _Op):
            operands.append(token)
            continue
        op = str(token)
        try:
            if op == "q":
                stack.append((ctm, font_size, leading))
            elif op == "Q":
                if stack:
                    ctm, font_size, leading = stack.pop()
            elif op == "cm" and len(operands) >= 6:
                ctm = _mat_mul(tuple(float(v) for v in operands[-6:]), ctm)
            elif op == "BT":
                tm = tlm = _IDENTITY
            elif op == "Tf" and operands:
                font_size = float(operands[-1])
            elif op == "TL" and operands:
                leading = float(operands[-1])
            elif op == "Td" and len(operands) >= 2:
                next_line(float(operands[-2]), float(operands[-1]))
            elif op == "TD" and len(operands) >= 2:
                leading = -float(operands[-1])
                next_line(float(operands[-2]), float(operands[-1]))
            elif op == "Tm" and len(operands) >= 6:
                tm = tlm = tuple(float(v) for v in operands[-6:])
            elif op == "T*":
                next_line(0.0, -leading)
            elif op == "Tj" and operands:
                if isinstance(operands[-1], bytes):
                    emit(operands[-1])
            elif op == "'" and operands:
                next_line(0.0, -leading)
                if isinstance(operands[-1], bytes):
                    emit(operands[-1])
            elif op == '"' and len(operands) >= 3:
                next_line(0.0, -leading)
                if isinstance(operands[-1], bytes):
                    emit(operands[-1])
            elif op == "TJ" and operands and isinstance(operands[-1], list):
                pieces: list[bytes] = []
                for element in operands[-1]:
                    if isinstance(element, bytes):
                        pieces.append(element)
                    elif isinstance(element, (int, float)) and element <= -180:
                        pieces.append(b" ")
                emit(b"".join(pieces))
            elif op == "Do" and operands and isinstance(operands[-1], Name):
                xobj = doc.resolve(xobjects.get(str(operands[-1])))
                if isinstance(xobj, Stream) and xobj.dict.get("Subtype") == "Image":
                    corners = [
                        _mat_apply(ctm, cx, cy) for cx, cy in ((0, 0), (1, 0), (0, 1), (1, 1))
                    ]
                    xs = [p[0] for p in corners]
                    ys = [p[1] for p in corners]
                    bbox = (min(xs), height - max(ys), max(xs), height - min(ys))
                    content.images.append(ImageRef(bbox=bbox, page=number, stream=xobj))
        except (TypeError, ValueError, IndexError):
            logger.debug("skipping malformed operator %s on page %d", op, number)
        operands.clear()

    content.lines = _group_lines(spans, height, number)
    return content


def _group_lines(spans: list[_Span], page_height: float, page: int) -> list[TextLine]:
    """Group spans sharing a baseline into lines, top of page first."""
    lines: list[TextLine] = []
    spans = sorted(spans, key=lambda s: (-s.y, s.x))
    group: list[_Span] = []

    def flush() -> None:
        if not group:
            return
        group.sort(key=lambda s: s.x)
        parts: list[str] = []
        cursor = None
        for span in group:
            if cursor is not None and span.x - cursor > 0.25 * span.size:
                parts.append(" ")
            parts.append(span.text)
            cursor = span.x + _CHAR_WIDTH * span.size * len(span.text)
        size = max(s.size for s in group)
        x0 = min(s.x for s in group)
        x1 = max(s.x + _CHAR_WIDTH * s.size * len(s.text) for s in group)
        base = group[0].y
        bbox = (x0, page_height - base - _ASCENT * size, x1, page_height - base + _DESCENT * size)
        text = "".join(parts).strip()
        if text:
            lines.append(TextLine(text=text, size=size, bbox=bbox, page=page))
        group.clear()

    for span in spans:
        if group and abs(span.y - group[0].y) > max(2.0, 0.3 * span.size):
            flush()
        group.append(span)
    flush()
    return lines


def read_pages(data: bytes) -> list[PageContent]:
    """Parse the file and interpret every page's content stream."""
    doc = PdfDocument(data)
    return [_interpret_page(doc, page, i + 1) for i, page in enumerate(doc.pages())]


# -- routing ------------------------------------------------------------------


def route_pdf(data: bytes, *, scanned_threshold: int = DEFAULT_SCANNED_THRESHOLD) -> PdfRoute:
    """Decide between the text path and the image (layout-service) path.

    Files averaging fewer than ``scanned_threshold`` extractable characters
    per page are treated as scans.
    """
    pages = read_pages(data)
    total_chars = sum(len(line.text.strip()) for page in pages for line in page.lines)
    if total_chars / len(pages) < scanned_threshold:
        return ImageRoute(page_images=_page_images(pages), page_count=len(pages))
    return MarkdownRoute(blocks=_classify_blocks(pages), page_count=len(pages))


def probe_pdf_has_text(data: bytes, *, scanned_threshold: int = DEFAULT_SCANNED_THRESHOLD) -> bool:
    """True when the text layer clears the scanned threshold."""
    pages = read_pages(data)
    total_chars = sum(len(line.text.strip()) for page in pages for line in page.lines)
    return total_chars / len(pages) >= scanned_threshold


def _classify_blocks(pages: list[PageContent]) -> list[SegmentBlock]:
    sizes = [round(line.size, 1) for page in pages for line in page.lines]
    body_median = statistics.median(sizes) if sizes else 0.0
    threshold = HEADER_SIZE_RATIO * body_median
    header_sizes = sorted({s for s in sizes if s >= threshold}, reverse=True)
    level_of = {
        size: min(rank + 1, MAX_HEADER_LEVEL) for rank, size in enumerate(header_sizes)
    }

    blocks: list[SegmentBlock] = []
    for page in pages:
        items: list[tuple[Bbox, TextLine | ImageRef]] = [
            (line.bbox, line) for line in page.lines
        ] + [(image.bbox, image) for image in page.images]
        items.sort(key=lambda item: (item[0][1], item[0][0]))

        open_para: SegmentBlock | None = None
        for bbox, item in items:
            if isinstance(item, ImageRef):
                blocks.append(
                    SegmentBlock(kind=BlockKind.FIGURE, bbox=bbox, page=page.number)
                )
                open_para = None
                continue
            size = round(item.size, 1)
            if size in level_of:
                blocks.append(
                    SegmentBlock(
                        kind=BlockKind.HEADER,
                        text=item.text,
                        level=level_of[size],
                        bbox=bbox,
                        page=page.number,
                    )
                )
                open_para = None
                continue
            if open_para is not None and _close_enough(open_para.bbox, bbox, item.size):
                open_para.text = f"{open_para.text} {item.text}"
                open_para.bbox = _bbox_union(open_para.bbox, bbox)
                continue
            open_para = SegmentBlock(
                kind=BlockKind.PARAGRAPH, text=item.text, bbox=bbox, page=page.number
            )
            blocks.append(open_para)
    return blocks


def _close_enough(prev: Bbox | None, cur: Bbox, size: float) -> bool:
    if prev is None:
        return False
    return cur[1] - prev[1] <= _PARA_GAP_FACTOR * max(size, 1.0) + (prev[3] - prev[1])


def _bbox_union(a: Bbox, b: Bbox) -> Bbox:
    return (min(a[0], b[0]), min(a[1], b[1]), max(a[2], b[2]), max(a[3], b[3]))


# -- page images for the layout service ---------------------------------------


def _page_images(pages: list[PageContent]) -> list[tuple[int, bytes]]:
    """One PNG per page: the largest embedded raster, else a blank page.

    Scanned pages are whole-page images in practice, so transcoding the
    embedded raster preserves the scan; the engine deliberately ships no
    rasterizer.
    """
    out: list[tuple[int, bytes]] = []
    for page in pages:
        png = None
        candidates = [i for i in page.images if i.stream is not None]
        for image in sorted(candidates, key=lambda i: -_area(i.bbox)):
            png = _to_png(image.stream)
            if png is not None:
                break
        if png is None:
            png = _blank_png(int(page.width) or 612, int(page.height) or 792)
        out.append((page.number, png))
    return out


def _area(bbox: Bbox) -> float:
    return max(0.0, bbox[2] - bbox[0]) * max(0.0, bbox[3] - bbox[1])


def _to_png(stream: Stream | None) -> bytes | None:
    from PIL import Image

    if stream is None:
        return None
    try:
        data = stream.decoded()
    except ValueError:
        return None
    filters = stream.filters()
    buf = io.BytesIO()
    try:
        if filters and filters[-1] in ("DCTDecode", "JPXDecode"):
            Image.open(io.BytesIO(data)).convert("RGB").save(buf, format="PNG")
            return buf.getvalue()
        width = int(_resolve_int(stream.dict.get("Width")))
        height = int(_resolve_int(stream.dict.get("Height")))
        colorspace = str(stream.dict.get("ColorSpace", "DeviceRGB"))
        mode = "L" if colorspace == "DeviceGray" else "RGB"
        expected = width * height * (1 if mode == "L" else 3)
        if len(data) < expected:
            return None
        Image.frombytes(mode, (width, height), data[:expected]).save(buf, format="PNG")
        return buf.getvalue()
    except Exception:
        return None


def _resolve_int(value: Any) -> int:
    if isinstance(value, (int, float)):
        return int(value)
    raise ValueError(f"expected number, got {value!r}")


def _blank_png(width: int, height: int) -> bytes:
    from PIL import Image

    buf = io.BytesIO()
    Image.new("RGB", (max(1, width), max(1, height)), (255, 255, 255)).save(buf, format="PNG")
    return buf.getvalue()
