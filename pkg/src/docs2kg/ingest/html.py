"""Error-tolerant HTML parsing into a segment tree.

Built on the stdlib ``html.parser`` so malformed markup degrades instead of
failing. Headings h1..h6 become header blocks and own everything up to the
next heading of equal-or-lower level; p/li/blockquote text runs become
paragraphs; tables keep one row block per ``tr`` with cells joined by
``" | "``; images become figure blocks carrying their alt text and src.
"""

from __future__ import annotations

import html as html_escape
import re
from html.parser import HTMLParser

from ..errors import EmptyDocumentError
from ..model import BlockKind, SegmentBlock, SegmentTree, SourceDocument
from .nesting import nest_by_level

_WS_RE = re.compile(r"\s+")

_HEADING_TAGS = {f"h{i}": i for i in range(1, 7)}
_PARAGRAPH_TAGS = {"p", "li", "blockquote", "pre", "dt", "dd"}
_SUPPRESSED_TAGS = {"script", "style"}


def _collapse(parts: list[str]) -> str:
    return _WS_RE.sub(" ", "".join(parts)).strip()


class _BlockCollector(HTMLParser):
    """Streams tags into a flat list of segment blocks."""

    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.blocks: list[SegmentBlock] = []
        self._text: list[str] = []
        self._suppress = 0
        self._heading: int | None = None
        self._table: SegmentBlock | None = None
        self._row_cells: list[str] | None = None
        self._cell: list[str] | None = None

    # -- assembly -------------------------------------------------------------

    def _flush_paragraph(self) -> None:
        text = _collapse(self._text)
        self._text = []
        if text:
            self.blocks.append(SegmentBlock(kind=BlockKind.PARAGRAPH, text=text))

    def _close_cell(self) -> None:
        if self._cell is not None and self._row_cells is not None:
            self._row_cells.append(_collapse(self._cell))
        self._cell = None

    def _close_row(self) -> None:
        self._close_cell()
        if self._row_cells is not None and self._table is not None:
            if any(cell for cell in self._row_cells):
                self._table.add(
                    SegmentBlock(
                        kind=BlockKind.TABLE_ROW, text=" | ".join(self._row_cells)
                    )
                )
        self._row_cells = None

    # -- HTMLParser hooks -------------------------------------------------------

    def handle_starttag(self, tag: str, attrs: list[tuple[str, str | None]]) -> None:
        if tag in _SUPPRESSED_TAGS:
            self._suppress += 1
            return
        if self._suppress:
            return
        if tag in _HEADING_TAGS:
            self._flush_paragraph()
            self._heading = _HEADING_TAGS[tag]
            return
        if tag == "table":
            self._flush_paragraph()
            self._table = SegmentBlock(kind=BlockKind.TABLE)
            return
        if self._table is not None:
            if tag == "tr":
                self._close_row()
                self._row_cells = []
            elif tag in ("td", "th"):
                self._close_cell()
                self._cell = []
            return
        if tag in _PARAGRAPH_TAGS:
            self._flush_paragraph()
            return
        if tag == "img":
            self._handle_img(attrs)
            return
        if tag == "br":
            self._text.append(" ")

    def handle_startendtag(self, tag: str, attrs: list[tuple[str, str | None]]) -> None:
        self.handle_starttag(tag, attrs)

    def handle_endtag(self, tag: str) -> None:
        if tag in _SUPPRESSED_TAGS:
            self._suppress = max(0, self._suppress - 1)
            return
        if self._suppress:
            return
        if tag in _HEADING_TAGS:
            text = _collapse(self._text)
            self._text = []
            level = self._heading or _HEADING_TAGS[tag]
            self._heading = None
            self.blocks.append(SegmentBlock(kind=BlockKind.HEADER, text=text, level=level))
            return
        if tag == "table" and self._table is not None:
            self._close_row()
            self.blocks.append(self._table)
            self._table = None
            return
        if self._table is not None:
            if tag == "tr":
                self._close_row()
            elif tag in ("td", "th"):
                self._close_cell()
            return
        if tag in _PARAGRAPH_TAGS:
            self._flush_paragraph()

    def handle_data(self, data: str) -> None:
        if self._suppress:
            return
        if self._cell is not None:
            self._cell.append(data)
        elif self._table is not None:
            return  # stray text between table tags
        else:
            self._text.append(data)

    def _handle_img(self, attrs: list[tuple[str, str | None]]) -> None:
        attr_map = {name: value or "" for name, value in attrs}
        self._flush_paragraph()
        meta = {}
        if attr_map.get("src"):
            meta["src"] = attr_map["src"]
        self.blocks.append(
            SegmentBlock(kind=BlockKind.FIGURE, text=attr_map.get("alt", ""), meta=meta)
        )

    def finish(self) -> list[SegmentBlock]:
        if self._table is not None:  # unclosed table
            self._close_row()
            self.blocks.append(self._table)
            self._table = None
        self._flush_paragraph()
        return self.blocks


def parse_html(data: bytes | str, src: SourceDocument) -> SegmentTree:
    """Parse HTML bytes into a segment tree.

    Raises EmptyDocumentError when no content blocks survive.
    """
    markup = data.decode("utf-8", errors="replace") if isinstance(data, bytes) else data
    collector = _BlockCollector()
    collector.feed(markup)
    collector.close()
    blocks = collector.finish()
    if not blocks:
        raise EmptyDocumentError(f"no blocks in {src.origin!r}")
    tree = SegmentTree.empty(src)
    nest_by_level(blocks, tree.root)
    return tree


def render_html(tree: SegmentTree) -> str:
    """Render a segment tree back to minimal HTML.

    Pre-order traversal; headers re-nest identically on re-parse because
    nesting is a pure function of the level sequence. Used for round-trip
    checks and debugging.
    """
    parts: list[str] = []
    for block in tree.root.children:
        _render_block(block, parts)
    return "".join(parts)


def _render_block(block: SegmentBlock, parts: list[str]) -> None:
    esc = html_escape.escape
    if block.kind is BlockKind.HEADER:
        level = min(max(block.level, 1), 6)
        parts.append(f"<h{level}>{esc(block.text)}</h{level}>")
        for child in block.children:
            _render_block(child, parts)
    elif block.kind is BlockKind.PARAGRAPH:
        parts.append(f"<p>{esc(block.text)}</p>")
    elif block.kind is BlockKind.TABLE:
        parts.append("<table>")
        for row in block.children:
            cells = "".join(f"<td>{esc(cell)}</td>" for cell in row.text.split(" | "))
            parts.append(f"<tr>{cells}</tr>")
        parts.append("</table>")
    elif block.kind is BlockKind.FIGURE:
        src_attr = f" src=\"{esc(block.meta['src'])}\"" if "src" in block.meta else ""
        parts.append(f"<img alt=\"{esc(block.text)}\"{src_attr}>")
    else:  # sheets and rows never come from HTML
        for child in block.children:
            _render_block(child, parts)
