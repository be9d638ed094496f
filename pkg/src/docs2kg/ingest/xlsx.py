"""xlsx workbook parsing via the OOXML zip structure.

Reads values only (no styles, no formulas beyond cached results) using
zipfile + ElementTree; that subset is all the knowledge graph needs and
keeps the engine dependency-free.
"""

from __future__ import annotations

import io
import re
import zipfile
import xml.etree.ElementTree as ET

from ..errors import CorruptWorkbookError
from ..model import BlockKind, SegmentBlock, SegmentTree, SourceDocument

_REL_NS = "http://schemas.openxmlformats.org/officeDocument/2006/relationships"

_CELL_REF_RE = re.compile(r"([A-Z]+)[0-9]*$")


def parse_excel(data: bytes, src: SourceDocument) -> SegmentTree:
    """Parse a workbook: one sheet block per worksheet, rows as table rows.

    Cells are rendered to strings (numbers via shortest round-trip decimal)
    and joined with " | "; rows with no values are dropped.
    """
    try:
        archive = zipfile.ZipFile(io.BytesIO(data))
    except zipfile.BadZipFile as exc:
        raise CorruptWorkbookError(str(exc)) from exc

    with archive:
        names = set(archive.namelist())
        if "xl/workbook.xml" not in names:
            raise CorruptWorkbookError("missing xl/workbook.xml")
        try:
            shared = _shared_strings(archive, names)
            sheets = _sheet_targets(archive, names)
            tree = SegmentTree.empty(src)
            for sheet_name, target in sheets:
                sheet_block = tree.root.add(
                    SegmentBlock(kind=BlockKind.SHEET, text=sheet_name)
                )
                table = sheet_block.add(SegmentBlock(kind=BlockKind.TABLE))
                if target not in names:
                    continue
                for cells in _iter_rows(archive.read(target), shared):
                    table.add(
                        SegmentBlock(kind=BlockKind.TABLE_ROW, text=" | ".join(cells))
                    )
            return tree
        except ET.ParseError as exc:
            raise CorruptWorkbookError(f"bad sheet XML: {exc}") from exc


def _shared_strings(archive: zipfile.ZipFile, names: set[str]) -> list[str]:
    if "xl/sharedStrings.xml" not in names:
        return []
    root = ET.fromstring(archive.read("xl/sharedStrings.xml"))
    strings = []
    for si in root.findall("{*}si"):
        strings.append("".join(t.text or "" for t in si.iter() if t.tag.endswith("}t")))
    return strings


def _sheet_targets(archive: zipfile.ZipFile, names: set[str]) -> list[tuple[str, str]]:
    """Sheet (name, archive path) pairs in workbook order."""
    rels: dict[str, str] = {}
    if "xl/_rels/workbook.xml.rels" in names:
        rel_root = ET.fromstring(archive.read("xl/_rels/workbook.xml.rels"))
        for rel in rel_root.findall("{*}Relationship"):
            target = rel.get("Target", "")
            if target.startswith("/"):
                target = target.lstrip("/")
            else:
                target = f"xl/{target}"
            rels[rel.get("Id", "")] = target

    workbook = ET.fromstring(archive.read("xl/workbook.xml"))
    out: list[tuple[str, str]] = []
    fallback = 1
    for sheet in workbook.findall(".//{*}sheet"):
        name = sheet.get("name", f"Sheet{fallback}")
        rel_id = sheet.get(f"{{{_REL_NS}}}id", "")
        target = rels.get(rel_id, f"xl/worksheets/sheet{fallback}.xml")
        out.append((name, target))
        fallback += 1
    return out


def _iter_rows(sheet_xml: bytes, shared: list[str]):
    """Populated rows as string-cell lists, trailing empties trimmed."""
    root = ET.fromstring(sheet_xml)
    for row in root.findall(".//{*}sheetData/{*}row"):
        cells: list[str] = []
        for cell in row.findall("{*}c"):
            col = _column_index(cell.get("r", ""))
            value = _cell_value(cell, shared)
            if col is None:
                cells.append(value)
                continue
            while len(cells) < col:
                cells.append("")
            if col < len(cells):
                cells[col] = value
            else:
                cells.append(value)
        while cells and not cells[-1]:
            cells.pop()
        if any(cells):
            yield cells


def _column_index(ref: str) -> int | None:
    m = _CELL_REF_RE.match(ref.upper())
    if not m:
        return None
    index = 0
    for ch in m.group(1):
        index = index * 26 + (ord(ch) - 64)
    return index - 1


def _cell_value(cell: ET.Element, shared: list[str]) -> str:
    cell_type = cell.get("t", "n")
    if cell_type == "inlineStr":
        is_el = cell.find("{*}is")
        if is_el is None:
            return ""
        return "".join(t.text or "" for t in is_el.iter() if t.tag.endswith("}t"))
    v = cell.find("{*}v")
    raw = (v.text or "") if v is not None else ""
    if not raw:
        return ""
    if cell_type == "s":
        try:
            return shared[int(raw)]
        except (ValueError, IndexError):
            return ""
    if cell_type == "b":
        return "TRUE" if raw.strip() == "1" else "FALSE"
    if cell_type in ("str", "e"):
        return raw
    return _render_number(raw)


def _render_number(raw: str) -> str:
    """Shortest decimal that round-trips; integral values lose the point."""
    try:
        value = float(raw)
    except ValueError:
        return raw
    if value.is_integer() and abs(value) < 1e16:
        return str(int(value))
    return repr(value)
