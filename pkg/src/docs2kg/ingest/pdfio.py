"""Minimal PDF object reader.

Covers the subset emitted by mainstream generators for text documents:
classic cross-reference tables (with a brute-force object scan as fallback),
Flate and ASCII85 stream filters, and the page-tree walk with attribute
inheritance. Encrypted files and cross-reference streams are out of scope
and surface as CorruptPdfError.
"""

from __future__ import annotations

import base64
import re
import zlib
from dataclasses import dataclass
from typing import Any

from ..errors import CorruptPdfError

_WHITESPACE = b"\x00\t\n\x0c\r "
_DELIMITERS = b"()<>[]{}/%"

_OBJ_RE = re.compile(rb"(\d+)\s+(\d+)\s+obj\b")


@dataclass(frozen=True)
class Ref:
    """Indirect object reference (``num gen R``)."""

    num: int
    gen: int


class Name(str):
    """A PDF name object (``/Foo``); subclasses str for easy comparison."""


@dataclass
class Stream:
    """A stream object: its dictionary plus raw (still encoded) bytes."""

    dict: dict[str, Any]
    raw: bytes

    def filters(self) -> list[str]:
        f = self.dict.get("Filter")
        if f is None:
            return []
        if isinstance(f, list):
            return [str(x) for x in f]
        return [str(f)]

    def decoded(self) -> bytes:
        """Apply the filter chain. DCT (JPEG) data is returned as-is."""
        data = self.raw
        for filt in self.filters():
            if filt == "ASCII85Decode":
                data = _a85decode(data)
            elif filt == "FlateDecode":
                data = _flate(data)
            elif filt in ("DCTDecode", "JPXDecode"):
                return data
            else:
                raise ValueError(f"unsupported stream filter {filt}")
        return data


def _a85decode(data: bytes) -> bytes:
    data = data.strip()
    if data.endswith(b"~>"):
        return base64.a85decode(data, adobe=True)
    return base64.a85decode(data)


def _flate(data: bytes) -> bytes:
    # decompressobj tolerates trailing garbage after the zlib stream
    return zlib.decompressobj().decompress(data)


class _Lexer:
    """Recursive-descent parser over the raw file bytes."""

    def __init__(self, data: bytes):
        self.data = data

    def skip_ws(self, pos: int) -> int:
        data = self.data
        n = len(data)
        while pos < n:
            c = data[pos]
            if c in _WHITESPACE:
                pos += 1
            elif c == 0x25:  # '%' comment runs to end of line
                while pos < n and data[pos] not in b"\r\n":
                    pos += 1
            else:
                break
        return pos

    def parse_value(self, pos: int) -> tuple[Any, int]:
        data = self.data
        pos = self.skip_ws(pos)
        if pos >= len(data):
            raise CorruptPdfError("unexpected end of file")
        c = data[pos]
        if data.startswith(b"<<", pos):
            return self.parse_dict(pos)
        if c == 0x5B:  # '['
            return self.parse_array(pos)
        if c == 0x2F:  # '/'
            return self.parse_name(pos)
        if c == 0x28:  # '('
            return self.parse_string(pos)
        if c == 0x3C:  # '<' hex string
            return self.parse_hex_string(pos)
        if data.startswith(b"true", pos):
            return True, pos + 4
        if data.startswith(b"false", pos):
            return False, pos + 5
        if data.startswith(b"null", pos):
            return None, pos + 4
        if c in b"+-.0123456789":
            return self.parse_number_or_ref(pos)
        raise CorruptPdfError(f"unparseable object at byte {pos}")

    def parse_number_or_ref(self, pos: int) -> tuple[Any, int]:
        num, end = self.parse_number(pos)
        if isinstance(num, int) and num >= 0:
            # lookahead for "gen R"
            p = self.skip_ws(end)
            m = re.match(rb"(\d+)", self.data[p : p + 10])
            if m:
                p2 = self.skip_ws(p + m.end())
                if self.data[p2 : p2 + 1] == b"R" and self._is_delimited(p2 + 1):
                    return Ref(num, int(m.group(1))), p2 + 1
        return num, end

    def _is_delimited(self, pos: int) -> bool:
        if pos >= len(self.data):
            return True
        return self.data[pos] in _WHITESPACE or self.data[pos] in _DELIMITERS

    def parse_number(self, pos: int) -> tuple[int | float, int]:
        m = re.match(rb"[+-]?(?:\d+\.\d*|\.\d+|\d+)", self.data[pos:])
        if not m:
            raise CorruptPdfError(f"bad number at byte {pos}")
        tok = m.group(0)
        end = pos + m.end()
        if b"." in tok:
            return float(tok), end
        return int(tok), end

    def parse_name(self, pos: int) -> tuple[Name, int]:
        pos += 1  # skip '/'
        out = bytearray()
        data = self.data
        while pos < len(data):
            c = data[pos]
            if c in _WHITESPACE or c in _DELIMITERS:
                break
            if c == 0x23 and pos + 2 < len(data):  # '#xx' escape
                try:
                    out.append(int(data[pos + 1 : pos + 3], 16))
                    pos += 3
                    continue
                except ValueError:
                    pass
            out.append(c)
            pos += 1
        return Name(out.decode("latin-1")), pos

    def parse_string(self, pos: int) -> tuple[bytes, int]:
        data = self.data
        pos += 1  # skip '('
        depth = 1
        out = bytearray()
        while pos < len(data):
            c = data[pos]
            if c == 0x5C:  # backslash escape
                pos += 1
                if pos >= len(data):
                    break
                e = data[pos]
                mapped = {0x6E: 0x0A, 0x72: 0x0D, 0x74: 0x09, 0x62: 0x08, 0x66: 0x0C}
                if e in mapped:
                    out.append(mapped[e])
                    pos += 1
                elif e in b"01234567":  # octal, up to 3 digits
                    oct_digits = data[pos : pos + 3]
                    m = re.match(rb"[0-7]{1,3}", oct_digits)
                    out.append(int(m.group(0), 8) & 0xFF)
                    pos += m.end()
                elif e in b"\r\n":  # line continuation
                    pos += 1
                    if e == 0x0D and pos < len(data) and data[pos] == 0x0A:
                        pos += 1
                else:
                    out.append(e)
                    pos += 1
                continue
            if c == 0x28:
                depth += 1
            elif c == 0x29:
                depth -= 1
                if depth == 0:
                    return bytes(out), pos + 1
            out.append(c)
            pos += 1
        raise CorruptPdfError("unterminated string")

    def parse_hex_string(self, pos: int) -> tuple[bytes, int]:
        end = self.data.find(b">", pos)
        if end < 0:
            raise CorruptPdfError("unterminated hex string")
        hexdigits = re.sub(rb"[^0-9A-Fa-f]", b"", self.data[pos + 1 : end])
        if len(hexdigits) % 2:
            hexdigits += b"0"
        return bytes.fromhex(hexdigits.decode("ascii")), end + 1

    def parse_array(self, pos: int) -> tuple[list, int]:
        pos += 1
        out: list[Any] = []
        while True:
            pos = self.skip_ws(pos)
            if pos >= len(self.data):
                raise CorruptPdfError("unterminated array")
            if self.data[pos] == 0x5D:  # ']'
                return out, pos + 1
            value, pos = self.parse_value(pos)
            out.append(value)

    def parse_dict(self, pos: int) -> tuple[dict[str, Any], int]:
        pos += 2
        out: dict[str, Any] = {}
        while True:
            pos = self.skip_ws(pos)
            if self.data.startswith(b">>", pos):
                return out, pos + 2
            key, pos = self.parse_name(self.skip_ws(pos))
            value, pos = self.parse_value(pos)
            out[str(key)] = value


class PdfDocument:
    """Parsed PDF file: object access plus the ordered page list."""

    def __init__(self, data: bytes):
        if not data.lstrip()[:5].startswith(b"%PDF-"):
            raise CorruptPdfError("missing %PDF header")
        self.data = data
        self.lexer = _Lexer(data)
        self._cache: dict[int, Any] = {}
        self._offsets: dict[int, int] = {}
        self.trailer: dict[str, Any] = {}
        self._load_xref()
        if "Encrypt" in self.trailer:
            raise CorruptPdfError("encrypted files are not supported")

    # -- cross-reference handling ------------------------------------------

    def _load_xref(self) -> None:
        tail = self.data[-2048:]
        m = None
        for m in re.finditer(rb"startxref\s+(\d+)", tail):
            pass
        if m is not None:
            offset = int(m.group(1))
            try:
                self._parse_xref_chain(offset)
                return
            except CorruptPdfError:
                pass
        self._scan_objects()

    def _parse_xref_chain(self, offset: int) -> None:
        seen: set[int] = set()
        while offset not in seen:
            seen.add(offset)
            pos = self.lexer.skip_ws(offset)
            if not self.data.startswith(b"xref", pos):
                raise CorruptPdfError("cross-reference stream or bad xref offset")
            pos += 4
            while True:
                pos = self.lexer.skip_ws(pos)
                if self.data.startswith(b"trailer", pos):
                    pos += 7
                    trailer, pos = self.lexer.parse_dict(self.lexer.skip_ws(pos))
                    break
                m = re.match(rb"(\d+)\s+(\d+)", self.data[pos : pos + 40])
                if not m:
                    raise CorruptPdfError("malformed xref subsection")
                start, count = int(m.group(1)), int(m.group(2))
                pos = self.lexer.skip_ws(pos + m.end())
                for i in range(count):
                    entry = self.data[pos : pos + 20]
                    em = re.match(rb"(\d{10})\s+(\d{5})\s+([nf])", entry)
                    if not em:
                        raise CorruptPdfError("malformed xref entry")
                    if em.group(3) == b"n":
                        self._offsets.setdefault(start + i, int(em.group(1)))
                    pos += em.end()
                    pos = self.lexer.skip_ws(pos)
            for key, value in trailer.items():
                self.trailer.setdefault(key, value)
            prev = trailer.get("Prev")
            if prev is None:
                return
            offset = int(prev)

    def _scan_objects(self) -> None:
        """Fallback: locate every ``N G obj`` in the file (last wins)."""
        self._offsets = {}
        for m in _OBJ_RE.finditer(self.data):
            self._offsets[int(m.group(1))] = m.start()
        if not self._offsets:
            raise CorruptPdfError("no objects found")
        t = self.data.rfind(b"trailer")
        if t >= 0:
            try:
                trailer, _ = self.lexer.parse_dict(self.lexer.skip_ws(t + 7))
                self.trailer = dict(trailer)
                return
            except CorruptPdfError:
                pass
        for num in sorted(self._offsets):
            obj = self.get_object(num)
            if isinstance(obj, dict) and obj.get("Type") == "Catalog":
                self.trailer = {"Root": Ref(num, 0)}
                return
        raise CorruptPdfError("no trailer and no catalog")

    # -- object access ------------------------------------------------------

    def get_object(self, num: int) -> Any:
        if num in self._cache:
            return self._cache[num]
        offset = self._offsets.get(num)
        obj = None
        if offset is not None:
            try:
                obj = self._parse_indirect(num, offset)
            except CorruptPdfError:
                obj = None
        if obj is None:
            # xref offset was wrong; retry with a full scan
            m = None
            for cand in _OBJ_RE.finditer(self.data):
                if int(cand.group(1)) == num:
                    m = cand
            if m is not None:
                obj = self._parse_indirect(num, m.start())
        self._cache[num] = obj
        return obj

    def _parse_indirect(self, num: int, offset: int) -> Any:
        m = _OBJ_RE.match(self.data, self.lexer.skip_ws(offset))
        if not m or int(m.group(1)) != num:
            raise CorruptPdfError(f"object {num} not at recorded offset")
        value, pos = self.lexer.parse_value(m.end())
        pos = self.lexer.skip_ws(pos)
        if self.data.startswith(b"stream", pos):
            if not isinstance(value, dict):
                raise CorruptPdfError("stream without dictionary")
            pos += 6
            if self.data.startswith(b"\r\n", pos):
                pos += 2
            elif self.data.startswith(b"\n", pos) or self.data.startswith(b"\r", pos):
                pos += 1
            length = self.resolve(value.get("Length"))
            if isinstance(length, int) and self.data.find(b"endstream", pos + length) >= 0:
                raw = self.data[pos : pos + length]
            else:
                end = self.data.find(b"endstream", pos)
                if end < 0:
                    raise CorruptPdfError("unterminated stream")
                raw = self.data[pos:end].rstrip(b"\r\n")
            return Stream(dict=value, raw=raw)
        return value

    def resolve(self, obj: Any) -> Any:
        seen = 0
        while isinstance(obj, Ref):
            obj = self.get_object(obj.num)
            seen += 1
            if seen > 32:
                raise CorruptPdfError("reference cycle")
        return obj

    # -- page tree ----------------------------------------------------------

    def pages(self) -> list[dict[str, Any]]:
        """Ordered page dictionaries with MediaBox/Resources inherited."""
        root = self.resolve(self.trailer.get("Root"))
        if not isinstance(root, dict):
            raise CorruptPdfError("missing document catalog")
        tree = self.resolve(root.get("Pages"))
        if not isinstance(tree, dict):
            raise CorruptPdfError("missing page tree")
        pages: list[dict[str, Any]] = []
        self._walk_pages(tree, {}, pages, set())
        if not pages:
            raise CorruptPdfError("document has no pages")
        return pages

    _INHERITED = ("MediaBox", "Resources", "Rotate")

    def _walk_pages(
        self,
        node: dict[str, Any],
        inherited: dict[str, Any],
        out: list[dict[str, Any]],
        seen: set[int],
    ) -> None:
        attrs = dict(inherited)
        for key in self._INHERITED:
            if key in node:
                attrs[key] = node[key]
        if node.get("Type") == "Page":
            page = dict(node)
            for key, value in attrs.items():
                page.setdefault(key, value)
            out.append(page)
            return
        for kid in self.resolve(node.get("Kids")) or []:
            if isinstance(kid, Ref):
                if kid.num in seen:
                    continue
                seen.add(kid.num)
            child = self.resolve(kid)
            if isinstance(child, dict):
                self._walk_pages(child, attrs, out, seen)

    def page_content(self, page: dict[str, Any]) -> bytes:
        """Concatenated, decoded content stream(s) of a page."""
        contents = self.resolve(page.get("Contents"))
        streams: list[Any] = contents if isinstance(contents, list) else [contents]
        parts = []
        for item in streams:
            stream = self.resolve(item)
            if isinstance(stream, Stream):
                try:
                    parts.append(stream.decoded())
                except ValueError:
                    continue
        return b"\n".join(parts)
