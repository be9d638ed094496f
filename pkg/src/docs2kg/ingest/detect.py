"""Input format detection: magic bytes first, filename extension as tiebreak."""

from __future__ import annotations

import io
import re
import zipfile

from ..errors import CorruptPdfError, UnknownFormatError
from ..model import DocFormat
from .pdf import DEFAULT_SCANNED_THRESHOLD, probe_pdf_has_text

_HTML_TOKEN_RE = re.compile(rb"<\s*(?:!doctype|html)\b", re.IGNORECASE)
_HEADER_LINE_RE = re.compile(r"^[!-9;-~]+:")

# Enough well-known names to accept a header block as RFC-5322.
_KNOWN_HEADERS = {
    "from",
    "to",
    "cc",
    "bcc",
    "subject",
    "date",
    "received",
    "message-id",
    "mime-version",
    "return-path",
    "sender",
    "reply-to",
    "content-type",
}

_EXTENSIONS = {
    ".html": DocFormat.HTML,
    ".htm": DocFormat.HTML,
    ".eml": DocFormat.EMAIL,
    ".xlsx": DocFormat.EXCEL,
    ".pdf": DocFormat.PDF_GENERATED,
}


def detect_format(
    data: bytes,
    hint: str | None = None,
    *,
    scanned_threshold: int = DEFAULT_SCANNED_THRESHOLD,
) -> DocFormat:
    """Sniff the document format from its bytes.

    PDF files are probed for a text layer so the returned enum already
    carries the generated/scanned subtype (the routing rule itself lives in
    the pdf module). Unprobeable PDFs default to the generated subtype and
    fail later in parsing.
    """
    if not data:
        raise UnknownFormatError("empty input")

    if data.startswith(b"%PDF-"):
        try:
            has_text = probe_pdf_has_text(data, scanned_threshold=scanned_threshold)
        except CorruptPdfError:
            return DocFormat.PDF_GENERATED
        return DocFormat.PDF_GENERATED if has_text else DocFormat.PDF_SCANNED

    if data.startswith(b"PK\x03\x04") and _zip_has_workbook(data):
        return DocFormat.EXCEL

    head = data.lstrip()[:2048]
    if head.startswith(b"<") and _HTML_TOKEN_RE.search(head):
        return DocFormat.HTML

    if _looks_like_email(data):
        return DocFormat.EMAIL

    if hint:
        lowered = hint.lower()
        for ext, fmt in _EXTENSIONS.items():
            if lowered.endswith(ext):
                return fmt

    raise UnknownFormatError(
        f"no sniffing rule matched{f' for {hint!r}' if hint else ''}"
    )


def _zip_has_workbook(data: bytes) -> bool:
    try:
        with zipfile.ZipFile(io.BytesIO(data)) as archive:
            return "xl/workbook.xml" in archive.namelist()
    except zipfile.BadZipFile:
        return False


def _looks_like_email(data: bytes) -> bool:
    """Check the leading block against RFC-5322 header grammar."""
    head = data[:8192].decode("latin-1")
    names: list[str] = []
    saw_line = False
    for line in head.splitlines():
        if not line.strip():
            break
        if line[0] in " \t":  # folded continuation
            if not saw_line:
                return False
            continue
        if not _HEADER_LINE_RE.match(line):
            return False
        saw_line = True
        names.append(line.split(":", 1)[0].strip().lower())
    return bool(names) and any(name in _KNOWN_HEADERS for name in names)
