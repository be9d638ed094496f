"""Shared fixture builders: synthetic PDFs, workbooks, emails, HTML."""

from __future__ import annotations

import io
import zipfile
from email.message import EmailMessage
from xml.sax.saxutils import escape

import pytest
from PIL import Image
from reportlab.lib.pagesizes import A4
from reportlab.lib.utils import ImageReader
from reportlab.pdfgen import canvas

# -- PDF ------------------------------------------------------------------------


def make_pdf(
    pages: list[list[tuple[str, float, float, float]]],
    images: dict[int, list[tuple[float, float, float, float]]] | None = None,
) -> bytes:
    """Build a deterministic PDF.

    ``pages``: per page, (text, font_size, x, y_from_bottom) tuples.
    ``images``: page index -> list of (x, y, width, height) rectangles drawn
    as embedded rasters.
    """
    buf = io.BytesIO()
    c = canvas.Canvas(buf, pagesize=A4, invariant=1)
    images = images or {}
    for page_index, lines in enumerate(pages):
        for text, size, x, y in lines:
            c.setFont("Helvetica", size)
            c.drawString(x, y, text)
        for i, (x, y, w, h) in enumerate(images.get(page_index, [])):
            shade = 40 * (i + 1) % 255
            img = Image.new("RGB", (32, 24), (200, shade, 60))
            c.drawImage(ImageReader(img), x, y, width=w, height=h)
        c.showPage()
    c.save()
    return buf.getvalue()


def make_text_pdf() -> bytes:
    """Two pages of plain text at one size."""
    return make_pdf(
        [
            [
                ("First page opening line.", 12, 72, 770),
                ("A second statement follows here.", 12, 72, 720),
            ],
            [("Second page content line.", 12, 72, 770)],
        ]
    )


def make_scanned_pdf(shade: int = 120) -> bytes:
    """Image-only PDF: no text layer at all."""
    buf = io.BytesIO()
    c = canvas.Canvas(buf, pagesize=A4, invariant=1)
    img = Image.new("RGB", (64, 48), (shade, shade // 2, 200))
    c.drawImage(ImageReader(img), 40, 300, width=500, height=480)
    c.showPage()
    c.save()
    return buf.getvalue()


def make_demo_pdf() -> bytes:
    """The census-flavoured demo file: headers, year paragraphs, a drawn
    table, and one embedded figure."""
    page1 = [
        ("Hong Kong Census Overview", 24, 72, 780),
        ("Events recorded in 2011 reshaped districts.", 12, 72, 730),
        ("A census in 2021 counted residents citywide.", 12, 72, 690),
        ("Age structure", 18, 72, 640),
        ("Year Count", 12, 72, 600),
        ("2011 7071600", 12, 72, 584),
        ("2021 7413100", 12, 72, 568),
    ]
    page2 = [
        ("Figure 1: age pyramid", 12, 72, 760),
    ]
    return make_pdf([page1, page2], images={1: [(72, 420, 300, 280)]})


# -- xlsx -------------------------------------------------------------------------

_XLSX_MAIN_NS = "http://schemas.openxmlformats.org/spreadsheetml/2006/main"
_XLSX_REL_NS = "http://schemas.openxmlformats.org/officeDocument/2006/relationships"
_PKG_REL_NS = "http://schemas.openxmlformats.org/package/2006/relationships"


def _col_letter(index: int) -> str:
    letters = ""
    index += 1
    while index:
        index, rem = divmod(index - 1, 26)
        letters = chr(65 + rem) + letters
    return letters


def make_xlsx(
    sheets: list[tuple[str, list[list[object]]]], use_shared_strings: bool = True
) -> bytes:
    """Hand-rolled minimal workbook, byte-stable across runs."""
    shared: list[str] = []
    shared_index: dict[str, int] = {}

    def cell_xml(ref: str, value: object) -> str:
        if value is None or value == "":
            return ""
        if isinstance(value, bool):
            return f'<c r="{ref}" t="b"><v>{1 if value else 0}</v></c>'
        if isinstance(value, (int, float)):
            return f'<c r="{ref}"><v>{value}</v></c>'
        text = str(value)
        if use_shared_strings:
            if text not in shared_index:
                shared_index[text] = len(shared)
                shared.append(text)
            return f'<c r="{ref}" t="s"><v>{shared_index[text]}</v></c>'
        return f'<c r="{ref}" t="inlineStr"><is><t>{escape(text)}</t></is></c>'

    sheet_xmls: list[str] = []
    for _, rows in sheets:
        row_parts: list[str] = []
        for r, row in enumerate(rows, start=1):
            cells = "".join(
                cell_xml(f"{_col_letter(ci)}{r}", value) for ci, value in enumerate(row)
            )
            row_parts.append(f'<row r="{r}">{cells}</row>')
        sheet_xmls.append(
            f'<?xml version="1.0" encoding="UTF-8" standalone="yes"?>'
            f'<worksheet xmlns="{_XLSX_MAIN_NS}"><sheetData>{"".join(row_parts)}'
            f"</sheetData></worksheet>"
        )

    sheet_entries = "".join(
        f'<sheet name="{escape(name)}" sheetId="{i + 1}" r:id="rId{i + 1}"/>'
        for i, (name, _) in enumerate(sheets)
    )
    workbook = (
        f'<?xml version="1.0" encoding="UTF-8" standalone="yes"?>'
        f'<workbook xmlns="{_XLSX_MAIN_NS}" xmlns:r="{_XLSX_REL_NS}">'
        f"<sheets>{sheet_entries}</sheets></workbook>"
    )
    workbook_rels = (
        f'<?xml version="1.0" encoding="UTF-8" standalone="yes"?>'
        f'<Relationships xmlns="{_PKG_REL_NS}">'
        + "".join(
            f'<Relationship Id="rId{i + 1}" Type="{_XLSX_REL_NS}/worksheet" '
            f'Target="worksheets/sheet{i + 1}.xml"/>'
            for i in range(len(sheets))
        )
        + (
            f'<Relationship Id="rId{len(sheets) + 1}" Type="{_XLSX_REL_NS}/sharedStrings" '
            f'Target="sharedStrings.xml"/>'
            if shared
            else ""
        )
        + "</Relationships>"
    )
    root_rels = (
        f'<?xml version="1.0" encoding="UTF-8" standalone="yes"?>'
        f'<Relationships xmlns="{_PKG_REL_NS}">'
        f'<Relationship Id="rId1" Type="{_XLSX_REL_NS}/officeDocument" '
        f'Target="xl/workbook.xml"/></Relationships>'
    )
    content_types = (
        '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>'
        '<Types xmlns="http://schemas.openxmlformats.org/package/2006/content-types">'
        '<Default Extension="rels" '
        'ContentType="application/vnd.openxmlformats-package.relationships+xml"/>'
        '<Default Extension="xml" ContentType="application/xml"/>'
        '<Override PartName="/xl/workbook.xml" ContentType="application/vnd.'
        'openxmlformats-officedocument.spreadsheetml.sheet.main+xml"/>'
        "</Types>"
    )
    shared_xml = (
        f'<?xml version="1.0" encoding="UTF-8" standalone="yes"?>'
        f'<sst xmlns="{_XLSX_MAIN_NS}" count="{len(shared)}" uniqueCount="{len(shared)}">'
        + "".join(f"<si><t>{escape(s)}</t></si>" for s in shared)
        + "</sst>"
    )

    buf = io.BytesIO()
    stamp = (2020, 1, 1, 0, 0, 0)
    with zipfile.ZipFile(buf, "w", zipfile.ZIP_DEFLATED) as archive:

        def put(name: str, text: str) -> None:
            info = zipfile.ZipInfo(name, date_time=stamp)
            archive.writestr(info, text)

        put("[Content_Types].xml", content_types)
        put("_rels/.rels", root_rels)
        put("xl/workbook.xml", workbook)
        put("xl/_rels/workbook.xml.rels", workbook_rels)
        for i, xml in enumerate(sheet_xmls):
            put(f"xl/worksheets/sheet{i + 1}.xml", xml)
        if shared:
            put("xl/sharedStrings.xml", shared_xml)
    return buf.getvalue()


def make_demo_xlsx() -> bytes:
    return make_xlsx(
        [
            (
                "Population",
                [
                    ["Statistic", "Year", "Count"],
                    ["Mid-year population", 2021, 7413100],
                    ["Mid-year population", 2022, 7346100],
                    ["Mid-year population", 2023, 7498100],
                ],
            )
        ]
    )


# -- email ------------------------------------------------------------------------


def make_eml(
    subject: str = "test message",
    plain: str | None = None,
    html: str | None = None,
    attachments: list[tuple[str, bytes]] | None = None,
) -> bytes:
    msg = EmailMessage()
    msg["From"] = "sender@example.com"
    msg["To"] = "reader@example.com"
    msg["Subject"] = subject
    if plain is not None:
        msg.set_content(plain)
        if html is not None:
            msg.add_alternative(html, subtype="html")
    elif html is not None:
        msg.set_content(html, subtype="html")
    for filename, payload in attachments or []:
        msg.add_attachment(
            payload,
            maintype="application",
            subtype="octet-stream",
            filename=filename,
        )
    if msg.is_multipart():
        msg.set_boundary("docs2kg-fixture-boundary")
    return msg.as_bytes()


DEMO_EMAIL_HTML = (
    "<html><body><h1>Quarterly note</h1>"
    "<p>Numbers for 2021 attached as a workbook.</p>"
    "<p>Reply with corrections.</p></body></html>"
)


def make_demo_eml() -> bytes:
    return make_eml(
        subject="census figures",
        html=DEMO_EMAIL_HTML,
        attachments=[("figures.xlsx", make_demo_xlsx())],
    )


# -- corpus fixtures -----------------------------------------------------------------


@pytest.fixture(scope="session")
def demo_pdf_bytes() -> bytes:
    return make_demo_pdf()


@pytest.fixture(scope="session")
def demo_xlsx_bytes() -> bytes:
    return make_demo_xlsx()


@pytest.fixture(scope="session")
def demo_store(tmp_path_factory, demo_pdf_bytes, demo_xlsx_bytes):
    """A saved store holding the two-document demo corpus."""
    from docs2kg.builder import KnowledgeGraph
    from docs2kg.pipeline import ingest_into
    from docs2kg.store import GraphStore

    store_dir = tmp_path_factory.mktemp("demo_store")
    report = ingest_into(
        KnowledgeGraph(),
        [
            (demo_pdf_bytes, "overview.pdf", None),
            (demo_xlsx_bytes, "census.xlsx", None),
        ],
    )
    GraphStore(report.graph).save(store_dir)
    return store_dir
