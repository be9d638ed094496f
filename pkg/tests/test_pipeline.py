"""End-to-end ingestion pipeline contracts."""

from __future__ import annotations

import pytest

from conftest import make_demo_eml, make_demo_pdf, make_demo_xlsx, make_eml, make_scanned_pdf
from docs2kg.builder import KnowledgeGraph
from docs2kg.errors import IngestionError
from docs2kg.ingest import IngestOptions
from docs2kg.layout.mock import MockLayoutServer
from docs2kg.model import NodeKind, RelKind
from docs2kg.pipeline import graph_for_bytes, ingest_into, read_input
from docs2kg.store import export_bytes


def test_pdf_yields_single_document_graph():
    kg, warnings = graph_for_bytes(make_demo_pdf(), "demo.pdf")
    assert warnings == []
    assert len(kg.document_nodes()) == 1
    kinds = {n.kind for n in kg.nodes.values()}
    assert {NodeKind.PAGE, NodeKind.HEADER, NodeKind.PARAGRAPH, NodeKind.FIGURE} <= kinds


def test_email_with_attachment_yields_linked_documents():
    kg, _ = graph_for_bytes(make_demo_eml(), "m.eml")
    assert len(kg.document_nodes()) == 2
    attachments = [e for e in kg.edges if e.rel is RelKind.HAS_ATTACHMENT]
    assert len(attachments) == 1
    assert attachments[0].meta["index"] == "0"


def test_scanned_pdf_without_layout_endpoint_fails():
    with pytest.raises(IngestionError):
        graph_for_bytes(make_scanned_pdf(), "scan.pdf")


def test_scanned_pdf_with_mock_layout_service():
    with MockLayoutServer() as mock:
        options = IngestOptions(layout_endpoint=mock.url)
        kg, _ = graph_for_bytes(make_scanned_pdf(), "scan.pdf", options=options)
    headers = [n for n in kg.nodes.values() if n.kind is NodeKind.HEADER]
    paragraphs = [n for n in kg.nodes.values() if n.kind is NodeKind.PARAGRAPH]
    assert len(headers) == 1 and len(paragraphs) == 1
    assert mock.request_count == 1
    doc = kg.document_nodes()[0]
    assert doc.meta["format"] == "pdf_scanned"


def test_text_pdf_never_contacts_layout_service():
    from conftest import make_text_pdf

    with MockLayoutServer() as mock:
        options = IngestOptions(layout_endpoint=mock.url)
        graph_for_bytes(make_text_pdf(), "text.pdf", options=options)
        assert mock.request_count == 0


def test_ingest_into_accumulates_and_is_idempotent():
    pdf = make_demo_pdf()
    xlsx = make_demo_xlsx()
    first = ingest_into(KnowledgeGraph(), [(pdf, "a.pdf", None), (xlsx, "b.xlsx", None)])
    assert len(first.added_doc_ids) == 2
    assert first.skipped == []

    again = ingest_into(first.graph, [(pdf, "a.pdf", None)])
    assert again.added_doc_ids == []
    assert again.skipped == ["a.pdf"]
    assert any("already ingested" in w for w in again.warnings)
    assert export_bytes(again.graph) == export_bytes(first.graph)


def test_ingest_order_does_not_change_export():
    pdf = make_demo_pdf()
    xlsx = make_demo_xlsx()
    ab = ingest_into(KnowledgeGraph(), [(pdf, "a.pdf", None), (xlsx, "b.xlsx", None)])
    b_then_a = ingest_into(KnowledgeGraph(), [(xlsx, "b.xlsx", None)])
    b_then_a = ingest_into(b_then_a.graph, [(pdf, "a.pdf", None)])
    assert export_bytes(ab.graph) == export_bytes(b_then_a.graph)


def test_duplicate_attachment_links_to_existing_document():
    xlsx = make_demo_xlsx()
    first = ingest_into(KnowledgeGraph(), [(xlsx, "standalone.xlsx", None)])
    email = make_eml(plain="same file attached", attachments=[("copy.xlsx", xlsx)])
    second = ingest_into(first.graph, [(email, "m.eml", None)])
    # the email was added, the duplicated workbook was not re-added
    assert len(second.graph.document_nodes()) == 2
    attachments = [e for e in second.graph.edges if e.rel is RelKind.HAS_ATTACHMENT]
    assert len(attachments) == 1
    target = second.graph.nodes[attachments[0].dst]
    assert target.kind is NodeKind.DOCUMENT
    assert any("duplicates already-ingested" in w for w in second.warnings)


def test_read_input_missing_file(tmp_path):
    with pytest.raises(IngestionError, match="missing.pdf"):
        read_input(tmp_path / "missing.pdf")
