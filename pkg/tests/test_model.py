"""Identifier and domain-type contracts."""

from __future__ import annotations

import hashlib

import pytest
from hypothesis import given
from hypothesis import strategies as st

from docs2kg.errors import SegmentTreeError
from docs2kg.model import (
    BlockKind,
    DocFormat,
    KgEdge,
    RelKind,
    SegmentBlock,
    SegmentTree,
    SourceDocument,
    mk_doc_id,
    mk_node_id,
    validate_segment_tree,
)


def test_doc_id_of_empty_bytes_is_published_constant():
    assert mk_doc_id(b"") == "e3b0c44298fc1c14"


def test_doc_id_of_abc_matches_sha256_test_vector():
    assert mk_doc_id(b"abc") == "ba7816bf8f01cfea"


def test_doc_id_deterministic_on_fixture_bytes():
    data = b"some document body \xf0\x9f\x8c\x8d"
    assert mk_doc_id(data) == mk_doc_id(data)


def test_node_id_of_empty_path():
    # frozen from an independent sha256 run over "0000000000000000/"
    assert mk_node_id("0000000000000000", []) == "690b185089e9f213"
    assert (
        hashlib.sha256(b"0000000000000000/").hexdigest()[:16]
        == mk_node_id("0000000000000000", [])
    )


def test_node_id_distinguishes_path_depth():
    d = "0000000000000000"
    assert mk_node_id(d, [0]) != mk_node_id(d, [0, 0])
    # independent computation of both
    assert mk_node_id(d, [0]) == hashlib.sha256(b"0000000000000000/0").hexdigest()[:16]
    assert (
        mk_node_id(d, [0, 0]) == hashlib.sha256(b"0000000000000000/0.0").hexdigest()[:16]
    )


@given(st.binary(max_size=64))
def test_doc_id_pure(data):
    assert mk_doc_id(data) == mk_doc_id(data)
    assert len(mk_doc_id(data)) == 16
    int(mk_doc_id(data), 16)  # hex


def test_ids_pure_over_1000_random_repeats():
    import random

    rng = random.Random(404)
    for _ in range(1000):
        data = rng.randbytes(rng.randint(0, 32))
        assert mk_doc_id(data) == mk_doc_id(data)
        doc_id = mk_doc_id(data)
        path = [rng.randint(0, 30) for _ in range(rng.randint(0, 5))]
        assert mk_node_id(doc_id, path) == mk_node_id(doc_id, path)


@given(
    st.text(alphabet="0123456789abcdef", min_size=16, max_size=16),
    st.lists(st.integers(min_value=0, max_value=99), max_size=6),
)
def test_node_id_pure(doc_id, path):
    assert mk_node_id(doc_id, path) == mk_node_id(doc_id, path)
    assert len(mk_node_id(doc_id, path)) == 16


def test_source_document_from_bytes():
    src = SourceDocument.from_bytes(b"abc", DocFormat.HTML, "a.html")
    assert src.doc_id == "ba7816bf8f01cfea"
    assert src.byte_len == 3
    assert src.format is DocFormat.HTML


def test_edge_rejects_self_loop():
    with pytest.raises(ValueError):
        KgEdge(src="x", dst="x", rel=RelKind.BEFORE)


def test_pdf_format_flag():
    assert DocFormat.PDF_GENERATED.is_pdf
    assert DocFormat.PDF_SCANNED.is_pdf
    assert not DocFormat.HTML.is_pdf


def _tree_with(children: list[SegmentBlock]) -> SegmentTree:
    src = SourceDocument.from_bytes(b"x", DocFormat.HTML, "x.html")
    tree = SegmentTree.empty(src)
    for child in children:
        tree.root.add(child)
    return tree


def test_validator_accepts_well_formed_tree():
    table = SegmentBlock(kind=BlockKind.TABLE)
    table.add(SegmentBlock(kind=BlockKind.TABLE_ROW, text="a | b"))
    tree = _tree_with(
        [
            SegmentBlock(kind=BlockKind.HEADER, text="t", level=2),
            SegmentBlock(kind=BlockKind.PARAGRAPH, text="p"),
            table,
        ]
    )
    validate_segment_tree(tree)


def test_validator_rejects_row_outside_table():
    tree = _tree_with([SegmentBlock(kind=BlockKind.TABLE_ROW, text="a")])
    with pytest.raises(SegmentTreeError):
        validate_segment_tree(tree)


def test_validator_rejects_bad_bbox():
    tree = _tree_with(
        [SegmentBlock(kind=BlockKind.PARAGRAPH, text="p", bbox=(5.0, 0.0, 1.0, 2.0))]
    )
    with pytest.raises(SegmentTreeError):
        validate_segment_tree(tree)


def test_validator_rejects_ordinal_gap():
    block = SegmentBlock(kind=BlockKind.PARAGRAPH, text="p")
    block.ordinal = 3
    tree = _tree_with([])
    tree.root.children.append(block)
    with pytest.raises(SegmentTreeError):
        validate_segment_tree(tree)


def test_validator_rejects_header_level_out_of_range():
    tree = _tree_with([SegmentBlock(kind=BlockKind.HEADER, text="h", level=9)])
    with pytest.raises(SegmentTreeError):
        validate_segment_tree(tree)
