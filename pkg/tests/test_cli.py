"""CLI contracts: subcommands, exit codes, determinism."""

from __future__ import annotations

import json

import pytest

from conftest import make_demo_pdf, make_demo_xlsx
from docs2kg.cli import EXIT_INGEST, EXIT_OK, EXIT_STORE, EXIT_USAGE, main


@pytest.fixture()
def corpus_dir(tmp_path):
    (tmp_path / "overview.pdf").write_bytes(make_demo_pdf())
    (tmp_path / "census.xlsx").write_bytes(make_demo_xlsx())
    return tmp_path


@pytest.fixture()
def cli_store(corpus_dir, tmp_path):
    store = tmp_path / "kg"
    code = main(
        [
            "ingest",
            str(corpus_dir / "overview.pdf"),
            str(corpus_dir / "census.xlsx"),
            "--kg",
            str(store),
        ]
    )
    assert code == EXIT_OK
    return store


def test_ingest_creates_store(cli_store):
    assert (cli_store / "graph.jsonl").is_file()


def test_ingest_missing_file_exit_2(tmp_path, capsys):
    code = main(["ingest", str(tmp_path / "missing.pdf"), "--kg", str(tmp_path / "kg")])
    assert code == EXIT_INGEST
    assert "missing.pdf" in capsys.readouterr().err


def test_ingest_requires_store_flag(corpus_dir, capsys, monkeypatch):
    monkeypatch.delenv("DOCS2KG_STORE", raising=False)
    code = main(["ingest", str(corpus_dir / "overview.pdf")])
    assert code == EXIT_USAGE


def test_store_env_fallback(corpus_dir, tmp_path, monkeypatch):
    store = tmp_path / "env-kg"
    monkeypatch.setenv("DOCS2KG_STORE", str(store))
    assert main(["ingest", str(corpus_dir / "overview.pdf")]) == EXIT_OK
    assert (store / "graph.jsonl").is_file()


def test_reingest_is_noop_with_warning(cli_store, corpus_dir, capsys):
    before = (cli_store / "graph.jsonl").read_bytes()
    code = main(["ingest", str(corpus_dir / "overview.pdf"), "--kg", str(cli_store)])
    assert code == EXIT_OK
    err = capsys.readouterr().err
    assert "already ingested" in err
    assert (cli_store / "graph.jsonl").read_bytes() == before


def test_export_twice_byte_identical(cli_store, tmp_path):
    out1 = tmp_path / "a.jsonl"
    out2 = tmp_path / "b.jsonl"
    assert main(["export", "--kg", str(cli_store), "--out", str(out1)]) == EXIT_OK
    assert main(["export", "--kg", str(cli_store), "--out", str(out2)]) == EXIT_OK
    assert out1.read_bytes() == out2.read_bytes()
    assert out1.read_bytes() == (cli_store / "graph.jsonl").read_bytes()


def test_export_missing_store_exit_3(tmp_path, capsys):
    code = main(
        ["export", "--kg", str(tmp_path / "nostore"), "--out", str(tmp_path / "o")]
    )
    assert code == EXIT_STORE


def test_query_years_spans_both_documents(cli_store, capsys):
    code = main(["query", "--kg", str(cli_store), "--years", "2011,2021"])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    records = [json.loads(line) for line in out.splitlines()]
    assert records, "query printed JSONL"
    docs = {r["doc"] for r in records if r["kind"] == "node"}
    assert len(docs) == 2
    kinds = {r["node_kind"] for r in records if r["kind"] == "node"}
    assert "Document" in kinds


def test_query_output_is_importable_jsonl(cli_store, capsys):
    assert main(["query", "--kg", str(cli_store), "--years", "2021"]) == EXIT_OK
    out = capsys.readouterr().out
    import io

    from docs2kg.store import import_jsonl

    kg = import_jsonl(io.BytesIO(out.encode()))
    assert kg.nodes


def test_query_usage_error_on_bad_years(cli_store, capsys):
    assert main(["query", "--kg", str(cli_store), "--years", "abc"]) == EXIT_USAGE


def test_query_unknown_kind_usage_error(cli_store):
    assert main(["query", "--kg", str(cli_store), "--kind", "Nonsense"]) == EXIT_USAGE


def test_retrieve_prints_anchors_then_context(cli_store, capsys):
    code = main(
        [
            "retrieve",
            "--kg",
            str(cli_store),
            "--query",
            "population from 2011 to 2021",
            "--top-k",
            "3",
            "--hops",
            "1",
        ]
    )
    assert code == EXIT_OK
    out = capsys.readouterr().out
    anchor_part, _, context_part = out.partition("\n\n")
    anchor_lines = anchor_part.strip().splitlines()
    assert len(anchor_lines) == 3
    scores = [float(line.split("\t")[0]) for line in anchor_lines]
    assert scores == sorted(scores, reverse=True)
    assert "## doc:" in context_part


def test_retrieve_deterministic(cli_store, capsys):
    args = ["retrieve", "--kg", str(cli_store), "--query", "census 2021"]
    assert main(args) == EXIT_OK
    first = capsys.readouterr().out
    assert main(args) == EXIT_OK
    second = capsys.readouterr().out
    assert first == second


def test_retrieve_missing_store_exit_3(tmp_path):
    assert (
        main(["retrieve", "--kg", str(tmp_path / "none"), "--query", "x"]) == EXIT_STORE
    )


def test_usage_error_unknown_command(capsys):
    assert main(["frobnicate"]) == EXIT_USAGE


def test_usage_error_bad_top_k(cli_store):
    assert (
        main(["retrieve", "--kg", str(cli_store), "--query", "x", "--top-k", "0"])
        == EXIT_USAGE
    )
