"""Build the two-document demo store for frontend e2e tests.

Reuses the engine test fixtures so the frontend exercises exactly the
corpus the acceptance suite uses.
"""

from __future__ import annotations

import sys
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parents[2]
sys.path.insert(0, str(REPO_ROOT / "tests"))

from conftest import make_demo_pdf, make_demo_xlsx  # noqa: E402

from docs2kg.builder import KnowledgeGraph  # noqa: E402
from docs2kg.pipeline import ingest_into  # noqa: E402
from docs2kg.store import GraphStore  # noqa: E402


def main() -> int:
    if len(sys.argv) != 2:
        print("usage: make_demo_store.py STORE_DIR", file=sys.stderr)
        return 1
    store_dir = Path(sys.argv[1])
    report = ingest_into(
        KnowledgeGraph(),
        [
            (make_demo_pdf(), "overview.pdf", None),
            (make_demo_xlsx(), "census.xlsx", None),
        ],
    )
    GraphStore(report.graph).save(store_dir)
    print(store_dir)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
