"""Independent reference implementations the tests check the engine against.

Everything here is written from the contracts alone (plain loops, no reuse
of engine internals) so an engine bug cannot hide in its own oracle.
"""

from __future__ import annotations

import math
import random

from docs2kg.builder import KnowledgeGraph
from docs2kg.model import (
    BlockKind,
    DocFormat,
    SegmentBlock,
    SegmentTree,
    SourceDocument,
    mk_doc_id,
)

_WORDS = [
    "population",
    "census",
    "district",
    "growth",
    "table",
    "figure",
    "report",
    "survey",
    "housing",
    "income",
    "age",
    "group",
    "summary",
    "trend",
    "region",
]


def random_text(rng: random.Random, with_year_prob: float = 0.4) -> str:
    words = [rng.choice(_WORDS) for _ in range(rng.randint(2, 7))]
    if rng.random() < with_year_prob:
        words.insert(rng.randrange(len(words) + 1), str(rng.randint(1900, 2099)))
    sentence = " ".join(words).capitalize() + rng.choice([".", ".", "!", "?"])
    if rng.random() < 0.3:
        sentence += " " + " ".join(rng.choice(_WORDS) for _ in range(3)).capitalize() + "."
    return sentence


def random_tree(rng: random.Random, max_blocks: int = 200) -> SegmentTree:
    """A random segment tree honoring every block invariant."""
    budget = rng.randint(1, max_blocks)
    source = SourceDocument(
        doc_id=mk_doc_id(str(rng.random()).encode()),
        format=DocFormat.HTML,
        origin=f"random-{rng.randint(0, 1 << 30)}.html",
        byte_len=budget,
    )
    tree = SegmentTree.empty(source)
    stack: list[tuple[int, SegmentBlock]] = [(0, tree.root)]
    used = 0
    while used < budget:
        roll = rng.random()
        parent = stack[-1][1]
        if roll < 0.2:
            level = rng.randint(1, 4)
            header = SegmentBlock(
                kind=BlockKind.HEADER, text=random_text(rng), level=level
            )
            while stack[-1][0] >= level:
                stack.pop()
            stack[-1][1].add(header)
            stack.append((level, header))
            used += 1
        elif roll < 0.6:
            parent.add(SegmentBlock(kind=BlockKind.PARAGRAPH, text=random_text(rng)))
            used += 1
        elif roll < 0.75:
            table = parent.add(SegmentBlock(kind=BlockKind.TABLE))
            used += 1
            for _ in range(rng.randint(0, 4)):
                if used >= budget:
                    break
                cells = [rng.choice(_WORDS), str(rng.randint(1900, 2099))]
                table.add(SegmentBlock(kind=BlockKind.TABLE_ROW, text=" | ".join(cells)))
                used += 1
        elif roll < 0.85:
            parent.add(
                SegmentBlock(
                    kind=BlockKind.FIGURE,
                    text=rng.choice(["", random_text(rng)]),
                    bbox=(0.0, 0.0, float(rng.randint(1, 500)), float(rng.randint(1, 500))),
                )
            )
            used += 1
        else:
            parent.add(SegmentBlock(kind=BlockKind.PARAGRAPH, text=random_text(rng)))
            used += 1
    return tree


# -- graph oracles ---------------------------------------------------------------


def bfs_oracle(
    kg: KnowledgeGraph,
    seed: str,
    hops: int,
    rels: set | None = None,
    direction: str = "both",
) -> set[str]:
    """Reachable node ids within ``hops`` by a plain frontier walk."""
    reached = {seed}
    frontier = {seed}
    for _ in range(hops):
        nxt = set()
        for edge in kg.edges:
            if rels is not None and edge.rel not in rels:
                continue
            if direction in ("out", "both") and edge.src in frontier:
                nxt.add(edge.dst)
            if direction in ("in", "both") and edge.dst in frontier:
                nxt.add(edge.src)
        nxt -= reached
        if not nxt:
            break
        reached |= nxt
        frontier = nxt
    return reached


def edges_among(kg: KnowledgeGraph, node_ids: set[str]):
    return [e for e in kg.edges if e.src in node_ids and e.dst in node_ids]


def cosine_oracle(u: list[float], v: list[float]) -> float:
    nu = math.sqrt(sum(x * x for x in u))
    nv = math.sqrt(sum(y * y for y in v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return sum(x * y for x, y in zip(u, v)) / (nu * nv)


def top_k_oracle(index, query_vector: list[float], k: int):
    """Exhaustive scan: (node_id, score) sorted by score desc then id."""
    scored = [
        (node_id, cosine_oracle(query_vector, vector))
        for node_id, vector in index.vectors.items()
    ]
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored[:k]


def find_nodes_oracle(kg: KnowledgeGraph, node_filter) -> list[str]:
    """Linear scan applying the filter semantics from scratch."""
    from docs2kg.text import extract_years

    out = []
    for node in kg.nodes.values():
        if node_filter.kinds is not None and node.kind not in node_filter.kinds:
            continue
        if node_filter.doc_ids is not None and node.doc_id not in node_filter.doc_ids:
            continue
        if (
            node_filter.text_contains is not None
            and node_filter.text_contains.lower() not in node.text.lower()
        ):
            continue
        if node_filter.years is not None:
            if not (set(extract_years(node.text)) & node_filter.years):
                continue
        out.append(node.id)
    return sorted(out)
