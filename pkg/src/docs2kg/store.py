"""Graph persistence and queries.

The canonical on-disk form is JSONL: one object per line, UTF-8, LF
separators, keys sorted, nodes first (by id) then edges (by src, dst, rel).
Exports are byte-stable so round-trip equality can be checked with a plain
file diff. The in-memory store keeps adjacency indexes rebuilt on load;
queries are read-only and safe to run concurrently.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO

from .builder import KnowledgeGraph
from .errors import (
    DanglingEdgeError,
    JsonlParseError,
    SinkError,
    StoreError,
    UnknownNodeError,
)
from .model import DocFormat, DocNode, KgEdge, NodeKind, RelKind, SourceDocument
from .text import extract_years

GRAPH_FILE = "graph.jsonl"

_JSON_KW = {"sort_keys": True, "ensure_ascii": False, "separators": (",", ":")}


def node_record(node: DocNode) -> dict:
    """Wire form of a node; optional fields are omitted, not null."""
    record = {
        "doc": node.doc_id,
        "id": node.id,
        "kind": "node",
        "meta": dict(node.meta),
        "node_kind": node.kind.value,
        "text": node.text,
    }
    if node.bbox is not None:
        record["bbox"] = list(node.bbox)
    if node.page is not None:
        record["page"] = node.page
    return record


def edge_record(edge: KgEdge) -> dict:
    return {
        "dst": edge.dst,
        "kind": "edge",
        "meta": dict(edge.meta),
        "rel": edge.rel.value,
        "src": edge.src,
    }


def _edge_sort_key(edge: KgEdge) -> tuple:
    return (edge.src, edge.dst, edge.rel.value, json.dumps(edge.meta, sort_keys=True))


def export_jsonl(kg: KnowledgeGraph, out: BinaryIO) -> int:
    """Write the canonical export; returns the record count."""
    count = 0
    try:
        for node_id in sorted(kg.nodes):
            line = json.dumps(node_record(kg.nodes[node_id]), **_JSON_KW)
            out.write(line.encode("utf-8") + b"\n")
            count += 1
        for edge in sorted(kg.edges, key=_edge_sort_key):
            line = json.dumps(edge_record(edge), **_JSON_KW)
            out.write(line.encode("utf-8") + b"\n")
            count += 1
    except OSError as exc:
        raise SinkError(str(exc)) from exc
    return count


def export_bytes(kg: KnowledgeGraph) -> bytes:
    import io

    buf = io.BytesIO()
    export_jsonl(kg, buf)
    return buf.getvalue()


def import_jsonl(source: BinaryIO) -> KnowledgeGraph:
    """Read an export back; the result has equal node/edge multisets.

    Sources are reconstructed from each Document node's provenance meta.
    """
    kg = KnowledgeGraph()
    pending_edges: list[tuple[int, KgEdge]] = []
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            record = json.loads(line.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise JsonlParseError(lineno, f"bad JSON: {exc}") from exc
        if not isinstance(record, dict):
            raise JsonlParseError(lineno, "record is not an object")
        kind = record.get("kind")
        if kind == "node":
            node = _parse_node(record, lineno)
            kg.nodes[node.id] = node
        elif kind == "edge":
            pending_edges.append((lineno, _parse_edge(record, lineno)))
        else:
            raise JsonlParseError(lineno, f"unknown record kind {kind!r}")

    for lineno, edge in pending_edges:
        for endpoint in (edge.src, edge.dst):
            if endpoint not in kg.nodes:
                raise DanglingEdgeError(lineno, f"edge references unknown node {endpoint}")
        kg.edges.append(edge)

    kg.sources.extend(_reconstruct_sources(kg))
    return kg


def _parse_node(record: dict, lineno: int) -> DocNode:
    try:
        bbox = record.get("bbox")
        return DocNode(
            id=str(record["id"]),
            kind=NodeKind(record["node_kind"]),
            text=str(record["text"]),
            doc_id=str(record["doc"]),
            page=int(record["page"]) if "page" in record else None,
            bbox=tuple(float(v) for v in bbox) if bbox is not None else None,
            meta={str(k): str(v) for k, v in record.get("meta", {}).items()},
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise JsonlParseError(lineno, f"bad node record: {exc}") from exc


def _parse_edge(record: dict, lineno: int) -> KgEdge:
    try:
        return KgEdge(
            src=str(record["src"]),
            dst=str(record["dst"]),
            rel=RelKind(record["rel"]),
            meta={str(k): str(v) for k, v in record.get("meta", {}).items()},
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise JsonlParseError(lineno, f"bad edge record: {exc}") from exc


def _reconstruct_sources(kg: KnowledgeGraph) -> list[SourceDocument]:
    sources = []
    for node in kg.nodes.values():
        if node.kind is not NodeKind.DOCUMENT:
            continue
        try:
            fmt = DocFormat(node.meta["format"])
        except (KeyError, ValueError):
            continue  # hand-written file without provenance meta
        sources.append(
            SourceDocument(
                doc_id=node.doc_id,
                format=fmt,
                origin=node.meta.get("origin", node.text),
                byte_len=int(node.meta.get("byte_len", "0") or 0),
            )
        )
    return sources


# -- queries ---------------------------------------------------------------------


@dataclass
class NodeFilter:
    """Conjunctive node filter; an empty filter matches every node."""

    kinds: set[NodeKind] | None = None
    text_contains: str | None = None
    years: set[int] | None = None
    doc_ids: set[str] | None = None

    def matches(self, node: DocNode) -> bool:
        if self.kinds is not None and node.kind not in self.kinds:
            return False
        if self.doc_ids is not None and node.doc_id not in self.doc_ids:
            return False
        if (
            self.text_contains is not None
            and self.text_contains.lower() not in node.text.lower()
        ):
            return False
        if self.years is not None and not self.years.intersection(
            extract_years(node.text)
        ):
            return False
        return True


@dataclass
class Subgraph:
    """A closed view: every edge's endpoints are in ``nodes``."""

    nodes: list[DocNode] = field(default_factory=list)
    edges: list[KgEdge] = field(default_factory=list)

    def node_ids(self) -> set[str]:
        return {n.id for n in self.nodes}


class GraphStore:
    """In-memory store over a knowledge graph with adjacency indexes."""

    def __init__(self, kg: KnowledgeGraph):
        self.kg = kg
        self._out: dict[str, list[KgEdge]] = {}
        self._in: dict[str, list[KgEdge]] = {}
        self._parent: dict[str, str] = {}
        for edge in kg.edges:
            self._out.setdefault(edge.src, []).append(edge)
            self._in.setdefault(edge.dst, []).append(edge)
            if edge.rel is RelKind.HAS_CHILD:
                self._parent[edge.dst] = edge.src

    # -- persistence ------------------------------------------------------------

    @classmethod
    def load(cls, store_dir: str | Path) -> "GraphStore":
        path = Path(store_dir) / GRAPH_FILE
        if not path.is_file():
            raise StoreError(f"no graph store at {path}")
        with path.open("rb") as fp:
            return cls(import_jsonl(fp))

    @classmethod
    def load_or_empty(cls, store_dir: str | Path) -> "GraphStore":
        path = Path(store_dir) / GRAPH_FILE
        if not path.is_file():
            return cls(KnowledgeGraph())
        with path.open("rb") as fp:
            return cls(import_jsonl(fp))

    def save(self, store_dir: str | Path) -> int:
        directory = Path(store_dir)
        try:
            directory.mkdir(parents=True, exist_ok=True)
            tmp = directory / (GRAPH_FILE + ".tmp")
            with tmp.open("wb") as fp:
                count = export_jsonl(self.kg, fp)
            tmp.replace(directory / GRAPH_FILE)
        except OSError as exc:
            raise SinkError(str(exc)) from exc
        return count

    # -- queries ------------------------------------------------------------------

    def find_nodes(self, node_filter: NodeFilter) -> list[DocNode]:
        """All nodes matching the conjunctive filter, sorted by id."""
        return sorted(
            (n for n in self.kg.nodes.values() if node_filter.matches(n)),
            key=lambda n: n.id,
        )

    def neighbors(
        self,
        node_id: str,
        hops: int,
        rels: set[RelKind] | None = None,
        direction: str = "both",
    ) -> Subgraph:
        """Breadth-first closure around a node.

        ``rels`` restricts which edges are traversed; the returned subgraph
        still carries every edge among the included nodes.
        """
        if node_id not in self.kg.nodes:
            raise UnknownNodeError(f"no node {node_id}")
        if direction not in ("out", "in", "both"):
            raise ValueError(f"bad direction {direction!r}")
        visited = {node_id}
        frontier = [node_id]
        for _ in range(hops):
            next_frontier: list[str] = []
            for current in frontier:
                for neighbor in self._adjacent(current, rels, direction):
                    if neighbor not in visited:
                        visited.add(neighbor)
                        next_frontier.append(neighbor)
            if not next_frontier:
                break
            frontier = next_frontier
        return self.induced_subgraph(visited)

    def _adjacent(
        self, node_id: str, rels: set[RelKind] | None, direction: str
    ) -> list[str]:
        out: list[str] = []
        if direction in ("out", "both"):
            out.extend(
                e.dst for e in self._out.get(node_id, []) if rels is None or e.rel in rels
            )
        if direction in ("in", "both"):
            out.extend(
                e.src for e in self._in.get(node_id, []) if rels is None or e.rel in rels
            )
        return out

    def induced_subgraph(self, node_ids: set[str]) -> Subgraph:
        """Closure of a node set: those nodes plus all edges among them."""
        nodes = sorted(
            (self.kg.nodes[i] for i in node_ids if i in self.kg.nodes),
            key=lambda n: n.id,
        )
        edges = [
            e for e in self.kg.edges if e.src in node_ids and e.dst in node_ids
        ]
        return Subgraph(nodes=nodes, edges=sorted(edges, key=_edge_sort_key))

    def components_with_roots(self, node_filter: NodeFilter) -> Subgraph:
        """Matches plus their ancestry up to the Document roots.

        Edges are the HasChild links along those ancestor paths,
        HasAttachment links between included Documents, and SameTime links
        among the included nodes (so year-joined matches stay visibly
        connected across documents).
        """
        matches = self.find_nodes(node_filter)
        included: set[str] = set()
        edges: list[KgEdge] = []
        edge_seen: set[int] = set()

        def take(edge: KgEdge) -> None:
            if id(edge) not in edge_seen:
                edge_seen.add(id(edge))
                edges.append(edge)

        for node in matches:
            included.add(node.id)
            current = node.id
            while current in self._parent:
                parent_id = self._parent[current]
                for edge in self._in.get(current, []):
                    if edge.rel is RelKind.HAS_CHILD and edge.src == parent_id:
                        take(edge)
                        break
                included.add(parent_id)
                current = parent_id

        for edge in self.kg.edges:
            if edge.src not in included or edge.dst not in included:
                continue
            if edge.rel is RelKind.HAS_ATTACHMENT or edge.rel is RelKind.SAME_TIME:
                take(edge)

        nodes = sorted((self.kg.nodes[i] for i in included), key=lambda n: n.id)
        return Subgraph(nodes=nodes, edges=sorted(edges, key=_edge_sort_key))

    def summary(self) -> dict[str, int]:
        return {
            "nodes": len(self.kg.nodes),
            "edges": len(self.kg.edges),
            "documents": len(self.kg.document_nodes()),
        }
