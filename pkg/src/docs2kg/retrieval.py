"""Embedding-anchored retrieval over the knowledge graph.

Every node is embedded; a query picks its top-k nearest nodes as anchors;
anchors expand n hops over structural and semantic edges alike; the reached
subgraph is rendered into a deterministic context string for prompt
augmentation. The default embedder is a hashed bag of tokens so the whole
path is hermetic and reproducible; an HTTP embedder with the same interface
plugs in for production.
"""

from __future__ import annotations

import json
import math
import re
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from typing import Protocol, Sequence

from .builder import KnowledgeGraph
from .errors import (
    DimensionMismatchError,
    EmbedderFailureError,
    EmbedderMismatchError,
    ProtocolError,
    ServiceUnreachableError,
)
from .model import RelKind
from .store import GraphStore, Subgraph

DEFAULT_TOP_K = 5
DEFAULT_HOPS = 2
DEFAULT_CONTEXT_BUDGET = 4000

_TOKEN_RE = re.compile(r"[a-z0-9]+")

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_FNV_MASK = 0xFFFFFFFFFFFFFFFF


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a hash."""
    h = _FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & _FNV_MASK
    return h


class Embedder(Protocol):
    embedder_id: str
    dim: int

    def embed(self, text: str) -> list[float]: ...

    def embed_batch(self, texts: Sequence[str]) -> list[list[float]]: ...


class HashingEmbedder:
    """Deterministic bag-of-tokens embedder: FNV-1a buckets, L2-normalized."""

    embedder_id = "fnv1a64-bag-256"
    dim = 256

    def embed(self, text: str) -> list[float]:
        vector = [0.0] * self.dim
        for token in _TOKEN_RE.findall(text.lower()):
            vector[fnv1a64(token.encode("utf-8")) % self.dim] += 1.0
        return _normalize(vector)

    def embed_batch(self, texts: Sequence[str]) -> list[list[float]]:
        return [self.embed(text) for text in texts]


class RemoteEmbedder:
    """Client for an external embedding service with the same contract.

    POST {endpoint}/embed with ``{"texts": [...]}`` returning
    ``{"vectors": [[...], ...], "dim": D}``; vectors are re-normalized on
    receipt so downstream cosine math holds either way.
    """

    def __init__(self, endpoint: str, timeout: float = 30.0):
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout
        self.embedder_id = f"remote:{self.endpoint}"
        self.dim = 0  # learned from the first response

    def embed(self, text: str) -> list[float]:
        return self.embed_batch([text])[0]

    def embed_batch(self, texts: Sequence[str]) -> list[list[float]]:
        request = urllib.request.Request(
            self.endpoint + "/embed",
            data=json.dumps({"texts": list(texts)}).encode("utf-8"),
            headers={"Content-Type": "application/json"},
            method="POST",
        )
        try:
            with urllib.request.urlopen(request, timeout=self.timeout) as response:
                payload = json.loads(response.read())
        except (urllib.error.URLError, OSError) as exc:
            raise ServiceUnreachableError(f"embedder at {self.endpoint}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ProtocolError(f"malformed embedder response: {exc}") from exc
        try:
            vectors = [[float(v) for v in vec] for vec in payload["vectors"]]
            self.dim = int(payload.get("dim", len(vectors[0]) if vectors else 0))
        except (KeyError, TypeError, ValueError) as exc:
            raise ProtocolError(f"malformed embedder response: {exc}") from exc
        if len(vectors) != len(texts):
            raise ProtocolError(
                f"embedder returned {len(vectors)} vectors for {len(texts)} texts"
            )
        return [_normalize(vec) for vec in vectors]


def _normalize(vector: list[float]) -> list[float]:
    norm = math.sqrt(sum(v * v for v in vector))
    if norm == 0.0:
        return vector
    return [v / norm for v in vector]


def cosine(u: Sequence[float], v: Sequence[float]) -> float:
    """Cosine similarity; 0.0 when either vector is all-zero."""
    if len(u) != len(v):
        raise DimensionMismatchError(f"{len(u)} vs {len(v)}")
    nu = math.sqrt(sum(x * x for x in u))
    nv = math.sqrt(sum(x * x for x in v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return sum(x * y for x, y in zip(u, v)) / (nu * nv)


@dataclass
class EmbeddingIndex:
    """node id -> unit (or zero) vector, tagged with its embedder."""

    dim: int
    vectors: dict[str, list[float]] = field(default_factory=dict)
    embedder_id: str = HashingEmbedder.embedder_id


@dataclass(frozen=True)
class Anchor:
    node_id: str
    score: float


def build_index(kg: KnowledgeGraph, embedder: Embedder | None = None) -> EmbeddingIndex:
    """Embed every node's text; coverage is exactly the graph's node ids."""
    embedder = embedder or HashingEmbedder()
    node_ids = list(kg.nodes)
    texts = [kg.nodes[node_id].text for node_id in node_ids]
    try:
        vectors = embedder.embed_batch(texts)
    except (ServiceUnreachableError, ProtocolError):
        raise  # transport problems are not a node's fault
    except Exception:
        # retry one at a time to attribute the failing node
        vectors = []
        for node_id, text in zip(node_ids, texts):
            try:
                vectors.append(embedder.embed(text))
            except Exception as exc:
                raise EmbedderFailureError(node_id, str(exc)) from exc
    if len(vectors) != len(node_ids):
        raise EmbedderFailureError("batch", "vector count mismatch")
    dim = embedder.dim or (len(vectors[0]) if vectors else 0)
    return EmbeddingIndex(
        dim=dim,
        vectors=dict(zip(node_ids, vectors)),
        embedder_id=embedder.embedder_id,
    )


def top_k_anchors(
    index: EmbeddingIndex,
    query: str,
    k: int = DEFAULT_TOP_K,
    embedder: Embedder | None = None,
) -> list[Anchor]:
    """The k nearest nodes by cosine, ties broken by ascending node id."""
    if k < 1:
        raise ValueError("k must be >= 1")
    embedder = embedder or HashingEmbedder()
    if embedder.embedder_id != index.embedder_id:
        raise EmbedderMismatchError(
            f"index built with {index.embedder_id!r}, queried with {embedder.embedder_id!r}"
        )
    query_vector = embedder.embed(query)
    scored = [
        (node_id, cosine(query_vector, vector))
        for node_id, vector in index.vectors.items()
    ]
    scored.sort(key=lambda item: (-item[1], item[0]))
    return [Anchor(node_id=node_id, score=score) for node_id, score in scored[:k]]


def expand_anchors(
    store: GraphStore,
    anchors: Sequence[Anchor | str],
    hops: int = DEFAULT_HOPS,
    rels: set[RelKind] | None = None,
) -> Subgraph:
    """Union of the anchors' n-hop neighborhoods (undirected traversal).

    All eight relation kinds are traversed by default, covering both
    structural and semantic proximity.
    """
    node_ids: set[str] = set()
    for anchor in anchors:
        anchor_id = anchor.node_id if isinstance(anchor, Anchor) else anchor
        ball = store.neighbors(anchor_id, hops, rels=rels, direction="both")
        node_ids.update(ball.node_ids())
    return store.induced_subgraph(node_ids)


def assemble_context(subgraph: Subgraph, budget_chars: int = DEFAULT_CONTEXT_BUDGET) -> str:
    """Render the subgraph for prompt augmentation.

    Nodes are grouped by document (ordered by doc id, then node id), one
    ``[kind] text`` line each under a ``## doc:`` header; output is cut at
    the last whole line that fits the budget.
    """
    ordered = sorted(subgraph.nodes, key=lambda n: (n.doc_id, n.id))
    lines: list[str] = []
    current_doc: str | None = None
    for node in ordered:
        if node.doc_id != current_doc:
            current_doc = node.doc_id
            lines.append(f"## doc:{node.doc_id}")
        text = " ".join(node.text.split())
        lines.append(f"[{node.kind.value}] {text}".rstrip())

    out: list[str] = []
    used = 0
    for line in lines:
        cost = len(line) + (1 if out else 0)
        if used + cost > budget_chars:
            break
        out.append(line)
        used += cost
    return "\n".join(out)
