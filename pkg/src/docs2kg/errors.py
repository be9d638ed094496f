"""Exception hierarchy for the docs2kg engine."""

from __future__ import annotations


class Docs2kgError(Exception):
    """Base class for all errors raised by this package."""


class UnknownFormatError(Docs2kgError):
    """No sniffing rule or filename hint matched the input bytes."""


class EmptyDocumentError(Docs2kgError):
    """Parsing succeeded but produced no content blocks."""


class MalformedMimeError(Docs2kgError):
    """The bytes are not a parseable RFC-5322/MIME message."""


class CorruptWorkbookError(Docs2kgError):
    """The bytes are not a readable xlsx workbook."""


class CorruptPdfError(Docs2kgError):
    """The bytes are not a readable PDF file."""


class SegmentTreeError(Docs2kgError):
    """A segment tree violates a structural invariant."""


class IngestionError(Docs2kgError):
    """A document could not be ingested (missing input, no layout service, ...)."""


class ServiceUnreachableError(Docs2kgError):
    """An external HTTP service could not be reached."""


class ProtocolError(Docs2kgError):
    """An external HTTP service answered with a malformed response."""


class UnknownNodeError(Docs2kgError):
    """A node id was referenced that does not exist in the graph."""


class DuplicateNodeIdError(Docs2kgError):
    """Two graphs being merged share a node id (hash collision or double ingest)."""


class JsonlParseError(Docs2kgError):
    """A JSONL line could not be decoded into a graph record."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class DanglingEdgeError(Docs2kgError):
    """An imported edge references a node id not present in the file."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class SinkError(Docs2kgError):
    """Writing an export to its destination failed."""


class StoreError(Docs2kgError):
    """A graph store directory is missing or unreadable."""


class DimensionMismatchError(Docs2kgError):
    """Two vectors of different lengths were combined."""


class EmbedderMismatchError(Docs2kgError):
    """An index built with one embedder was queried with another."""


class EmbedderFailureError(Docs2kgError):
    """The embedder failed on a node's text."""

    def __init__(self, node_id: str, message: str):
        super().__init__(f"node {node_id}: {message}")
        self.node_id = node_id


class PortInUseError(Docs2kgError):
    """The requested service port is already bound."""
