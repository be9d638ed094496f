"""Text utilities shared by parsers, the graph builder and the query layer."""

from __future__ import annotations

import re

# Standalone 4-digit tokens in 1900..2099. Word boundaries keep longer digit
# runs (e.g. room numbers) from matching.
_YEAR_RE = re.compile(r"\b(19\d\d|20\d\d)\b")

# Split after ., ! or ? when followed by whitespace; the delimiter stays with
# the sentence.
_SENTENCE_RE = re.compile(r"(?<=[.!?])\s+")


def extract_years(text: str) -> list[int]:
    """All calendar years mentioned in the text, deduplicated, ascending."""
    return sorted({int(m) for m in _YEAR_RE.findall(text)})


def split_sentences(text: str) -> list[str]:
    """Split text into sentences on terminal punctuation.

    Deliberately simple and deterministic: no abbreviation handling. Segments
    are trimmed and empty ones dropped, so joining the result with single
    spaces reconstructs the input's sentence content.
    """
    parts = (part.strip() for part in _SENTENCE_RE.split(text))
    return [part for part in parts if part]
