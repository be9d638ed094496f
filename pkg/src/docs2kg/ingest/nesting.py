"""Header nesting shared by the HTML, PDF and layout-segment parsers."""

from __future__ import annotations

from typing import Iterable

from ..model import BlockKind, SegmentBlock


def nest_by_level(blocks: Iterable[SegmentBlock], root: SegmentBlock) -> None:
    """Attach a flat block sequence to ``root``, nesting by header level.

    A header owns every following block until the next header of
    equal-or-lower level. Non-header blocks become children of the innermost
    open header (or the root). Ordinals are assigned on attach.
    """
    stack: list[tuple[int, SegmentBlock]] = [(0, root)]
    for block in blocks:
        if block.kind is BlockKind.HEADER:
            while stack[-1][0] >= block.level:
                stack.pop()
            stack[-1][1].add(block)
            stack.append((block.level, block))
        else:
            stack[-1][1].add(block)
