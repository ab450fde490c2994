"""Source locations shared by every stage of the pipeline."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, order=True)
class SourceSpan:
    """A 1-based character range. ``end_col`` is exclusive."""

    file: str
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def __post_init__(self) -> None:
        if min(self.start_line, self.start_col, self.end_line, self.end_col) < 1:
            raise ValueError(f"span positions are 1-based: {self!r}")
        if (self.start_line, self.start_col) > (self.end_line, self.end_col):
            raise ValueError(f"span start after end: {self!r}")

    @property
    def start(self) -> tuple[int, int]:
        return (self.start_line, self.start_col)

    def cover(self, other: SourceSpan) -> SourceSpan:
        return SourceSpan(self.file, self.start_line, self.start_col, other.end_line, other.end_col)

    def __str__(self) -> str:
        return f"{self.file}:{self.start_line}:{self.start_col}"


NO_SPAN = SourceSpan("<none>", 1, 1, 1, 1)
