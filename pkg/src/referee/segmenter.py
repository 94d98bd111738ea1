"""Deterministic rule-based sentence splitting for code summaries."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Any

_TERMINATORS = ".!?"
_CLOSERS = "\"'”’"
_OPENERS = "\"'`“‘"
_BRACKETS = {"(": ")", "[": "]", "{": "}"}
PROTECTED_ABBREVIATIONS = frozenset(
    {"e.g.", "i.e.", "etc.", "vs.", "cf.", "eg.", "ie.", "mr.", "mrs.", "ms.", "dr.", "fig.", "approx."}
)
_BLANK_LINE = re.compile(r"\n[ \t\r\f\v]*\n")


@dataclass(frozen=True)
class Segment:
    index: int
    text: str
    char_range: tuple[int, int]

    def to_dict(self) -> dict[str, Any]:
        return {"index": self.index, "text": self.text, "char_range": list(self.char_range)}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Segment":
        return cls(data["index"], data["text"], tuple(data["char_range"]))


def _protected_spans(text: str) -> list[tuple[int, int]]:
    """Backtick spans and balanced bracket spans; unmatched delimiters protect nothing."""
    spans = [m.span() for m in re.finditer(r"`[^`]*`", text)]
    stack: list[tuple[str, int]] = []
    for i, ch in enumerate(text):
        if ch in _BRACKETS:
            stack.append((ch, i))
        elif ch in _BRACKETS.values():
            for depth in range(len(stack) - 1, -1, -1):
                if _BRACKETS[stack[depth][0]] == ch:
                    spans.append((stack[depth][1], i + 1))
                    del stack[depth:]
                    break
    return spans


def _previous_token(text: str, end: int) -> str:
    start = end
    while start > 0 and not text[start - 1].isspace() and text[start - 1] not in "([{\"'`":
        start -= 1
    return text[start:end]


def _is_abbreviation(token: str) -> bool:
    lowered = token.lower()
    if lowered in PROTECTED_ABBREVIATIONS:
        return True
    # single-letter initials: "J." or "A.B."
    return bool(re.fullmatch(r"(?:[A-Za-z]\.)+", token)) and len(token) <= 4


def _boundaries(text: str) -> list[int]:
    """Offsets just past each sentence end."""
    protected = _protected_spans(text)
    inside = bytearray(len(text))
    for start, end in protected:
        for i in range(start + 1, end - 1):
            inside[i] = 1

    cuts = {m.start() for m in _BLANK_LINE.finditer(text)}
    i = 0
    n = len(text)
    while i < n:
        if text[i] not in _TERMINATORS or inside[i]:
            i += 1
            continue
        j = i
        while j < n and text[j] in _TERMINATORS:
            j += 1
        while j < n and text[j] in _CLOSERS:
            j += 1
        k = j
        while k < n and text[k].isspace():
            k += 1
        if k == j or k == n:
            i = j
            continue
        nxt = text[k]
        if not (nxt.isupper() or nxt.isdigit() or nxt in _OPENERS):
            i = j
            continue
        if text[i] == "." and _is_abbreviation(_previous_token(text, i + 1)):
            i = j
            continue
        cuts.add(j)
        i = j
    return sorted(cuts)


def segment(summary: str) -> list[Segment]:
    """Split ``summary`` into trimmed, non-overlapping sentence segments."""
    segments: list[Segment] = []
    start = 0
    for cut in _boundaries(summary) + [len(summary)]:
        piece = summary[start:cut]
        stripped = piece.strip()
        if stripped:
            offset = start + (len(piece) - len(piece.lstrip()))
            segments.append(Segment(len(segments), stripped, (offset, offset + len(stripped))))
        start = cut
    return segments
