"""Sentence boundary detection over token sequences.

Boundary rule table (applied in order):
  S1  a token made entirely of '.', '!' or '?' characters is a terminal
      candidate ("." "..." "!" "??" ...);
  S2  a single "." is NOT a boundary when the preceding token plus the
      period is a known abbreviation (case-folded, stored with the
      trailing period, e.g. "mr.") or the preceding token is a single
      alphabetic character (an initial, "J.");
  S3  a boundary extends past any closing quotes/brackets and further
      terminal tokens that immediately follow, so the closer stays with
      its sentence;
  S4  input with no boundary is one sentence; ranges always partition
      the token sequence.
"""

from __future__ import annotations

from typing import Iterable, Sequence

TERMINAL_CHARS = {".", "!", "?"}
CLOSERS = {'"', "'", ")", "]", "}", "’", "”"}


def is_terminal_token(token: str) -> bool:
    return bool(token) and all(c in TERMINAL_CHARS for c in token)


def sentence_ranges(
    tokens: Sequence[str], abbreviations: Iterable[str] = ()
) -> list[tuple[int, int]]:
    """Partition ``tokens`` into sentence index ranges [start, end)."""
    abbrevs = {a.casefold() for a in abbreviations}
    n = len(tokens)
    ranges: list[tuple[int, int]] = []
    start = 0
    i = 0
    while i < n:
        tok = tokens[i]
        if is_terminal_token(tok):
            if tok == "." and i > 0:
                prev = tokens[i - 1]
                if (prev.casefold() + ".") in abbrevs or (len(prev) == 1 and prev.isalpha()):
                    i += 1
                    continue
            j = i + 1
            while j < n and (tokens[j] in CLOSERS or is_terminal_token(tokens[j])):
                j += 1
            ranges.append((start, j))
            start = j
            i = j
        else:
            i += 1
    if start < n:
        ranges.append((start, n))
    if not ranges and n == 0:
        return []
    return ranges
