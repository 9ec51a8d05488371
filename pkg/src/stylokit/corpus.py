"""Corpus ingestion, tokenization, chunking, splits, subsampling and prompt sets.

Tokenizer rule table (whitespace_punct scheme, applied in order):
  T1  fields are maximal runs of non-whitespace characters (Unicode);
  T2  within a field, word characters are letters, digits and combining
      marks; an apostrophe (' or U+2019) or a single hyphen flanked by
      word characters on both sides is word-internal ("don't", "a-b");
  T3  any other character is punctuation; maximal runs of the SAME
      punctuation character form one token ("--", "...");
  T4  every token records its [start, end) byte offsets into the UTF-8
      encoding of the source text; token text equals the decoded slice.

Detokenizer rule table (heuristic inverse, used for prompt text):
  D1  tokens join with a single space;
  D2  no space before a token starting with , . ; : ! ? ) ] } or a
      closing quote (U+2019, U+201D);
  D3  no space after a token ending with ( [ { or an opening quote
      (U+2018, U+201C);
  D4  a token made entirely of hyphens attaches on both sides ("a--b").
"""

from __future__ import annotations

import json
import math
import random
import unicodedata
import warnings
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Sequence

from .errors import (
    AnnotationMismatch,
    EmptyDocument,
    InsufficientBooks,
    InsufficientMatches,
    InsufficientSentences,
    InvalidFraction,
    MalformedBoilerplate,
    MissingBoilerplate,
)
from .segmentation import sentence_ranges

if TYPE_CHECKING:
    from .annotate import AnnotatedDocument

START_MARKER = "*** START OF"
END_MARKER = "*** END OF"

APOSTROPHES = {"'", "’"}
NO_SPACE_BEFORE = {",", ".", ";", ":", "!", "?", ")", "]", "}", "’", "”"}
NO_SPACE_AFTER = {"(", "[", "{", "‘", "“"}


@dataclass(frozen=True)
class Document:
    author_id: str
    book_id: str
    text: str
    provenance: str = ""


@dataclass(frozen=True)
class TokenStream:
    tokens: tuple[str, ...]
    byte_offsets: tuple[tuple[int, int], ...]

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class Chunk:
    author_id: str
    book_id: str
    split: str
    index: int
    tokens: tuple[str, ...]


@dataclass(frozen=True)
class Prompt:
    text: str
    origin: str  # gpt4_file | test_excerpt | name_elicitation
    author_id: str | None = None
    source: str = ""


@dataclass(frozen=True)
class PromptSet:
    prompts: tuple[Prompt, ...]


def ingest_text(raw: str, author_id: str, book_id: str, strip_boilerplate: bool = True,
                provenance: str = "") -> Document:
    """Build a Document, optionally stripping Project Gutenberg boilerplate.

    The body is the text between the standard "*** START OF" / "*** END OF"
    marker lines. A single marker warns (MalformedBoilerplate) and keeps the
    full text; no marker warns (MissingBoilerplate) and keeps the full text.
    """
    text = raw.replace("\r\n", "\n").replace("\r", "\n")
    if strip_boilerplate:
        lines = text.split("\n")
        start_line = next((i for i, ln in enumerate(lines) if START_MARKER in ln), None)
        end_line = next((i for i, ln in enumerate(lines) if END_MARKER in ln), None)
        if start_line is not None and end_line is not None and start_line < end_line:
            text = "\n".join(lines[start_line + 1 : end_line])
        elif start_line is None and end_line is None:
            warnings.warn(
                f"{author_id}/{book_id}: no boilerplate markers found; keeping full text",
                MissingBoilerplate,
            )
        else:
            warnings.warn(
                f"{author_id}/{book_id}: boilerplate marker found only once; keeping full text",
                MalformedBoilerplate,
            )
    text = text.strip("\n")
    if not text.strip():
        raise EmptyDocument(f"{author_id}/{book_id}: empty after boilerplate stripping")
    return Document(author_id=author_id, book_id=book_id, text=text, provenance=provenance)


def _is_word_char(c: str) -> bool:
    return unicodedata.category(c)[0] in ("L", "N", "M")


def tokenize(text: str, scheme: str = "whitespace_punct",
             sidecar: dict | None = None) -> TokenStream:
    """Tokenize text into a TokenStream with byte offsets.

    scheme "whitespace_punct" applies the rule table above; scheme
    "external" takes a pre-tokenized sidecar record {"tokens", "offsets"}
    and validates every token against its source slice.
    """
    if scheme == "external":
        if sidecar is None:
            raise AnnotationMismatch("external scheme requires a sidecar record")
        return _from_sidecar(text, sidecar)
    if scheme != "whitespace_punct":
        raise ValueError(f"unknown tokenizer scheme {scheme!r}")

    # char-index tokens first, converted to byte offsets at the end
    spans: list[tuple[int, int]] = []
    n = len(text)
    i = 0
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if _is_word_char(c):
            j = i + 1
            while j < n:
                cj = text[j]
                if _is_word_char(cj):
                    j += 1
                elif (cj in APOSTROPHES or cj == "-") and j + 1 < n and _is_word_char(text[j + 1]):
                    j += 2
                else:
                    break
            spans.append((i, j))
            i = j
        else:
            j = i + 1
            while j < n and text[j] == c:
                j += 1
            spans.append((i, j))
            i = j

    # cumulative byte length per char prefix
    byte_pos = [0] * (n + 1)
    for k, ch in enumerate(text):
        byte_pos[k + 1] = byte_pos[k] + len(ch.encode("utf-8"))
    tokens = tuple(text[a:b] for a, b in spans)
    offsets = tuple((byte_pos[a], byte_pos[b]) for a, b in spans)
    return TokenStream(tokens=tokens, byte_offsets=offsets)


def _from_sidecar(text: str, sidecar: dict) -> TokenStream:
    tokens = sidecar.get("tokens")
    offsets = sidecar.get("offsets")
    if tokens is None or offsets is None or len(tokens) != len(offsets):
        raise AnnotationMismatch("sidecar must carry aligned tokens and offsets")
    raw = text.encode("utf-8")
    prev_end = 0
    for idx, (tok, (a, b)) in enumerate(zip(tokens, offsets)):
        if a < prev_end or b <= a or b > len(raw):
            raise AnnotationMismatch(f"offsets not increasing at token {idx}", index=idx)
        if raw[a:b].decode("utf-8", errors="replace") != tok:
            raise AnnotationMismatch(f"token {idx} does not match its source slice", index=idx)
        prev_end = b
    return TokenStream(tokens=tuple(tokens), byte_offsets=tuple((a, b) for a, b in offsets))


def detokenize(tokens: Sequence[str]) -> str:
    """Heuristic inverse of the whitespace_punct tokenizer (rule table above)."""
    parts: list[str] = []
    glue_next = False
    for tok in tokens:
        hyphen_run = bool(tok) and set(tok) == {"-"}
        if not parts:
            parts.append(tok)
        elif glue_next or hyphen_run or tok[0] in NO_SPACE_BEFORE:
            parts.append(tok)
        else:
            parts.append(" " + tok)
        glue_next = hyphen_run or tok[-1] in NO_SPACE_AFTER
    return "".join(parts)


def chunk(stream: TokenStream, chunk_size: int = 256, keep_tail: bool = False, *,
          author_id: str = "", book_id: str = "", split: str = "train") -> list[Chunk]:
    """Cut a token stream into consecutive non-overlapping fixed-size chunks."""
    if chunk_size < 1:
        raise ValueError("chunk_size must be >= 1")
    out: list[Chunk] = []
    toks = stream.tokens
    n = len(toks)
    full = n // chunk_size
    for i in range(full):
        out.append(Chunk(author_id=author_id, book_id=book_id, split=split, index=i,
                         tokens=toks[i * chunk_size : (i + 1) * chunk_size]))
    if keep_tail and n % chunk_size:
        out.append(Chunk(author_id=author_id, book_id=book_id, split=split, index=full,
                         tokens=toks[full * chunk_size :]))
    return out


def split_books(documents: Sequence[Document],
                ratios: tuple[float, float, float] | None = None,
                seed: int = 0) -> dict[str, dict[str, str]]:
    """Assign each book to exactly one of train/valid/test, per author.

    Default (ratios None): one validation book and one test book per author,
    the rest train. Explicit ratios are apportioned by largest remainder with
    every requested split guaranteed at least one book. Deterministic for a
    fixed seed; the shuffle is seeded per author so assignments do not depend
    on document order.
    """
    by_author: dict[str, list[str]] = {}
    for doc in documents:
        by_author.setdefault(doc.author_id, [])
        if doc.book_id in by_author[doc.author_id]:
            raise ValueError(f"duplicate book {doc.author_id}/{doc.book_id}")
        by_author[doc.author_id].append(doc.book_id)

    split_names = ("train", "valid", "test")
    assignment: dict[str, dict[str, str]] = {}
    for author in sorted(by_author):
        books = sorted(by_author[author])
        requested = 3 if ratios is None else sum(1 for r in ratios if r > 0)
        if len(books) < requested:
            raise InsufficientBooks(author)
        rng = random.Random(f"{seed}:{author}")
        rng.shuffle(books)
        if ratios is None:
            counts = [len(books) - 2, 1, 1]
        else:
            counts = _apportion(len(books), ratios)
        mapping: dict[str, str] = {}
        pos = 0
        for name, count in zip(split_names, counts):
            for b in books[pos : pos + count]:
                mapping[b] = name
            pos += count
        assignment[author] = mapping
    return assignment


def _apportion(n: int, ratios: tuple[float, float, float]) -> list[int]:
    total = sum(ratios)
    if total <= 0:
        raise ValueError("ratios must sum to a positive value")
    shares = [r / total * n for r in ratios]
    counts = [math.floor(s) for s in shares]
    # every requested split gets at least one book before distributing the rest
    for i, r in enumerate(ratios):
        if r > 0 and counts[i] == 0:
            counts[i] = 1
    while sum(counts) > n:
        floor = lambda k: 1 if ratios[k] > 0 else 0
        candidates = [k for k in range(3) if counts[k] > floor(k)]
        i = max(candidates, key=lambda k: (counts[k] - shares[k], counts[k]))
        counts[i] -= 1
    remainders = sorted(range(3), key=lambda k: (shares[k] - counts[k], ratios[k]), reverse=True)
    k = 0
    while sum(counts) < n:
        i = remainders[k % 3]
        if ratios[i] > 0:
            counts[i] += 1
        k += 1
    return counts


def subsample(train_chunks: Sequence[Chunk], fraction: float, seed: int = 0) -> list[Chunk]:
    """Uniformly sample ceil(fraction*N) chunks without replacement.

    Selection preserves the original chunk order; fraction 1.0 is the identity.
    """
    if not (0.0 < fraction <= 1.0):
        raise InvalidFraction(f"fraction must be in (0, 1], got {fraction}")
    n = len(train_chunks)
    k = math.ceil(fraction * n)
    if k >= n:
        return list(train_chunks)
    rng = random.Random(seed)
    picked = sorted(rng.sample(range(n), k))
    return [train_chunks[i] for i in picked]


def _book_token_sequences(chunks: Iterable[Chunk]) -> dict[tuple[str, str], list[str]]:
    """Reconstruct per-(author, book) token sequences from chunk windows."""
    grouped: dict[tuple[str, str], list[Chunk]] = {}
    for c in chunks:
        grouped.setdefault((c.author_id, c.book_id), []).append(c)
    out: dict[tuple[str, str], list[str]] = {}
    for key, cs in grouped.items():
        toks: list[str] = []
        for c in sorted(cs, key=lambda c: c.index):
            toks.extend(c.tokens)
        out[key] = toks
    return out


def build_continuation_prompts(test_chunks: Sequence[Chunk], per_author: int = 5,
                               words: tuple[int, int] = (6, 8), seed: int = 0,
                               abbreviations: Iterable[str] = ()) -> PromptSet:
    """Sample sentences from the test split and keep their first 6-8 words.

    Per author, sentences are drawn (seeded, without replacement) from the
    pooled test-split text; a prompt is the first k whitespace words of the
    sentence with k uniform in [words[0], words[1]]. Sentences shorter than
    the drawn k are skipped and another sentence is drawn, so no prompt is
    ever shorter than words[0] words.
    """
    lo, hi = words
    by_book = _book_token_sequences(test_chunks)
    sentences_by_author: dict[str, list[tuple[str, str]]] = {}
    for (author, book) in sorted(by_book):
        toks = by_book[(author, book)]
        for a, b in sentence_ranges(toks, abbreviations):
            text = detokenize(toks[a:b])
            if len(text.split()) >= lo:
                sentences_by_author.setdefault(author, []).append((text, f"{book}#{a}"))

    prompts: list[Prompt] = []
    authors = sorted({c.author_id for c in test_chunks})
    for author in authors:
        eligible = sentences_by_author.get(author, [])
        if not eligible:
            raise InsufficientSentences(author)
        rng = random.Random(f"{seed}:{author}")
        order = list(range(len(eligible)))
        rng.shuffle(order)
        taken = 0
        for idx in order:
            if taken == per_author:
                break
            text, source = eligible[idx]
            ws = text.split()
            k = rng.randint(lo, hi)
            if len(ws) < k:
                continue  # skip and resample rather than emit a short prompt
            prompts.append(Prompt(text=" ".join(ws[:k]), origin="test_excerpt",
                                  author_id=author, source=source))
            taken += 1
        if taken < per_author:
            raise InsufficientSentences(
                author, f"author {author!r}: only {taken} of {per_author} prompts could be built")
    return PromptSet(prompts=tuple(prompts))


def build_name_elicitation_prompts(annotated_train_docs: Iterable["AnnotatedDocument"],
                                   count: int = 50, seed: int = 0) -> PromptSet:
    """Build "some words [verb] [name]" prompts with the trailing name removed.

    A sentence qualifies when a person span immediately follows a verb token
    and ends the clause (next token is punctuation or the sentence ends). The
    prompt is the sentence prefix up to and including the verb; prompts never
    contain person tokens. Fewer matches than requested returns what was
    found plus an InsufficientMatches warning.
    """
    candidates: list[Prompt] = []
    seen: set[str] = set()
    for doc in annotated_train_docs:
        for s_idx, sent in enumerate(doc.sentences):
            toks = sent.tokens
            for i, tok in enumerate(toks):
                if tok.pos != "VERB" or i + 1 >= len(toks) or not toks[i + 1].is_person:
                    continue
                j = i + 1
                while j < len(toks) and toks[j].is_person:
                    j += 1
                if j < len(toks) and toks[j].pos != "PUNCT":
                    continue  # name must end the clause
                if any(t.is_person for t in toks[: i + 1]):
                    continue  # prefix must be name-free
                text = detokenize([t.text for t in toks[: i + 1]])
                if text in seen:
                    continue
                seen.add(text)
                candidates.append(Prompt(text=text, origin="name_elicitation",
                                         author_id=doc.author_id,
                                         source=f"{doc.book_id}#{s_idx}"))
    rng = random.Random(seed)
    if len(candidates) <= count:
        if len(candidates) < count:
            warnings.warn(
                f"requested {count} name-elicitation prompts, found {len(candidates)}",
                InsufficientMatches,
            )
        return PromptSet(prompts=tuple(candidates))
    picked = sorted(rng.sample(range(len(candidates)), count))
    return PromptSet(prompts=tuple(candidates[i] for i in picked))


def load_prompt_file(path) -> PromptSet:
    """Ingest an externally produced prompt file: plain text, one per line."""
    with open(path, encoding="utf-8") as f:
        lines = [ln.strip() for ln in f if ln.strip()]
    return PromptSet(prompts=tuple(Prompt(text=ln, origin="gpt4_file") for ln in lines))


def chunks_to_jsonl(chunks: Iterable[Chunk]) -> str:
    return "".join(
        json.dumps({"author_id": c.author_id, "book_id": c.book_id, "split": c.split,
                    "index": c.index, "tokens": list(c.tokens)},
                   ensure_ascii=False, separators=(",", ":")) + "\n"
        for c in chunks
    )


def chunks_from_jsonl(text: str) -> list[Chunk]:
    out = []
    for line in text.splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        if "_meta" in rec:
            continue
        out.append(Chunk(author_id=rec["author_id"], book_id=rec["book_id"],
                         split=rec["split"], index=rec["index"], tokens=tuple(rec["tokens"])))
    return out


def build_vocabulary(chunks: Iterable[Chunk]) -> dict[str, int]:
    """Deterministic token-id table: unique tokens sorted, id = rank."""
    vocab = sorted({t for c in chunks for t in c.tokens})
    return {tok: i for i, tok in enumerate(vocab)}
