"""Sentence segmentation, rule-based POS tagging and person-name detection.

Two annotation tiers: the builtin heuristics below (hermetic, deterministic)
or external JSONL sidecars produced by an industrial pipeline, which replace
the builtin output after a token-identity check.

Tagging rule table (applied in order, first hit wins):
  P1  token made entirely of punctuation/symbol characters -> PUNCT;
  P2  case-folded lexicon lookup;
  P3  suffix rules: -ly -> ADV; -ing, -ed -> VERB; -ness, -tion, -ment -> NOUN;
  P4  capitalized and not sentence-initial -> PROPN;
  P5  otherwise OTHER.

Person rule table (over maximal PROPN runs in a sentence):
  N1  a run containing a place-gazetteer token and no person-gazetteer
      token is never a person span;
  N2  otherwise a run is a person span when any token is in the person
      gazetteer, or the token immediately before the run (skipping one
      abbreviation period, as in "Mr . Smith") is an honorific or a
      reporting verb, or the token immediately after is a reporting verb;
  N3  a single capitalized token tagged NOUN or OTHER whose case-folded
      form is in the person gazetteer is a person span (covers
      sentence-initial names, which P4 cannot reach).
"""

from __future__ import annotations

import hashlib
import json
import unicodedata
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import Document, TokenStream
from .errors import AnnotationMismatch, UnknownTag
from .segmentation import sentence_ranges

TAGS = ("NOUN", "PROPN", "VERB", "ADJ", "ADV", "DET", "PRON",
        "CONJ_COORD", "CONJ_SUB", "PUNCT", "OTHER")

SUFFIX_RULES = (("ly", "ADV"), ("ing", "VERB"), ("ed", "VERB"),
                ("ness", "NOUN"), ("tion", "NOUN"), ("ment", "NOUN"))

RELATIVE_PRONOUNS = {"who", "whom", "whose", "which"}


@dataclass(frozen=True)
class AnnotatedToken:
    text: str
    pos: str
    is_person: bool = False


@dataclass(frozen=True)
class AnnotatedSentence:
    tokens: tuple[AnnotatedToken, ...]
    category: str | None = None  # optional external clause label


@dataclass(frozen=True)
class AnnotatedDocument:
    sentences: tuple[AnnotatedSentence, ...]
    author_id: str = ""
    book_id: str = ""
    annotation_source: str = "builtin"

    def tokens(self) -> list[str]:
        return [t.text for s in self.sentences for t in s.tokens]


@dataclass(frozen=True)
class Lexicons:
    pos_lexicon: dict[str, str]
    subjectivity_lexicon: dict[str, float]
    concreteness_ratings: dict[str, float]
    abbreviations: frozenset[str]
    person_names: frozenset[str] = frozenset()
    honorifics: frozenset[str] = frozenset()
    place_names: frozenset[str] = frozenset()
    reporting_verbs: frozenset[str] = frozenset()
    source_ids: tuple[str, ...] = ()


def _read_tsv(path: Path, cast=str) -> dict:
    out = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        word, value = line.split("\t")
        out[word.casefold()] = cast(value)
    return out


def _read_list(path: Path) -> frozenset[str]:
    return frozenset(
        ln.strip().casefold()
        for ln in path.read_text(encoding="utf-8").splitlines()
        if ln.strip() and not ln.startswith("#")
    )


def _file_id(path: Path) -> str:
    digest = hashlib.sha256(path.read_bytes()).hexdigest()[:12]
    return f"{path.name}@{digest}"


def load_lexicons(directory: Path | str) -> Lexicons:
    """Load the lexicon TSVs and gazetteer lists from a directory.

    Expected files: pos.tsv, subjectivity.tsv, concreteness.tsv,
    abbreviations.txt, person_names.txt, honorifics.txt, places.txt,
    reporting_verbs.txt. Missing gazetteers default to empty.
    """
    d = Path(directory)
    concreteness = _read_tsv(d / "concreteness.tsv", float)
    for word, score in concreteness.items():
        if not (1.0 <= score <= 5.0):
            raise ValueError(f"concreteness score for {word!r} out of [1,5]: {score}")
    ids = []
    for name in ("pos.tsv", "subjectivity.tsv", "concreteness.tsv", "abbreviations.txt",
                 "person_names.txt", "honorifics.txt", "places.txt", "reporting_verbs.txt"):
        p = d / name
        if p.exists():
            ids.append(_file_id(p))

    def opt_list(name: str) -> frozenset[str]:
        p = d / name
        return _read_list(p) if p.exists() else frozenset()

    return Lexicons(
        pos_lexicon=_read_tsv(d / "pos.tsv"),
        subjectivity_lexicon=_read_tsv(d / "subjectivity.tsv", float),
        concreteness_ratings=concreteness,
        abbreviations=_read_list(d / "abbreviations.txt"),
        person_names=opt_list("person_names.txt"),
        honorifics=opt_list("honorifics.txt"),
        place_names=opt_list("places.txt"),
        reporting_verbs=opt_list("reporting_verbs.txt"),
        source_ids=tuple(ids),
    )


def default_lexicons() -> Lexicons:
    """Lexicons packaged with the toolkit (user-replaceable data files)."""
    with resources.as_file(resources.files("stylokit") / "data") as d:
        return load_lexicons(d)


def segment_sentences(stream: TokenStream | Sequence[str],
                      abbreviations: Iterable[str] = ()) -> list[tuple[int, int]]:
    """Partition a token stream into sentence index ranges."""
    tokens = stream.tokens if isinstance(stream, TokenStream) else stream
    return sentence_ranges(tokens, abbreviations)


def _is_punct_token(tok: str) -> bool:
    return bool(tok) and all(unicodedata.category(c)[0] in ("P", "S") for c in tok)


def pos_tag(sentence_tokens: Sequence[str], lexicons: Lexicons) -> list[AnnotatedToken]:
    """Tag one sentence's tokens with the rule table above."""
    tagged: list[AnnotatedToken] = []
    for i, tok in enumerate(sentence_tokens):
        if _is_punct_token(tok):
            tag = "PUNCT"
        else:
            folded = tok.casefold()
            tag = lexicons.pos_lexicon.get(folded)
            if tag is None:
                for suffix, rule_tag in SUFFIX_RULES:
                    if folded.endswith(suffix) and len(folded) > len(suffix):
                        tag = rule_tag
                        break
            if tag is None:
                if i > 0 and tok[:1].isupper():
                    tag = "PROPN"
                else:
                    tag = "OTHER"
        tagged.append(AnnotatedToken(text=tok, pos=tag))
    return tagged


def detect_person_names(tagged: Sequence[AnnotatedToken],
                        lexicons: Lexicons) -> list[tuple[int, int]]:
    """Return non-overlapping person spans as [start, end) token ranges."""
    spans: list[tuple[int, int]] = []
    n = len(tagged)
    i = 0
    while i < n:
        if tagged[i].pos == "PROPN":
            j = i
            while j < n and tagged[j].pos == "PROPN":
                j += 1
            folded = [tagged[k].text.casefold() for k in range(i, j)]
            is_place = any(w in lexicons.place_names for w in folded)
            in_gazetteer = any(w in lexicons.person_names for w in folded)
            if is_place and not in_gazetteer:
                i = j
                continue
            # skip one abbreviation period between honorific and name ("Mr . Smith")
            bi = i - 1
            if bi >= 0 and tagged[bi].text == ".":
                bi -= 1
            before = tagged[bi].text.casefold() if bi >= 0 else ""
            after = tagged[j].text.casefold() if j < n else ""
            if (in_gazetteer
                    or before in lexicons.honorifics
                    or before in lexicons.reporting_verbs
                    or after in lexicons.reporting_verbs):
                spans.append((i, j))
            i = j
        else:
            tok = tagged[i]
            if (tok.pos in ("NOUN", "OTHER") and tok.text[:1].isupper()
                    and tok.text.casefold() in lexicons.person_names
                    and tok.text.casefold() not in lexicons.place_names):
                spans.append((i, i + 1))
            i += 1
    return spans


def annotate_tokens(tokens: Sequence[str], lexicons: Lexicons, *,
                    author_id: str = "", book_id: str = "") -> AnnotatedDocument:
    """Run the builtin pipeline: segmentation, tagging, person detection."""
    sentences: list[AnnotatedSentence] = []
    for a, b in sentence_ranges(tokens, lexicons.abbreviations):
        tagged = pos_tag(tokens[a:b], lexicons)
        spans = detect_person_names(tagged, lexicons)
        person = [False] * (b - a)
        for s, e in spans:
            for k in range(s, e):
                person[k] = True
        sentences.append(AnnotatedSentence(tokens=tuple(
            AnnotatedToken(text=t.text, pos=t.pos, is_person=p)
            for t, p in zip(tagged, person))))
    return AnnotatedDocument(sentences=tuple(sentences), author_id=author_id,
                             book_id=book_id, annotation_source="builtin")


def annotate_document(doc: Document, lexicons: Lexicons, stream: TokenStream) -> AnnotatedDocument:
    out = annotate_tokens(list(stream.tokens), lexicons,
                          author_id=doc.author_id, book_id=doc.book_id)
    return out


def load_external_annotations(path: Path | str, stream: TokenStream | Sequence[str],
                              *, author_id: str = "", book_id: str = "") -> AnnotatedDocument:
    """Load sidecar annotations, validating token identity against the stream.

    Sidecar: JSONL, one record per sentence
    {"book_id", "sent_index", "tokens": [{"t", "pos", "person"}]}, optional
    "category" per record, optional leading {"_meta": ...} header. When
    book_id is given, only that book's records apply (one sidecar may cover
    several books).
    """
    tokens = list(stream.tokens) if isinstance(stream, TokenStream) else list(stream)
    records = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            rec = json.loads(line)
            if "_meta" in rec:
                continue
            if book_id and rec.get("book_id") not in (book_id, None):
                continue
            if author_id and rec.get("author_id") not in (author_id, None):
                continue
            records.append(rec)
    records.sort(key=lambda r: r["sent_index"])

    sentences: list[AnnotatedSentence] = []
    pos = 0
    for rec in records:
        sent_tokens: list[AnnotatedToken] = []
        for entry in rec["tokens"]:
            tag = entry["pos"]
            if tag not in TAGS:
                raise UnknownTag(f"unknown tag {tag!r} in {path}")
            if pos >= len(tokens) or tokens[pos] != entry["t"]:
                raise AnnotationMismatch(
                    f"annotation token {pos} ({entry['t']!r}) does not match the stream",
                    index=pos,
                )
            is_person = bool(entry.get("person", False))
            if is_person and tag not in ("PROPN", "NOUN", "OTHER"):
                raise UnknownTag(f"person flag on tag {tag!r} at token {pos}")
            sent_tokens.append(AnnotatedToken(text=entry["t"], pos=tag, is_person=is_person))
            pos += 1
        sentences.append(AnnotatedSentence(tokens=tuple(sent_tokens),
                                           category=rec.get("category")))
    if pos != len(tokens):
        raise AnnotationMismatch(
            f"annotations cover {pos} of {len(tokens)} stream tokens", index=pos)
    return AnnotatedDocument(sentences=tuple(sentences), author_id=author_id,
                             book_id=book_id, annotation_source="external")
