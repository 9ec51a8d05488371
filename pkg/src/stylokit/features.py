"""Three-level style features: lexical vector, syntactic distribution, surface vector.

All statistics are per-sentence micro-averages over the pooled sentences of a
document (duplicating every sentence leaves all three representations
unchanged).

Clause rule table for sentence classification (heuristic, no parser):
  C1  a finite-verb group is a maximal run of VERB-tagged tokens;
  C2  a subordinating conjunction or relative pronoun (who/whom/whose/which)
      marks the NEXT verb group as a dependent clause (D += 1);
  C3  other verb groups are independent; the first counts I = 1 and each
      later one counts a new independent clause only if a coordinating
      conjunction or semicolon appeared since the previous verb group
      (otherwise it merges into the current clause);
  C4  mapping: I=1,D=0 -> SIMPLE; I>=2,D=0 -> COMPOUND; I=1,D>=1 -> COMPLEX;
      I>=2,D>=1 -> COMPLEX-COMPOUND; I=0 -> OTHER.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .annotate import AnnotatedDocument, AnnotatedSentence, AnnotatedToken, Lexicons, RELATIVE_PRONOUNS
from .errors import EmptyDocument, UnknownAuthor

CATEGORIES = ("SIMPLE", "COMPOUND", "COMPLEX", "COMPLEX-COMPOUND", "OTHER")


@dataclass(frozen=True)
class LexicalVector:
    nouns_per_sentence: float
    verbs_per_sentence: float
    adjectives_per_sentence: float
    unique_words_per_sentence: float
    subjectivity: float
    concrete_words_per_sentence: float

    def as_tuple(self) -> tuple[float, ...]:
        return (self.nouns_per_sentence, self.verbs_per_sentence,
                self.adjectives_per_sentence, self.unique_words_per_sentence,
                self.subjectivity, self.concrete_words_per_sentence)


@dataclass(frozen=True)
class SyntacticDistribution:
    probabilities: tuple[float, float, float, float, float]  # CATEGORIES order

    def as_tuple(self) -> tuple[float, ...]:
        return self.probabilities


@dataclass(frozen=True)
class SurfaceVector:
    commas_per_sentence: float
    semicolons_per_sentence: float
    colons_per_sentence: float
    words_per_sentence: float
    avg_word_length: float

    def as_tuple(self) -> tuple[float, ...]:
        return (self.commas_per_sentence, self.semicolons_per_sentence,
                self.colons_per_sentence, self.words_per_sentence,
                self.avg_word_length)


@dataclass(frozen=True)
class StyleProfile:
    lexical: LexicalVector
    syntactic: SyntacticDistribution
    surface: SurfaceVector
    n_sentences: int
    source_label: str

    def to_json_dict(self) -> dict:
        return {
            "label": self.source_label,
            "n_sentences": self.n_sentences,
            "lexical": list(self.lexical.as_tuple()),
            "syntactic": list(self.syntactic.as_tuple()),
            "surface": list(self.surface.as_tuple()),
        }

    @classmethod
    def from_json_dict(cls, rec: dict) -> "StyleProfile":
        lex = rec["lexical"]
        syn = rec["syntactic"]
        surf = rec["surface"]
        return cls(
            lexical=LexicalVector(*lex),
            syntactic=SyntacticDistribution(tuple(syn)),
            surface=SurfaceVector(*surf),
            n_sentences=rec["n_sentences"],
            source_label=rec["label"],
        )


def _words(sentence: AnnotatedSentence) -> list[AnnotatedToken]:
    return [t for t in sentence.tokens if t.pos != "PUNCT"]


def _require_sentences(sentences: Sequence[AnnotatedSentence], label: str):
    if not sentences:
        raise EmptyDocument(f"no sentences to extract features from ({label})")


def lexical_vector(doc: AnnotatedDocument | Sequence[AnnotatedSentence],
                   lexicons: Lexicons) -> LexicalVector:
    """Six per-sentence averages over word choice.

    Unique words are counted case-folded within each sentence; subjectivity
    is the per-sentence mean lexicon score of in-lexicon words (a sentence
    with no hits contributes 0); the concreteness dimension counts words
    rated above 3.
    """
    sentences = doc.sentences if isinstance(doc, AnnotatedDocument) else doc
    _require_sentences(sentences, "lexical")
    n = len(sentences)
    nouns = verbs = adjs = uniques = concrete = 0
    subj_total = 0.0
    for sent in sentences:
        words = _words(sent)
        nouns += sum(1 for t in words if t.pos == "NOUN")
        verbs += sum(1 for t in words if t.pos == "VERB")
        adjs += sum(1 for t in words if t.pos == "ADJ")
        uniques += len({t.text.casefold() for t in words})
        scores = [lexicons.subjectivity_lexicon[t.text.casefold()] for t in words
                  if t.text.casefold() in lexicons.subjectivity_lexicon]
        subj_total += sum(scores) / len(scores) if scores else 0.0
        concrete += sum(1 for t in words
                        if lexicons.concreteness_ratings.get(t.text.casefold(), 0.0) > 3.0)
    return LexicalVector(
        nouns_per_sentence=nouns / n,
        verbs_per_sentence=verbs / n,
        adjectives_per_sentence=adjs / n,
        unique_words_per_sentence=uniques / n,
        subjectivity=subj_total / n,
        concrete_words_per_sentence=concrete / n,
    )


def classify_sentence(sentence: AnnotatedSentence) -> str:
    """Classify one tagged sentence into the five structural categories."""
    if sentence.category in CATEGORIES:
        return sentence.category  # external clause label wins
    independent = 0
    dependent = 0
    pending_dependent = False
    coordinator_seen = False
    in_verb_group = False
    for tok in sentence.tokens:
        if tok.pos == "VERB":
            if in_verb_group:
                continue
            in_verb_group = True
            if pending_dependent:
                dependent += 1
                pending_dependent = False
            elif independent == 0 or coordinator_seen:
                independent += 1
                coordinator_seen = False
            continue
        in_verb_group = False
        if tok.pos == "CONJ_SUB" or tok.text.casefold() in RELATIVE_PRONOUNS:
            pending_dependent = True
        elif tok.pos == "CONJ_COORD" or tok.text == ";":
            coordinator_seen = True
    if independent == 0:
        return "OTHER"
    if independent == 1:
        return "SIMPLE" if dependent == 0 else "COMPLEX"
    return "COMPOUND" if dependent == 0 else "COMPLEX-COMPOUND"


def syntactic_distribution(doc: AnnotatedDocument | Sequence[AnnotatedSentence]) -> SyntacticDistribution:
    """Normalized histogram of sentence categories."""
    sentences = doc.sentences if isinstance(doc, AnnotatedDocument) else doc
    _require_sentences(sentences, "syntactic")
    counts = dict.fromkeys(CATEGORIES, 0)
    for sent in sentences:
        counts[classify_sentence(sent)] += 1
    n = len(sentences)
    return SyntacticDistribution(tuple(counts[c] / n for c in CATEGORIES))


def surface_vector(doc: AnnotatedDocument | Sequence[AnnotatedSentence]) -> SurfaceVector:
    """Punctuation and length statistics.

    Words are non-PUNCT tokens; word length counts alphabetic characters
    only and is averaged over all words in the document.
    """
    sentences = doc.sentences if isinstance(doc, AnnotatedDocument) else doc
    _require_sentences(sentences, "surface")
    n = len(sentences)
    commas = semis = colons = word_count = 0
    letter_total = 0
    for sent in sentences:
        commas += sum(1 for t in sent.tokens if t.pos == "PUNCT" and t.text == ",")
        semis += sum(1 for t in sent.tokens if t.pos == "PUNCT" and t.text == ";")
        colons += sum(1 for t in sent.tokens if t.pos == "PUNCT" and t.text == ":")
        words = _words(sent)
        word_count += len(words)
        letter_total += sum(sum(1 for c in t.text if c.isalpha()) for t in words)
    return SurfaceVector(
        commas_per_sentence=commas / n,
        semicolons_per_sentence=semis / n,
        colons_per_sentence=colons / n,
        words_per_sentence=word_count / n,
        avg_word_length=letter_total / word_count if word_count else 0.0,
    )


def profile(doc: AnnotatedDocument | Sequence[AnnotatedSentence], lexicons: Lexicons,
            label: str = "") -> StyleProfile:
    """Compose the three extractors over one document's pooled sentences."""
    sentences = doc.sentences if isinstance(doc, AnnotatedDocument) else tuple(doc)
    _require_sentences(sentences, label or "profile")
    return StyleProfile(
        lexical=lexical_vector(sentences, lexicons),
        syntactic=syntactic_distribution(sentences),
        surface=surface_vector(sentences),
        n_sentences=len(sentences),
        source_label=label,
    )


def pooled_profile(docs: Iterable[AnnotatedDocument], lexicons: Lexicons,
                   label: str) -> StyleProfile:
    """Profile over the pooled sentences of several documents (micro-average)."""
    sentences: list[AnnotatedSentence] = []
    for doc in docs:
        sentences.extend(doc.sentences)
    return profile(sentences, lexicons, label)


def author_reference_profile(author_id: str, annotated_docs: Iterable[AnnotatedDocument],
                             lexicons: Lexicons) -> StyleProfile:
    """Reference profile over an author's pooled test-split documents."""
    docs = [d for d in annotated_docs if d.author_id == author_id]
    if not docs:
        raise UnknownAuthor(f"no annotated documents for author {author_id!r}")
    return pooled_profile(docs, lexicons, label=author_id)


def profile_to_json(p: StyleProfile) -> str:
    return json.dumps(p.to_json_dict(), ensure_ascii=False, separators=(",", ":"))
