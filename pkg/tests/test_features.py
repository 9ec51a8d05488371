"""Feature extractors against hand-counted fixtures.

The golden document (tests/fixtures/golden_doc.txt) holds ten sentences;
counts below were derived by hand against the fixture lexicons:

  per-sentence (nouns, verbs, adjs, unique, subjectivity, concrete>3):
    S1  "I left."                                  0 1 0 2  0     0
    S2  "I came and she left."                     0 2 0 5  0     0
    S3  "Because it rained, I stayed."             0 2 0 5  0     0
    S4  "Although it rained, I left and she
         stayed."                                  0 3 0 8  0     0
    S5  "On the hill."                             1 0 0 3  0     1
    S6  "I came, I saw; I left."                   0 3 0 4  0     0
    S7  "The quick fox jumped over the old dog."   2 1 2 7  0.45  2
    S8  "Mr. Smith said it was quick."             1 2 1 6  0.6   0
    S9  "She read an old book in the garden."      2 1 1 8  0.3   2
    S10 "They saw the fox and the dog on the
         hill when it rained."                     3 2 0 11 0     3

  categories: S1 SIMPLE, S2 COMPOUND, S3 COMPLEX, S4 COMPLEX-COMPOUND,
  S5 OTHER, S6 COMPOUND, S7 SIMPLE, S8 SIMPLE, S9 SIMPLE, S10 COMPLEX.

  surface: commas 3, semicolons 1, colons 0, words 64, letters 219.
"""

import math

import pytest

from stylokit import annotate, corpus, features
from stylokit.errors import EmptyDocument, UnknownAuthor

GOLDEN_LEXICAL = (0.9, 1.7, 0.4, 5.9, 0.135, 0.8)
GOLDEN_SYNTACTIC = (0.4, 0.2, 0.2, 0.1, 0.1)
GOLDEN_SURFACE = (0.3, 0.1, 0.0, 6.4, 219 / 64)


@pytest.fixture()
def golden_doc(golden_text, fixture_lexicons):
    tokens = list(corpus.tokenize(golden_text).tokens)
    return annotate.annotate_tokens(tokens, fixture_lexicons)


def assert_close(got, expected, tol=1e-9):
    assert len(got) == len(expected)
    for g, e in zip(got, expected):
        assert abs(g - e) <= tol, (got, expected)


class TestLexicalVector:
    def test_golden_document(self, golden_doc, fixture_lexicons):
        vec = features.lexical_vector(golden_doc, fixture_lexicons)
        assert_close(vec.as_tuple(), GOLDEN_LEXICAL)

    def test_single_sentence_fixture(self, fixture_lexicons):
        toks = list(corpus.tokenize("The quick fox jumped .").tokens)
        doc = annotate.annotate_tokens(toks, fixture_lexicons)
        vec = features.lexical_vector(doc, fixture_lexicons)
        assert_close(vec.as_tuple(), (1, 1, 1, 4, 0.6, 1))

    def test_duplication_invariance(self, golden_doc, fixture_lexicons):
        doubled = list(golden_doc.sentences) * 2
        a = features.lexical_vector(golden_doc, fixture_lexicons)
        b = features.lexical_vector(doubled, fixture_lexicons)
        assert_close(a.as_tuple(), b.as_tuple(), tol=1e-12)

    def test_no_lexicon_hits_contributes_zero(self, fixture_lexicons):
        toks = list(corpus.tokenize("he came .").tokens)
        doc = annotate.annotate_tokens(toks, fixture_lexicons)
        vec = features.lexical_vector(doc, fixture_lexicons)
        assert vec.subjectivity == 0.0

    def test_empty_doc_raises(self, fixture_lexicons):
        with pytest.raises(EmptyDocument):
            features.lexical_vector([], fixture_lexicons)


class TestClassifySentence:
    @pytest.mark.parametrize("text,expected", [
        ("I left .", "SIMPLE"),
        ("I came and she left .", "COMPOUND"),
        ("Because it rained , I stayed .", "COMPLEX"),
        ("Although it rained , I left and she stayed .", "COMPLEX-COMPOUND"),
        ("On the hill .", "OTHER"),
    ])
    def test_five_cases(self, text, expected, fixture_lexicons):
        toks = list(corpus.tokenize(text).tokens)
        doc = annotate.annotate_tokens(toks, fixture_lexicons)
        assert features.classify_sentence(doc.sentences[0]) == expected

    def test_totality(self, golden_doc):
        for sent in golden_doc.sentences:
            assert features.classify_sentence(sent) in features.CATEGORIES

    def test_external_category_wins(self):
        sent = annotate.AnnotatedSentence(
            tokens=(annotate.AnnotatedToken("x", "OTHER"),), category="COMPOUND")
        assert features.classify_sentence(sent) == "COMPOUND"


class TestSyntacticDistribution:
    def test_golden_document(self, golden_doc):
        dist = features.syntactic_distribution(golden_doc)
        assert_close(dist.as_tuple(), GOLDEN_SYNTACTIC)

    def test_sums_to_one(self, golden_doc):
        assert abs(sum(features.syntactic_distribution(golden_doc).as_tuple()) - 1.0) <= 1e-9

    def test_all_other(self, fixture_lexicons):
        toks = list(corpus.tokenize("On the hill . Over the hill .").tokens)
        doc = annotate.annotate_tokens(toks, fixture_lexicons)
        assert features.syntactic_distribution(doc).as_tuple() == (0, 0, 0, 0, 1)

    def test_duplication_invariance(self, golden_doc):
        doubled = list(golden_doc.sentences) * 2
        assert (features.syntactic_distribution(golden_doc).as_tuple()
                == features.syntactic_distribution(doubled).as_tuple())


class TestSurfaceVector:
    def test_golden_document(self, golden_doc):
        vec = features.surface_vector(golden_doc)
        assert_close(vec.as_tuple(), GOLDEN_SURFACE)

    def test_hand_counted_sentence(self, fixture_lexicons):
        toks = list(corpus.tokenize("I came, I saw; I left.").tokens)
        doc = annotate.annotate_tokens(toks, fixture_lexicons)
        vec = features.surface_vector(doc)
        assert_close(vec.as_tuple(), (1, 1, 0, 6, 14 / 6))

    def test_two_letter_word(self, fixture_lexicons):
        toks = list(corpus.tokenize("Go .").tokens)
        doc = annotate.annotate_tokens(toks, fixture_lexicons)
        assert features.surface_vector(doc).as_tuple() == (0, 0, 0, 1, 2)

    def test_word_length_ignores_digits_and_punct(self, fixture_lexicons):
        toks = list(corpus.tokenize("route 66 .").tokens)
        doc = annotate.annotate_tokens(toks, fixture_lexicons)
        vec = features.surface_vector(doc)
        # "route" has 5 letters, "66" has none; 5 letters over 2 words
        assert vec.avg_word_length == 2.5


class TestProfile:
    def test_composition(self, golden_doc, fixture_lexicons):
        p = features.profile(golden_doc, fixture_lexicons, label="golden")
        assert p.lexical == features.lexical_vector(golden_doc, fixture_lexicons)
        assert p.syntactic == features.syntactic_distribution(golden_doc)
        assert p.surface == features.surface_vector(golden_doc)
        assert p.n_sentences == 10 and p.source_label == "golden"

    def test_deterministic(self, golden_doc, fixture_lexicons):
        a = features.profile(golden_doc, fixture_lexicons, "x")
        b = features.profile(golden_doc, fixture_lexicons, "x")
        assert a == b

    def test_pooled_differs_from_averaged(self, fixture_lexicons):
        # unequal sentence counts: pooling weights sentences, not documents
        t1 = list(corpus.tokenize("I left .").tokens)
        t2 = list(corpus.tokenize("The quick fox jumped over the old dog . "
                                  "She read an old book in the garden . "
                                  "They saw the fox .").tokens)
        d1 = annotate.annotate_tokens(t1, fixture_lexicons)
        d2 = annotate.annotate_tokens(t2, fixture_lexicons)
        pooled = features.pooled_profile([d1, d2], fixture_lexicons, "pool")
        p1 = features.profile(d1, fixture_lexicons, "d1")
        p2 = features.profile(d2, fixture_lexicons, "d2")
        averaged = [(a + b) / 2 for a, b in zip(p1.surface.as_tuple(), p2.surface.as_tuple())]
        assert list(pooled.surface.as_tuple()) != averaged

    def test_pool_order_invariance(self, fixture_lexicons, golden_text):
        toks = list(corpus.tokenize(golden_text).tokens)
        doc = annotate.annotate_tokens(toks, fixture_lexicons)
        half = len(doc.sentences) // 2
        d1 = annotate.AnnotatedDocument(sentences=doc.sentences[:half], author_id="A")
        d2 = annotate.AnnotatedDocument(sentences=doc.sentences[half:], author_id="A")
        a = features.pooled_profile([d1, d2], fixture_lexicons, "A")
        b = features.pooled_profile([d2, d1], fixture_lexicons, "A")
        assert a.lexical == b.lexical and a.syntactic == b.syntactic

    def test_author_reference_profile(self, fixture_lexicons, golden_text):
        toks = list(corpus.tokenize(golden_text).tokens)
        docs = [annotate.annotate_tokens(toks, fixture_lexicons, author_id=f"AU{i}")
                for i in range(10)]
        profiles = [features.author_reference_profile(f"AU{i}", docs, fixture_lexicons)
                    for i in range(10)]
        assert len(profiles) == 10
        assert all(p.source_label == f"AU{i}" for i, p in enumerate(profiles))
        with pytest.raises(UnknownAuthor):
            features.author_reference_profile("nobody", docs, fixture_lexicons)

    def test_all_values_finite(self, golden_doc, fixture_lexicons):
        p = features.profile(golden_doc, fixture_lexicons, "golden")
        for vec in (p.lexical.as_tuple(), p.syntactic.as_tuple(), p.surface.as_tuple()):
            assert all(math.isfinite(v) for v in vec)

    def test_json_roundtrip(self, golden_doc, fixture_lexicons):
        import json
        p = features.profile(golden_doc, fixture_lexicons, "golden")
        rec = json.loads(features.profile_to_json(p))
        assert set(rec) == {"label", "n_sentences", "lexical", "syntactic", "surface"}
        assert features.StyleProfile.from_json_dict(rec) == p
