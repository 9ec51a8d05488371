import random
import time
from pathlib import Path

import pytest

from stylokit import annotate

FIXTURES = Path(__file__).parent / "fixtures"
SESSION_START = time.monotonic()

AUTHOR_IDS = [f"AU{i}" for i in range(10)]

# sentence templates used to synthesize deterministic per-author corpora
_TEMPLATES = [
    "The {n1} and the {n2} stayed on the {n3}.",
    "I saw the {n1} when it rained.",
    "Because the {n1} left, she read an old {n2} in the {n3}.",
    "He came and they stayed.",
    "Although the {n1} was quick, the {n2} slept.",
    "It was a quick {n1}, said John.",
    "On the {n1}.",
    "They saw the {n2}; I left.",
]
_NOUNS = ["fox", "dog", "hill", "tea", "man", "garden", "book"]


@pytest.fixture(scope="session")
def fixture_lexicons():
    return annotate.load_lexicons(FIXTURES / "lexicons")


@pytest.fixture(scope="session")
def golden_text():
    return (FIXTURES / "golden_doc.txt").read_text(encoding="utf-8")


def synth_book_text(author: str, book: int, n_sentences: int = 120) -> str:
    """Deterministic synthetic prose, distinct per (author, book)."""
    rng = random.Random(f"{author}:{book}")
    sents = []
    for _ in range(n_sentences):
        tpl = rng.choice(_TEMPLATES)
        sents.append(tpl.format(n1=rng.choice(_NOUNS), n2=rng.choice(_NOUNS),
                                n3=rng.choice(_NOUNS)))
    body = " ".join(sents)
    return (f"Front matter for {author} book {book}.\n"
            f"*** START OF THE EBOOK ***\n{body}\n*** END OF THE EBOOK ***\n"
            f"Back matter.\n")


def write_corpus_tree(root: Path, authors=AUTHOR_IDS, books: int = 3,
                      n_sentences: int = 120) -> Path:
    for author in authors:
        d = root / author
        d.mkdir(parents=True, exist_ok=True)
        for b in range(books):
            (d / f"book{b}.txt").write_text(
                synth_book_text(author, b, n_sentences), encoding="utf-8")
    return root
