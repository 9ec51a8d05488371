"""Schema validators for the interchange files, runnable as a module:

    python -m stylokit.validate <kind> <path> [--tokens <source.txt>]

Kinds: annotations, embeddings, nll, predictions, chunks, masked,
profile, profiles, generations, report, prompts. Exit 0 when the file
loads cleanly, 2 otherwise.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import annotate, corpus, features, metrics
from .errors import StylokitError


def _iter_records(path: Path):
    meta = None
    records = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            rec = json.loads(line)
            if "_meta" in rec:
                meta = rec["_meta"]
                continue
            records.append(rec)
    return meta, records


def validate_annotations(path: Path, tokens_path: Path | None = None) -> str:
    meta, records = _iter_records(path)
    if not records:
        raise StylokitError("no annotation records")
    books: dict[str, list[str]] = {}
    for rec in records:
        for key in ("book_id", "sent_index", "tokens"):
            if key not in rec:
                raise StylokitError(f"annotation record missing {key!r}")
        for entry in rec["tokens"]:
            if entry["pos"] not in annotate.TAGS:
                raise StylokitError(f"unknown tag {entry['pos']!r}")
            if not isinstance(entry["t"], str):
                raise StylokitError("token text must be a string")
        books.setdefault(rec["book_id"], []).extend(e["t"] for e in rec["tokens"])
    if tokens_path is not None:
        source = tokens_path.read_text(encoding="utf-8")
        expected = list(corpus.tokenize(source).tokens)
        flat = [t for b in sorted(books) for t in books[b]]
        if flat != expected:
            raise StylokitError("annotation tokens do not match the source text")
    for book, toks in sorted(books.items()):
        annotate.load_external_annotations(path, toks, book_id=book)
    return f"annotations OK: {len(records)} sentences, {len(books)} book(s)" + (
        f", schema {meta.get('schema_version')}" if meta else "")


def validate_embeddings(path: Path) -> str:
    records = metrics.load_embeddings(path)
    if not records:
        raise StylokitError("no embedding records")
    return f"embeddings OK: {len(records)} vectors of dim {len(records[0].vector)}"


def validate_nll(path: Path) -> str:
    dumps = metrics.load_nll_dumps(path)
    if not dumps:
        raise StylokitError("no NLL records")
    for dump in dumps:
        metrics.perplexity(dump)
    return f"nll OK: {len(dumps)} dumps"


def validate_predictions(path: Path) -> str:
    records = metrics.load_predictions(path)
    if not records:
        raise StylokitError("no prediction records")
    return f"predictions OK: {len(records)} records"


def validate_chunks(path: Path) -> str:
    chunks = corpus.chunks_from_jsonl(path.read_text(encoding="utf-8"))
    if not chunks:
        raise StylokitError("no chunks")
    sizes = {len(c.tokens) for c in chunks}
    for c in chunks:
        if c.split not in ("train", "valid", "test"):
            raise StylokitError(f"unknown split {c.split!r}")
    return f"chunks OK: {len(chunks)} chunks, sizes {sorted(sizes)}"


def validate_masked(path: Path) -> str:
    _, records = _iter_records(path)
    if not records:
        raise StylokitError("no masked examples")
    for rec in records:
        ids, attn, labels = rec["input_ids"], rec["attention_mask"], rec["labels"]
        if not (len(ids) == len(attn) == len(labels)):
            raise StylokitError("field lengths differ")
        if any(a != 1 for a in attn):
            raise StylokitError("attention mask must be all ones")
        for i, lab in zip(ids, labels):
            if lab not in (-100, i):
                raise StylokitError(f"label {lab} is neither -100 nor its token id")
    return f"masked OK: {len(records)} examples"


def validate_profile(path: Path) -> str:
    if path.suffix == ".jsonl":
        _, records = _iter_records(path)
        if not records:
            raise StylokitError("no profiles")
        for rec in records:
            features.StyleProfile.from_json_dict(rec)
        return f"profiles OK: {len(records)} profiles"
    rec = json.loads(path.read_text(encoding="utf-8"))
    prof = features.StyleProfile.from_json_dict(rec)
    if abs(sum(prof.syntactic.as_tuple()) - 1.0) > 1e-9:
        raise StylokitError("syntactic distribution does not sum to 1")
    return f"profile OK: {prof.source_label!r}, {prof.n_sentences} sentences"


def validate_generations(path: Path) -> str:
    _, records = _iter_records(path)
    if not records:
        raise StylokitError("no generation records")
    for rec in records:
        for key in ("unit_id", "author_id", "text"):
            if key not in rec:
                raise StylokitError(f"generation record missing {key!r}")
    return f"generations OK: {len(records)} records"


def validate_report(path: Path) -> str:
    rec = json.loads(path.read_text(encoding="utf-8"))
    report = metrics.AlignmentReport.from_json_dict(rec)
    return f"report OK: {len(report.rows)} rows, {len(report.averages)} averages"


def validate_prompts(path: Path) -> str:
    prompts = corpus.load_prompt_file(path)
    if not prompts.prompts:
        raise StylokitError("no prompts")
    return f"prompts OK: {len(prompts.prompts)} prompts"


VALIDATORS = {
    "annotations": validate_annotations,
    "embeddings": validate_embeddings,
    "nll": validate_nll,
    "predictions": validate_predictions,
    "chunks": validate_chunks,
    "masked": validate_masked,
    "profile": validate_profile,
    "profiles": validate_profile,
    "generations": validate_generations,
    "report": validate_report,
    "prompts": validate_prompts,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="python -m stylokit.validate",
                                     description="validate interchange files")
    parser.add_argument("kind", choices=sorted(VALIDATORS))
    parser.add_argument("path", type=Path)
    parser.add_argument("--tokens", type=Path, default=None,
                        help="source text to check annotation token surfaces against")
    args = parser.parse_args(argv)
    try:
        if args.kind == "annotations":
            message = validate_annotations(args.path, args.tokens)
        else:
            message = VALIDATORS[args.kind](args.path)
    except (StylokitError, OSError, KeyError, ValueError, TypeError) as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return 2
    print(message)
    return 0


if __name__ == "__main__":
    sys.exit(main())
