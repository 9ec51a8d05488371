"""Command-line surface: ingest -> profile -> mask -> merge -> evaluate -> report.

Every command is deterministic for fixed (inputs, seed): reruns produce
byte-identical artifacts. Outputs are written to a temp file and renamed
into place; a lock file keeps one writer per output directory. Exit codes:
0 success, 1 internal error, 2 invalid input or config.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import os
import sys
import tempfile
import warnings
from pathlib import Path

from . import __version__, adapters, annotate, corpus, features, metrics, render
from .errors import StylokitError
from .safetensors_io import read_safetensors, write_safetensors

DEFAULT_SEED = 0
DEFAULT_CHUNK_SIZE = 256


# ---------------------------------------------------------------------------
# I/O helpers

def _atomic_write_bytes(path: Path, data: bytes):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(OSError):
            os.unlink(tmp)
        raise


def _atomic_write_text(path: Path, text: str):
    _atomic_write_bytes(path, text.encode("utf-8"))


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


@contextlib.contextmanager
def _output_lock(out_dir: Path):
    out_dir.mkdir(parents=True, exist_ok=True)
    lock = out_dir / ".stylokit.lock"
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise StylokitError(
            f"output directory {out_dir} is locked by another run "
            f"(remove {lock.name} if that run crashed)")
    try:
        os.write(fd, str(os.getpid()).encode())
        os.close(fd)
        yield
    finally:
        with contextlib.suppress(OSError):
            os.unlink(lock)


def _metadata(command: str, args, **extra) -> dict:
    meta = {"tool": "stylokit", "version": __version__, "command": command,
            "seed": args.seed}
    meta.update(extra)
    return meta


def _load_config(args) -> dict:
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.exists():
            raise StylokitError(f"config file {path} does not exist")
        return json.loads(path.read_text(encoding="utf-8"))
    return {}


def _lexicons_for(args, config: dict):
    directory = getattr(args, "lexicons", None) or config.get("lexicons")
    if directory:
        return annotate.load_lexicons(Path(directory))
    return annotate.default_lexicons()


# ---------------------------------------------------------------------------
# ingest

def _discover_books(root: Path):
    if not root.is_dir():
        raise StylokitError(f"corpus root {root} is not a directory")
    layout = []
    for author_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        books = sorted(author_dir.glob("*.txt"))
        if books:
            layout.append((author_dir.name, books))
    if not layout:
        raise StylokitError(f"corpus root {root} holds no <author>/<book>.txt files")
    return layout


def _load_sidecar_index(path: Path) -> dict:
    index = {}
    with open(path, encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            rec = json.loads(line)
            if "_meta" in rec:
                continue
            index[(rec.get("author_id"), rec["book_id"])] = rec
    return index


def cmd_ingest(args) -> int:
    config = _load_config(args)
    root = Path(args.corpus or config.get("corpus_root", ""))
    out_dir = Path(args.out)
    chunk_size = args.chunk_size or config.get("chunk_size", DEFAULT_CHUNK_SIZE)
    scheme = args.tokenizer or config.get("tokenizer_scheme", "whitespace_punct")
    ratios = tuple(config["ratios"]) if "ratios" in config else None
    sidecar_index = {}
    sidecar_path = args.pretokenized or config.get("pretokenized")
    if scheme == "external":
        if not sidecar_path:
            raise StylokitError("tokenizer scheme 'external' needs --pretokenized")
        sidecar_index = _load_sidecar_index(Path(sidecar_path))

    layout = _discover_books(root)
    documents = []
    streams = {}
    for author, books in layout:
        for book_path in books:
            book = book_path.stem
            doc = corpus.ingest_text(book_path.read_text(encoding="utf-8"),
                                     author, book, strip_boilerplate=not args.keep_boilerplate,
                                     provenance=str(book_path))
            documents.append(doc)
            sidecar = sidecar_index.get((author, book)) or sidecar_index.get((None, book))
            if scheme == "external" and sidecar is None:
                raise StylokitError(f"no pre-tokenized record for {author}/{book}")
            streams[(author, book)] = corpus.tokenize(doc.text, scheme=scheme,
                                                      sidecar=sidecar)

    assignment = corpus.split_books(documents, ratios=ratios, seed=args.seed)
    all_chunks = []
    for doc in documents:
        split = assignment[doc.author_id][doc.book_id]
        all_chunks.extend(corpus.chunk(streams[(doc.author_id, doc.book_id)],
                                       chunk_size, author_id=doc.author_id,
                                       book_id=doc.book_id, split=split))
    all_chunks.sort(key=lambda c: (c.author_id, c.book_id, c.index))

    meta = _metadata("ingest", args, corpus_root=str(root), chunk_size=chunk_size,
                     tokenizer_scheme=scheme,
                     ratios=list(ratios) if ratios else "one-valid-one-test")
    with _output_lock(out_dir):
        _atomic_write_text(out_dir / "chunks.jsonl",
                           json.dumps({"_meta": meta}, sort_keys=True) + "\n"
                           + corpus.chunks_to_jsonl(all_chunks))
        manifest = {"metadata": meta,
                    "splits": {a: dict(sorted(m.items())) for a, m in assignment.items()},
                    "n_chunks": len(all_chunks)}
        _atomic_write_text(out_dir / "manifest.json", _json_text(manifest))
    print(f"ingested {len(documents)} books from {len(assignment)} authors "
          f"-> {len(all_chunks)} chunks of {chunk_size}")
    return 0


# ---------------------------------------------------------------------------
# profile

def _annotated_book_docs(chunks, lexicons, annotation_index, author=None):
    """Annotate per-(author, book) token streams reconstructed from chunks."""
    by_book = {}
    for c in chunks:
        if author is None or c.author_id == author:
            by_book.setdefault((c.author_id, c.book_id), []).append(c)
    docs = []
    for (author_id, book_id) in sorted(by_book):
        toks = []
        for c in sorted(by_book[(author_id, book_id)], key=lambda c: c.index):
            toks.extend(c.tokens)
        sidecar = annotation_index.get((author_id, book_id)) or annotation_index.get(
            (None, book_id))
        if sidecar is not None:
            docs.append(annotate.load_external_annotations(
                sidecar, toks, author_id=author_id, book_id=book_id))
        else:
            docs.append(annotate.annotate_tokens(toks, lexicons, author_id=author_id,
                                                 book_id=book_id))
    return docs


def _annotation_index(path_arg) -> dict:
    """Map (author, book) -> sidecar path for --annotations <dir or file>."""
    if not path_arg:
        return {}
    path = Path(path_arg)
    if path.is_dir():
        index = {}
        for p in sorted(path.glob("*.jsonl")):
            stem = p.stem
            if "__" in stem:
                author, book = stem.split("__", 1)
                index[(author, book)] = p
            else:
                index[(None, stem)] = p
        return index
    # single file: applies to the book_ids found inside
    index = {}
    with open(path, encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            rec = json.loads(line)
            if "_meta" in rec:
                continue
            index[(rec.get("author_id"), rec["book_id"])] = path
    return index


def _annotation_pipeline_ids(ann_index: dict) -> list[str]:
    """External pipeline identities from the sidecars' header records."""
    ids = set()
    for path in {p for p in ann_index.values()}:
        with open(path, encoding="utf-8") as f:
            for line in f:
                if not line.strip():
                    continue
                rec = json.loads(line)
                if "_meta" in rec:
                    meta = rec["_meta"]
                    ids.add(f"{meta.get('model', 'unknown')}"
                            f" ({meta.get('schema_version', 'no schema version')})")
                break
    return sorted(ids)


def _read_chunk_store(path: Path):
    if not path.exists():
        raise StylokitError(f"chunk store {path} does not exist")
    return corpus.chunks_from_jsonl(path.read_text(encoding="utf-8"))


def cmd_profile(args) -> int:
    config = _load_config(args)
    lexicons = _lexicons_for(args, config)
    out_dir = Path(args.out)
    ann_index = _annotation_index(args.annotations or config.get("annotations"))
    annotation_source = "external" if ann_index else "builtin"
    meta = _metadata("profile", args, lexicons=list(lexicons.source_ids),
                     annotation_source=annotation_source)
    if ann_index:
        meta["annotation_pipeline"] = _annotation_pipeline_ids(ann_index)

    if args.generations:
        return _profile_generations(args, lexicons, ann_index, out_dir, meta)
    if not args.chunks:
        raise StylokitError("profile needs --chunks (author references) or --generations")

    chunks = [c for c in _read_chunk_store(Path(args.chunks)) if c.split == args.split]
    if not chunks:
        raise StylokitError(f"chunk store has no '{args.split}' chunks")
    docs = _annotated_book_docs(chunks, lexicons, ann_index)
    authors = sorted({d.author_id for d in docs})
    with _output_lock(out_dir):
        for author in authors:
            prof = features.author_reference_profile(author, docs, lexicons)
            rec = prof.to_json_dict()
            rec["metadata"] = dict(meta, split=args.split)
            _atomic_write_text(out_dir / "references" / f"{author}.json", _json_text(rec))
    print(f"wrote {len(authors)} reference profiles -> {out_dir / 'references'}")
    return 0


def _profile_generations(args, lexicons, ann_index, out_dir, meta) -> int:
    gen_path = Path(args.generations)
    if not gen_path.exists():
        raise StylokitError(f"generations file {gen_path} does not exist")
    units = []
    with open(gen_path, encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            rec = json.loads(line)
            if "_meta" in rec:
                continue
            units.append(rec)
    if not units:
        raise StylokitError(f"generations file {gen_path} is empty")

    unit_lines = []
    pooled_docs = {}
    skipped = 0
    for rec in units:
        unit_id = rec["unit_id"]
        author = rec["author_id"]
        method = rec.get("method", "generation")
        toks = list(corpus.tokenize(rec["text"]).tokens)
        if not toks:
            warnings.warn(f"generation {unit_id!r} is empty; skipped")
            skipped += 1
            continue
        doc = annotate.annotate_tokens(toks, lexicons, author_id=author, book_id=unit_id)
        prof = features.profile(doc, lexicons, label=unit_id)
        row = prof.to_json_dict()
        row.update(author_id=author, method=method)
        unit_lines.append(json.dumps(row, sort_keys=True, separators=(",", ":")))
        pooled_docs.setdefault((author, method), []).append(doc)
    if not unit_lines:
        raise StylokitError("every generation was empty")

    pooled_lines = []
    for (author, method) in sorted(pooled_docs):
        prof = features.pooled_profile(pooled_docs[(author, method)], lexicons,
                                       label=f"{author}/{method}")
        row = prof.to_json_dict()
        row.update(author_id=author, method=method)
        pooled_lines.append(json.dumps(row, sort_keys=True, separators=(",", ":")))

    header = json.dumps({"_meta": meta}, sort_keys=True)
    with _output_lock(out_dir):
        _atomic_write_text(out_dir / "generation_profiles.jsonl",
                           "\n".join([header] + unit_lines) + "\n")
        _atomic_write_text(out_dir / "pooled_profiles.jsonl",
                           "\n".join([header] + pooled_lines) + "\n")
    print(f"profiled {len(unit_lines)} generations "
          f"({skipped} skipped) -> {out_dir}")
    return 0


# ---------------------------------------------------------------------------
# evaluate

def _load_reference_profiles(path: Path, provenance: dict | None = None) -> dict:
    refs = {}
    candidates = sorted(path.glob("*.json")) if path.is_dir() else []
    if path.is_dir() and (path / "references").is_dir():
        candidates = sorted((path / "references").glob("*.json"))
    if not candidates:
        raise StylokitError(f"no reference profiles under {path}")
    for p in candidates:
        rec = json.loads(p.read_text(encoding="utf-8"))
        prof = features.StyleProfile.from_json_dict(rec)
        refs[prof.source_label] = prof
        if provenance is not None:
            for key in ("lexicons", "annotation_source", "annotation_pipeline", "seed"):
                if key in rec.get("metadata", {}):
                    provenance.setdefault(f"profile_{key}", rec["metadata"][key])
    return refs


def _load_generation_profiles(path: Path) -> dict:
    """Pooled profiles JSONL, or a directory of profile JSONs (method "self")."""
    gens = {}
    if path.is_dir():
        for author, prof in _load_reference_profiles(path).items():
            gens[(author, "self")] = prof
        return gens
    with open(path, encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            rec = json.loads(line)
            if "_meta" in rec:
                continue
            prof = features.StyleProfile.from_json_dict(rec)
            gens[(rec["author_id"], rec.get("method", "generation"))] = prof
    if not gens:
        raise StylokitError(f"no pooled generation profiles in {path}")
    return gens


def _split_unit_id(unit_id: str):
    parts = unit_id.split("/", 2)
    if len(parts) < 2:
        return None
    return parts[0], parts[1]


def _ppl_inputs(nll_path):
    """NLL dumps keyed "<author>/<method>/<unit>"; method "base" is the
    pre-trained model."""
    if not nll_path:
        return None, None
    groups = {}
    for dump in metrics.load_nll_dumps(nll_path):
        key = _split_unit_id(dump.unit_id)
        if key is None:
            raise StylokitError(
                f"NLL unit_id {dump.unit_id!r} is not '<author>/<method>/<unit>'")
        groups.setdefault(key, []).append(dump)
    ppl_values = {}
    base_values = {}
    for (author, method), dumps in sorted(groups.items()):
        pooled = [x for d in dumps for x in d.nlls]
        value = metrics.perplexity(metrics.NllDump(f"{author}/{method}", tuple(pooled)))
        if method == "base":
            base_values[author] = value
        else:
            ppl_values[(author, method)] = value
    return ppl_values, base_values


def _cosine_inputs(ref_path, gen_path):
    if not (ref_path and gen_path):
        return None
    refs = metrics.load_embeddings(ref_path)
    by_author = {}
    for rec in refs:
        by_author.setdefault(rec.label, []).append(rec)
    averages = {a: metrics.average_embedding(rs) for a, rs in sorted(by_author.items())}
    sums = {}
    counts = {}
    for rec in metrics.load_embeddings(gen_path):
        key = _split_unit_id(rec.label)
        if key is None:
            raise StylokitError(
                f"generation embedding label {rec.label!r} is not '<author>/<method>/<unit>'")
        author, method = key
        if author not in averages:
            raise StylokitError(f"no reference embeddings for author {author!r}")
        value = metrics.cosine(rec.vector, averages[author])
        sums[key] = sums.get(key, 0.0) + value
        counts[key] = counts.get(key, 0) + 1
    return {k: sums[k] / counts[k] for k in sums}


def _accuracy_inputs(pred_path):
    if not pred_path:
        return None
    groups = {}
    for rec in metrics.load_predictions(pred_path):
        key = _split_unit_id(rec["unit_id"])
        if key is None:
            raise StylokitError(
                f"prediction unit_id {rec['unit_id']!r} is not '<author>/<method>/<unit>'")
        groups.setdefault(key, []).append(rec)
    out = {}
    for key, recs in sorted(groups.items()):
        gold = [r["gold"] for r in recs]
        pred = [r["pred"] for r in recs]
        accuracy, _ = metrics.classification_stats(gold, pred)
        out[key] = accuracy
    return out


def _name_stats_inputs(path):
    if not path:
        return None
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    out = {}
    for rec in data if isinstance(data, list) else data.get("rows", []):
        out[(rec["author_id"], rec["method"])] = metrics.NameOverlapStats(
            pct_in_training=float(rec["pct_in_training"]),
            n_unique_names=int(rec["n_names"]))
    return out


def cmd_evaluate(args) -> int:
    out_dir = Path(args.out)
    provenance: dict = {}
    refs = _load_reference_profiles(Path(args.references), provenance)
    gens = _load_generation_profiles(Path(args.generations))
    ppl_values, base_values = _ppl_inputs(args.nll)
    report = metrics.alignment_report(
        gens, refs,
        ppl_values=ppl_values,
        base_ppl_values=base_values,
        cosine_values=_cosine_inputs(args.embeddings_ref, args.embeddings_gen),
        accuracy_values=_accuracy_inputs(args.predictions),
        name_stats=_name_stats_inputs(args.name_stats),
        metadata=_metadata("evaluate", args, references=str(args.references),
                           generations=str(args.generations), jsd_log_base=2,
                           **provenance),
    )
    with _output_lock(out_dir):
        _atomic_write_text(out_dir / "report.json", _json_text(report.to_json_dict()))
        _atomic_write_text(out_dir / "report.csv", render.report_to_csv(report))
        if args.svg:
            _atomic_write_text(out_dir / "report.svg", render.report_to_svg(report))
    print(f"evaluated {len(report.rows)} rows ({len(refs)} authors) -> {out_dir}")
    return 0


# ---------------------------------------------------------------------------
# mask

def cmd_mask(args) -> int:
    config = _load_config(args)
    lexicons = _lexicons_for(args, config)
    out_dir = Path(args.out)
    store = _read_chunk_store(Path(args.chunks))
    chunks = [c for c in store if c.split == args.split]
    if not chunks:
        raise StylokitError(f"chunk store has no '{args.split}' chunks")
    vocab = corpus.build_vocabulary(store)
    ann_index = _annotation_index(args.annotations or config.get("annotations"))

    by_book = {}
    for c in chunks:
        by_book.setdefault((c.author_id, c.book_id), []).append(c)

    lines = []
    total_tokens = 0
    masked_tokens = 0
    for key in sorted(by_book):
        author_id, book_id = key
        ordered = sorted(by_book[key], key=lambda c: c.index)
        toks = [t for c in ordered for t in c.tokens]
        if args.no_mask:
            flags = [False] * len(toks)
        else:
            sidecar = ann_index.get(key) or ann_index.get((None, book_id))
            if sidecar is not None:
                doc = annotate.load_external_annotations(sidecar, toks,
                                                         author_id=author_id,
                                                         book_id=book_id)
            else:
                doc = annotate.annotate_tokens(toks, lexicons, author_id=author_id,
                                               book_id=book_id)
            flags = [t.is_person for s in doc.sentences for t in s.tokens]
        pos = 0
        for c in ordered:
            n = len(c.tokens)
            ids = [vocab[t] for t in c.tokens]
            chunk_flags = flags[pos : pos + n]
            spans = _flags_to_spans(chunk_flags)
            example = adapters.mask_labels(ids, spans)
            rec = {"author_id": c.author_id, "book_id": c.book_id, "index": c.index,
                   "input_ids": list(example.input_ids),
                   "attention_mask": list(example.attention_mask),
                   "labels": list(example.labels)}
            lines.append(json.dumps(rec, sort_keys=True, separators=(",", ":")))
            total_tokens += n
            masked_tokens += sum(chunk_flags)
            pos += n

    meta = _metadata("mask", args, chunks=str(args.chunks), split=args.split,
                     lexicons=list(lexicons.source_ids), masked=not args.no_mask,
                     masked_tokens=masked_tokens, total_tokens=total_tokens)
    with _output_lock(out_dir):
        _atomic_write_text(out_dir / "masked.jsonl",
                           "\n".join([json.dumps({"_meta": meta}, sort_keys=True)] + lines)
                           + "\n")
        _atomic_write_text(out_dir / "vocab.json",
                           _json_text({"metadata": meta, "tokens": vocab}))
    pct = 100.0 * masked_tokens / total_tokens if total_tokens else 0.0
    print(f"masked {masked_tokens}/{total_tokens} ({pct:.2f}%)")
    return 0


def _flags_to_spans(flags):
    spans = []
    start = None
    for i, flag in enumerate(flags):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            spans.append((start, i))
            start = None
    if start is not None:
        spans.append((start, len(flags)))
    return spans


# ---------------------------------------------------------------------------
# merge

def _adapter_paths(path: Path):
    if path.is_dir():
        tensor_path = path / "adapter_model.safetensors"
        config_path = path / "adapter_config.json"
    else:
        tensor_path = path
        sibling = path.parent / "adapter_config.json"
        stem_config = path.with_suffix(".config.json")
        config_path = stem_config if stem_config.exists() else sibling
    if not tensor_path.exists():
        raise StylokitError(f"adapter weights {tensor_path} do not exist")
    if not config_path.exists():
        raise StylokitError(f"adapter config {config_path} does not exist")
    return tensor_path, config_path


def cmd_merge(args) -> int:
    out_dir = Path(args.out)
    ratios = [float(x) for x in args.ratios.split(",")] if args.ratios else [1.0] * len(args.adapters)
    if len(ratios) != len(args.adapters):
        raise StylokitError(f"{len(args.adapters)} adapters but {len(ratios)} ratios")
    operands = []
    operand_meta = []
    for path_str, ratio in zip(args.adapters, ratios):
        tensor_path, config_path = _adapter_paths(Path(path_str))
        config = json.loads(config_path.read_text(encoding="utf-8"))
        adapter = adapters.load_adapter(read_safetensors(tensor_path.read_bytes()), config)
        operands.append((adapter, ratio))
        operand_meta.append({"path": str(path_str), "ratio": ratio,
                             "r": adapter.rank, "lora_alpha": adapter.alpha})
    spec = adapters.MergeSpec(operands=tuple(operands))
    merged = adapters.merge(spec)
    residual = adapters.merge_residual(spec, merged)

    merged_config = {"r": merged.rank, "lora_alpha": merged.alpha,
                     "base_model_tag": merged.base_model_tag,
                     "target_modules": sorted(merged.targets())}
    meta = _metadata("merge", args, operands=operand_meta,
                     ratios=":".join(f"{r:g}" for r in ratios),
                     merged_rank=merged.rank, merged_alpha=merged.alpha,
                     max_delta_residual=residual, dtype=merged.dtype)
    tensor_meta = {"tool": f"stylokit {__version__}",
                   "ratios": meta["ratios"],
                   "rank": str(merged.rank), "alpha": f"{merged.alpha:g}",
                   "seed": str(args.seed)}
    with _output_lock(out_dir):
        _atomic_write_bytes(out_dir / "adapter_model.safetensors",
                            write_safetensors(adapters.adapter_to_tensorfile(
                                merged, prefix="merged", metadata=tensor_meta)))
        _atomic_write_text(out_dir / "adapter_config.json", _json_text(merged_config))
        _atomic_write_text(out_dir / "merge_metadata.json", _json_text(meta))
    print(f"merged {len(operands)} adapters (rank {merged.rank}); "
          f"self-check max residual: {residual:.3e}")
    return 0


# ---------------------------------------------------------------------------
# report

def cmd_report(args) -> int:
    out_dir = Path(args.out)
    rec = json.loads(Path(args.report).read_text(encoding="utf-8"))
    report = metrics.AlignmentReport.from_json_dict(rec)
    with _output_lock(out_dir):
        _atomic_write_text(out_dir / "report.csv", render.report_to_csv(report))
        if args.svg:
            _atomic_write_text(out_dir / "report.svg", render.report_to_svg(report))
    print(f"rendered report ({len(report.rows)} rows) -> {out_dir}")
    return 0


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stylokit",
                                     description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"stylokit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--config", help="JSON config file mirroring the run options")
    common.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("ingest", parents=[common],
                       help="tokenize books, assign splits, write the chunk store")
    p.add_argument("--corpus", help="corpus root laid out <root>/<author>/<book>.txt")
    p.add_argument("--chunk-size", type=int, default=None)
    p.add_argument("--tokenizer", choices=["whitespace_punct", "external"], default=None)
    p.add_argument("--pretokenized", help="pre-tokenized sidecar JSONL")
    p.add_argument("--keep-boilerplate", action="store_true")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("profile", parents=[common],
                       help="compute style profiles for authors or generations")
    p.add_argument("--chunks", help="chunk store JSONL (author-reference mode)")
    p.add_argument("--split", default="test")
    p.add_argument("--generations", help="generations JSONL (generation mode)")
    p.add_argument("--lexicons", help="lexicon directory (default: packaged)")
    p.add_argument("--annotations", help="external annotation sidecar file or directory")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("evaluate", parents=[common],
                       help="compare generation profiles against references")
    p.add_argument("--references", required=True)
    p.add_argument("--generations", required=True)
    p.add_argument("--nll", help="NLL dump JSONL for perplexity columns")
    p.add_argument("--embeddings-ref", help="reference embeddings JSONL")
    p.add_argument("--embeddings-gen", help="generation embeddings JSONL")
    p.add_argument("--predictions", help="classifier predictions JSONL")
    p.add_argument("--name-stats", help="name-overlap stats JSON")
    p.add_argument("--svg", action="store_true", help="also render bar charts")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("mask", parents=[common],
                       help="emit masked-label training examples from the chunk store")
    p.add_argument("--chunks", required=True)
    p.add_argument("--split", default="train")
    p.add_argument("--lexicons")
    p.add_argument("--annotations")
    p.add_argument("--no-mask", action="store_true",
                   help="labels equal input ids everywhere")
    p.set_defaults(func=cmd_mask)

    p = sub.add_parser("merge", parents=[common],
                       help="merge adapters by block concatenation")
    p.add_argument("adapters", nargs="+", help="adapter dirs or safetensors files")
    p.add_argument("--ratios", help="comma-separated per-operand ratios, e.g. 0.9,1")
    p.set_defaults(func=cmd_merge)

    p = sub.add_parser("report", parents=[common],
                       help="render an existing report JSON to CSV/SVG")
    p.add_argument("--report", required=True)
    p.add_argument("--svg", action="store_true")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except StylokitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc!r}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - internal failure path
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
