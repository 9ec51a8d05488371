"""Acceptance suite: one test per criterion, each printing a pass line.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines.
"""

import json
import math
import struct
import time
from pathlib import Path

import numpy as np
import pytest

from stylokit import adapters, annotate, cli, corpus, features, metrics, render
from stylokit import safetensors_io as stio

import conftest
from conftest import AUTHOR_IDS, FIXTURES, write_corpus_tree
from test_adapters import delta_sum_oracle, make_adapter
from test_safetensors import fixtures as safetensor_fixtures, minimal_fixture_bytes

LEXICONS = str(FIXTURES / "lexicons")


def run_cli(argv):
    return cli.main([str(a) for a in argv])


def bytes_map(directory: Path) -> dict:
    return {p.relative_to(directory): p.read_bytes()
            for p in sorted(directory.rglob("*")) if p.is_file()}


def test_criterion_merge_sum_identity():
    """100 randomized merges match the brute-force weighted delta sum < 1e-6."""
    rng = np.random.default_rng(2024)
    ratio_set = (0.0, 0.8, 0.9, 1.0)
    start = time.monotonic()
    worst = 0.0
    for _ in range(100):
        d, k = int(rng.integers(1, 17)), int(rng.integers(1, 17))
        targets = [f"t{i}" for i in range(rng.integers(1, 4))]
        ops = []
        for _ in range(int(rng.integers(2, 4))):
            r = int(rng.integers(1, 5))
            alpha = float(rng.integers(1, 2 * r + 1))
            ops.append(make_adapter(rng, targets, r=r, d=d, k=k, alpha=alpha))
        ratios = [float(rng.choice(ratio_set)) for _ in ops]
        if all(x == 0 for x in ratios):
            ratios[-1] = 1.0
        spec = adapters.MergeSpec(operands=tuple(zip(ops, ratios)))
        merged = adapters.merge(spec)
        for t in targets:
            residual = float(np.max(np.abs(
                adapters.effective_delta(merged, t) - delta_sum_oracle(spec.operands, t))))
            worst = max(worst, residual)
    elapsed = time.monotonic() - start
    assert worst < 1e-6
    assert elapsed < 5.0
    print(f"[PASS] merge-sum identity: max residual {worst:.2e} over 100 specs "
          f"in {elapsed:.2f}s")


def test_criterion_safetensors_round_trip():
    """read-write structural identity and write-read-write byte identity."""
    all_fixtures = safetensor_fixtures()
    assert len(all_fixtures) >= 10
    dtypes = set()
    for tf in all_fixtures:
        dtypes.update(e.dtype for e in tf.tensors.values())
        blob = stio.write_safetensors(tf)
        back = stio.read_safetensors(blob)
        assert stio.structurally_equal(back, tf)
        assert stio.write_safetensors(back) == blob
    assert {"F32", "F16", "BF16"} <= dtypes
    minimal = stio.read_safetensors(minimal_fixture_bytes())
    assert list(minimal.tensors) == ["t"]
    assert minimal.tensors["t"].shape == (2, 2)
    assert stio.write_safetensors(minimal) == minimal_fixture_bytes()
    print(f"[PASS] safetensors round-trip: {len(all_fixtures)} fixtures, "
          f"dtypes {sorted(dtypes)}, minimal 2x2 fixture byte-exact")


def test_criterion_masking_contract(tmp_path):
    """1k-chunk corpus with injected person spans masks exactly and only them."""
    chunk_size = 256
    n_books, chunks_per_book = 10, 100
    vocab_tokens = [f"w{i}" for i in range(10)]
    injected_per_chunk = 3
    store_lines = []
    ann_lines = []
    injected_positions = {}
    for b in range(n_books):
        book = f"book{b}"
        stream = []
        flags = []
        for ci in range(chunks_per_book):
            toks = [vocab_tokens[(ci + j) % 10] for j in range(chunk_size)]
            start = (7 * ci) % (chunk_size - injected_per_chunk)
            span = set(range(start, start + injected_per_chunk))
            injected_positions[("AU0", book, ci)] = span
            store_lines.append(json.dumps(
                {"author_id": "AU0", "book_id": book, "split": "train",
                 "index": ci, "tokens": toks}))
            stream.extend(toks)
            flags.extend(j in span for j in range(chunk_size))
        ann_lines.append(json.dumps({
            "book_id": book, "sent_index": 0,
            "tokens": [{"t": t, "pos": "PROPN" if f else "OTHER", "person": bool(f)}
                       for t, f in zip(stream, flags)]}))
    chunk_path = tmp_path / "chunks.jsonl"
    chunk_path.write_text("\n".join(store_lines) + "\n")
    ann_path = tmp_path / "annotations.jsonl"
    ann_path.write_text("\n".join(ann_lines) + "\n")

    out = tmp_path / "masked"
    assert run_cli(["mask", "--chunks", chunk_path, "--out", out,
                    "--annotations", ann_path]) == 0
    meta_line, *lines = (out / "masked.jsonl").read_text().splitlines()
    meta = json.loads(meta_line)["_meta"]
    total_chunks = n_books * chunks_per_book
    assert len(lines) == total_chunks == 1000
    expected_masked = injected_per_chunk * total_chunks
    assert meta["masked_tokens"] == expected_masked
    assert meta["total_tokens"] == chunk_size * total_chunks
    # summary fraction equals the injected fraction exactly
    assert (meta["masked_tokens"] / meta["total_tokens"]
            == expected_masked / (chunk_size * total_chunks))
    vocab = json.loads((out / "vocab.json").read_text())["tokens"]
    for line in lines:
        rec = json.loads(line)
        span = injected_positions[(rec["author_id"], rec["book_id"], rec["index"])]
        assert rec["attention_mask"] == [1] * chunk_size
        for j, (tid, lab) in enumerate(zip(rec["input_ids"], rec["labels"])):
            if j in span:
                assert lab == -100
            else:
                assert lab == tid
        assert all(tid == vocab[tok] for tid, tok in
                   zip(rec["input_ids"], [vocab_tokens[(rec["index"] + j) % 10]
                                          for j in range(chunk_size)]))
    print(f"[PASS] masking contract: {expected_masked}/{chunk_size * total_chunks} "
          f"tokens masked across {total_chunks} chunks, labels and attention exact")


def test_criterion_metric_properties():
    """JSD/MSE/cosine/perplexity identities over 1000 random draws."""
    rng = np.random.default_rng(99)
    for _ in range(1000):
        raw_p = rng.random(5) + 1e-12
        raw_q = rng.random(5) + 1e-12
        p = tuple(raw_p / raw_p.sum())
        q = tuple(raw_q / raw_q.sum())
        d = metrics.jsd(p, q)
        assert d == metrics.jsd(q, p)
        assert 0 <= d <= 1
        assert metrics.jsd(p, p) < 1e-12
        r_raw = rng.random(5) + 1e-12
        r = tuple(r_raw / r_raw.sum())
        assert math.sqrt(metrics.jsd(p, r)) <= (math.sqrt(metrics.jsd(p, q))
                                                + math.sqrt(metrics.jsd(q, r)) + 1e-12)
        u = tuple(rng.normal(size=4))
        v = tuple(rng.normal(size=4))
        assert metrics.mse(u, u) == 0
        assert metrics.mse(u, v) >= 0
        c = metrics.cosine(u, v)
        assert -1 - 1e-12 <= c <= 1 + 1e-12
        assert abs(metrics.cosine(u, tuple(2.5 * x for x in u)) - 1) < 1e-9
        nlls = tuple(float(x) for x in rng.random(9))
        perm = list(nlls)
        rng.shuffle(perm)
        assert abs(metrics.perplexity(metrics.NllDump("u", nlls))
                   - metrics.perplexity(metrics.NllDump("u", tuple(perm)))) < 1e-12
    assert metrics.jsd((1, 0), (0, 1)) == 1
    assert metrics.perplexity(metrics.NllDump("u", (math.log(2), math.log(2)))) == 2
    print("[PASS] metric properties: JSD symmetric/bounded/zero-iff-equal, "
          "sqrt-JSD triangle, MSE/cosine/perplexity identities, PPL(ln2,ln2)=2")


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    """Shared ingest -> profile artifacts over the 10-author fixture corpus."""
    base = tmp_path_factory.mktemp("pipeline")
    root = write_corpus_tree(base / "corpus")
    ingested = base / "ingested"
    assert run_cli(["ingest", "--corpus", root, "--out", ingested, "--seed", 1]) == 0
    profiles = base / "profiles"
    assert run_cli(["profile", "--chunks", ingested / "chunks.jsonl",
                    "--out", profiles, "--lexicons", LEXICONS]) == 0
    return {"base": base, "root": root, "ingested": ingested,
            "references": profiles / "references"}


def test_criterion_self_alignment_zero(pipeline, tmp_path):
    """evaluate with generations := references zeroes all linguistic columns."""
    out = tmp_path / "report"
    assert run_cli(["evaluate", "--references", pipeline["references"],
                    "--generations", pipeline["references"], "--out", out]) == 0
    report = json.loads((out / "report.json").read_text())
    assert len(report["rows"]) == 10
    assert sorted(r["author"] for r in report["rows"]) == AUTHOR_IDS
    for row in report["rows"]:
        assert row["lexical_mse"] == 0
        assert row["syntactic_jsd"] == 0
        assert row["surface_mse"] == 0
    print("[PASS] self-alignment zero: lexical MSE = syntactic JSD = surface MSE = 0 "
          "for all 10 authors")


def test_criterion_feature_golden_vectors(fixture_lexicons, golden_text):
    """Committed 10-sentence fixture reproduces hand-derived vectors at 1e-9."""
    tokens = list(corpus.tokenize(golden_text).tokens)
    doc = annotate.annotate_tokens(tokens, fixture_lexicons)
    assert len(doc.sentences) == 10
    golden = {
        "lexical": (0.9, 1.7, 0.4, 5.9, 0.135, 0.8),
        "syntactic": (0.4, 0.2, 0.2, 0.1, 0.1),
        "surface": (0.3, 0.1, 0.0, 6.4, 219 / 64),
    }
    prof = features.profile(doc, fixture_lexicons, "golden")
    for name, expected in golden.items():
        got = getattr(prof, name).as_tuple()
        for g, e in zip(got, expected):
            assert abs(g - e) <= 1e-9, (name, got, expected)
    # the hand-counted surface example on its own sentence
    single = annotate.annotate_tokens(
        list(corpus.tokenize("I came, I saw; I left.").tokens), fixture_lexicons)
    for g, e in zip(features.surface_vector(single).as_tuple(), (1, 1, 0, 6, 14 / 6)):
        assert abs(g - e) <= 1e-9
    # the five classification cases
    cases = {"I left.": "SIMPLE",
             "I came and she left.": "COMPOUND",
             "Because it rained, I stayed.": "COMPLEX",
             "Although it rained, I left and she stayed.": "COMPLEX-COMPOUND",
             "On the hill.": "OTHER"}
    for text, expected in cases.items():
        sent = annotate.annotate_tokens(
            list(corpus.tokenize(text).tokens), fixture_lexicons).sentences[0]
        assert features.classify_sentence(sent) == expected
    print("[PASS] feature golden vectors: lexical/syntactic/surface at 1e-9, "
          "surface example (1,1,0,6,2.3333), five classification cases")


def test_criterion_corpus_invariants():
    """Book-disjoint splits over 100 seeds; 256-token chunks; ceil subsampling."""
    docs = [corpus.Document(author_id=f"AU{a}", book_id=f"b{b}", text="x")
            for a in range(4) for b in range(3 + a)]
    for seed in range(100):
        assignment = corpus.split_books(docs, seed=seed)
        for a in range(4):
            mapping = assignment[f"AU{a}"]
            assert sorted(mapping) == [f"b{b}" for b in range(3 + a)]  # partition
            assert set(mapping.values()) == {"train", "valid", "test"}

    stream = corpus.TokenStream(tokens=tuple(f"t{i}" for i in range(80000)),
                                byte_offsets=tuple((i, i + 1) for i in range(80000)))
    chunks = corpus.chunk(stream, 256)
    assert len(chunks) == 312
    assert all(len(c.tokens) == 256 for c in chunks)

    for fraction in (0.05, 0.35, 0.70, 1.0):
        expected = math.ceil(fraction * len(chunks))
        first = corpus.subsample(chunks, fraction, seed=5)
        assert len(first) == expected
        assert first == corpus.subsample(chunks, fraction, seed=5)
    assert len(corpus.subsample(chunks, 0.35, seed=5)) == 110
    print("[PASS] corpus invariants: disjoint splits x100 seeds, 312 chunks of 256 "
          "from 80k tokens, ceil-fraction subsampling deterministic")


def test_criterion_report_fixtures(tmp_path):
    """Published-table rendering fixture and recipe defaults, byte-exact."""
    report = metrics.AlignmentReport(
        rows=[metrics.ReportRow(author_id="PGW", method="w/o masking",
                                pct_in_training=0.50, n_names=68, ppl=9.68,
                                cosine=1.0, accuracy=1.0, lexical_mse=0.18,
                                syntactic_jsd=0.07, surface_mse=0.01)],
        averages=[metrics.ReportRow(author_id="average", method="tuned",
                                    accuracy=0.879)],
    )
    golden = (FIXTURES / "golden_report.csv").read_bytes()
    assert render.report_to_csv(report).encode("utf-8") == golden

    # the accuracy value reconstructs from constructed prediction counts
    labels = [f"AU{i}" for i in range(10)]
    gold = [labels[i % 10] for i in range(1000)]
    pred = list(gold)
    for i in range(121):
        pred[i] = labels[(i + 1) % 10]
    accuracy, _ = metrics.classification_stats(gold, pred, labels=labels)
    assert accuracy == 0.879

    recipe = adapters.emit_training_recipe("VW", {"train": "chunks.jsonl"})
    assert recipe["learning_rate"] == 5e-5
    assert recipe["num_epoch"] == 3
    assert recipe["per_gpu_batch_size"] == 4
    assert recipe["input_max_token_length"] == 256
    print("[PASS] report fixtures: CSV layout byte-exact for the published row, "
          "accuracy 0.879 from counts, recipe defaults verbatim")


def test_criterion_cli_determinism(pipeline, tmp_path):
    """Every command rerun with the same seed is byte-identical."""
    from test_cli import write_adapter

    ingested = pipeline["ingested"]
    refs = pipeline["references"]

    again = tmp_path / "ingest2"
    assert run_cli(["ingest", "--corpus", pipeline["root"], "--out", again,
                    "--seed", 1]) == 0
    assert bytes_map(again) == bytes_map(ingested)

    prof1, prof2 = tmp_path / "p1", tmp_path / "p2"
    for out in (prof1, prof2):
        assert run_cli(["profile", "--chunks", ingested / "chunks.jsonl",
                        "--out", out, "--lexicons", LEXICONS]) == 0
    assert bytes_map(prof1) == bytes_map(prof2)

    gen = tmp_path / "gen.jsonl"
    gen.write_text(json.dumps({"unit_id": "AU0/tuned/0", "author_id": "AU0",
                               "method": "tuned",
                               "text": "The fox stayed on the hill."}) + "\n")
    gp1, gp2 = tmp_path / "gp1", tmp_path / "gp2"
    for out in (gp1, gp2):
        assert run_cli(["profile", "--generations", gen, "--out", out,
                        "--lexicons", LEXICONS]) == 0
    assert bytes_map(gp1) == bytes_map(gp2)

    m1, m2 = tmp_path / "m1", tmp_path / "m2"
    for out in (m1, m2):
        assert run_cli(["mask", "--chunks", ingested / "chunks.jsonl", "--out", out,
                        "--lexicons", LEXICONS]) == 0
    assert bytes_map(m1) == bytes_map(m2)

    a = write_adapter(tmp_path / "ada", seed=21)
    b = write_adapter(tmp_path / "adb", seed=22, r=3)
    g1, g2 = tmp_path / "g1", tmp_path / "g2"
    for out in (g1, g2):
        assert run_cli(["merge", a, b, "--ratios", "0.9,1", "--out", out]) == 0
    assert bytes_map(g1) == bytes_map(g2)

    e1, e2 = tmp_path / "e1", tmp_path / "e2"
    for out in (e1, e2):
        assert run_cli(["evaluate", "--references", refs, "--generations", refs,
                        "--out", out, "--svg"]) == 0
    assert bytes_map(e1) == bytes_map(e2)

    r1, r2 = tmp_path / "r1", tmp_path / "r2"
    for out in (r1, r2):
        assert run_cli(["report", "--report", e1 / "report.json", "--out", out,
                        "--svg"]) == 0
    assert bytes_map(r1) == bytes_map(r2)
    print("[PASS] determinism: ingest/profile/mask/merge/evaluate/report reruns "
          "byte-identical")


def test_criterion_suite_runtime_budget():
    elapsed = time.monotonic() - conftest.SESSION_START
    assert elapsed < 60.0
    print(f"[PASS] runtime: {elapsed:.1f}s elapsed since session start (< 60s)")
