"""Numeric comparisons and report assembly: MSE, base-2 JSD, cosine,
perplexity over ingested NLL dumps, classification stats, name overlap.

Ingested sidecar formats (JSONL, optional leading {"_meta": ...} record):
  embeddings    {"label", "vector": [...]}
  predictions   {"unit_id", "gold", "pred"}
  NLL dumps     {"unit_id", "log_base": "e"|"2", "nlls": [...]}
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyInput,
    InvalidDistribution,
    InvalidInput,
    LengthMismatch,
    UnknownAuthor,
    ZeroVector,
)
from .features import StyleProfile

DISTRIBUTION_TOLERANCE = 1e-6


@dataclass(frozen=True)
class EmbeddingRecord:
    label: str
    vector: tuple[float, ...]


@dataclass(frozen=True)
class NllDump:
    unit_id: str
    nlls: tuple[float, ...]  # natural log


@dataclass(frozen=True)
class NameOverlapStats:
    pct_in_training: float
    n_unique_names: int


def mse(a: Sequence[float], b: Sequence[float]) -> float:
    """Mean of squared componentwise differences."""
    if len(a) != len(b):
        raise DimensionMismatch(f"length {len(a)} vs {len(b)}")
    if len(a) == 0:
        raise EmptyInput("mse of empty vectors")
    return sum((x - y) ** 2 for x, y in zip(a, b)) / len(a)


def _check_distribution(p: Sequence[float], name: str) -> list[float]:
    if any(x < 0 for x in p):
        raise InvalidDistribution(f"{name} has a negative component")
    total = sum(p)
    if abs(total - 1.0) > DISTRIBUTION_TOLERANCE:
        raise InvalidDistribution(f"{name} sums to {total}, not 1")
    return [x / total for x in p]


def jsd(p: Sequence[float], q: Sequence[float]) -> float:
    """Jensen-Shannon divergence with base-2 logarithms, in [0, 1].

    Inputs within 1e-6 of unit mass are renormalized; 0*log(0) is 0.
    """
    if len(p) != len(q):
        raise DimensionMismatch(f"length {len(p)} vs {len(q)}")
    pn = _check_distribution(p, "p")
    qn = _check_distribution(q, "q")
    # separate accumulators keep jsd(p,q) bitwise equal to jsd(q,p)
    kl_p = 0.0
    kl_q = 0.0
    for x, y in zip(pn, qn):
        m = 0.5 * (x + y)
        if x > 0:
            kl_p += x * math.log2(x / m)
        if y > 0:
            kl_q += y * math.log2(y / m)
    div = 0.5 * (kl_p + kl_q)
    # clamp float noise at the boundaries
    return min(max(div, 0.0), 1.0)


def cosine(u: Sequence[float], v: Sequence[float]) -> float:
    """Cosine similarity dot(u,v) / (|u|*|v|)."""
    if len(u) != len(v):
        raise DimensionMismatch(f"length {len(u)} vs {len(v)}")
    nu = math.sqrt(sum(x * x for x in u))
    nv = math.sqrt(sum(y * y for y in v))
    if nu == 0.0 or nv == 0.0:
        raise ZeroVector("cosine of a zero vector")
    return sum(x * y for x, y in zip(u, v)) / (nu * nv)


def average_embedding(records: Sequence[EmbeddingRecord]) -> tuple[float, ...]:
    """Componentwise arithmetic mean of the records' vectors."""
    if not records:
        raise EmptyInput("no embedding records")
    dim = len(records[0].vector)
    for rec in records:
        if len(rec.vector) != dim:
            raise DimensionMismatch(f"vector for {rec.label!r} has dimension "
                                    f"{len(rec.vector)}, expected {dim}")
    mean = np.mean([rec.vector for rec in records], axis=0)
    return tuple(float(x) for x in mean)


def perplexity(dump: NllDump) -> float:
    """exp of the mean per-token negative log-likelihood."""
    if not dump.nlls:
        raise EmptyInput(f"NLL dump {dump.unit_id!r} is empty")
    return math.exp(sum(dump.nlls) / len(dump.nlls))


def ppl_reduction(pre_ppl: float, post_ppl: float) -> float:
    """Percentage reduction 100*(pre - post)/pre."""
    if pre_ppl <= 0:
        raise InvalidInput(f"pre-finetuning perplexity must be positive, got {pre_ppl}")
    return 100.0 * (pre_ppl - post_ppl) / pre_ppl


def classification_stats(gold: Sequence[str], predicted: Sequence[str],
                         labels: Sequence[str] | None = None):
    """Accuracy and a confusion matrix row-indexed by gold label."""
    if len(gold) != len(predicted) or len(gold) == 0:
        raise LengthMismatch(f"{len(gold)} gold vs {len(predicted)} predicted labels")
    if labels is None:
        labels = sorted(set(gold) | set(predicted))
    index = {lab: i for i, lab in enumerate(labels)}
    for lab in list(gold) + list(predicted):
        if lab not in index:
            raise UnknownAuthor(f"label {lab!r} not in the author set")
    n = len(labels)
    confusion = np.zeros((n, n), dtype=int)
    correct = 0
    for g, p in zip(gold, predicted):
        confusion[index[g], index[p]] += 1
        correct += g == p
    return correct / len(gold), confusion


def name_overlap(generated_names: Iterable[str], training_names: Iterable[str]) -> NameOverlapStats:
    """Share of unique generated person names that occur in the training set."""
    unique = {n.casefold() for n in generated_names}
    training = {n.casefold() for n in training_names}
    if not unique:
        return NameOverlapStats(pct_in_training=0.0, n_unique_names=0)
    return NameOverlapStats(pct_in_training=len(unique & training) / len(unique),
                            n_unique_names=len(unique))


def names_from_annotated(docs) -> set[str]:
    """Unique person-name surface forms (case-folded) in annotated documents."""
    return {t.text.casefold() for d in docs for s in d.sentences for t in s.tokens
            if t.is_person}


# ---------------------------------------------------------------------------
# report assembly

REPORT_COLUMNS = ("author", "method", "pct_in_training", "n_names", "ppl",
                  "ppl_reduction", "cosine", "accuracy", "lexical_mse",
                  "syntactic_jsd", "surface_mse")

AVERAGE_LABEL = "average"


@dataclass
class ReportRow:
    author_id: str
    method: str
    lexical_mse: float | None = None
    syntactic_jsd: float | None = None
    surface_mse: float | None = None
    ppl: float | None = None
    ppl_reduction: float | None = None
    cosine: float | None = None
    accuracy: float | None = None
    pct_in_training: float | None = None
    n_names: int | None = None

    def cell(self, column: str):
        return {"author": self.author_id, "method": self.method,
                "pct_in_training": self.pct_in_training, "n_names": self.n_names,
                "ppl": self.ppl, "ppl_reduction": self.ppl_reduction,
                "cosine": self.cosine, "accuracy": self.accuracy,
                "lexical_mse": self.lexical_mse, "syntactic_jsd": self.syntactic_jsd,
                "surface_mse": self.surface_mse}[column]


@dataclass
class AlignmentReport:
    rows: list[ReportRow]
    averages: list[ReportRow]
    metadata: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        def row_dict(r: ReportRow) -> dict:
            return {c: r.cell(c) for c in REPORT_COLUMNS}
        return {"metadata": self.metadata,
                "rows": [row_dict(r) for r in self.rows],
                "averages": [row_dict(r) for r in self.averages]}

    @classmethod
    def from_json_dict(cls, rec: dict) -> "AlignmentReport":
        def parse(r: dict) -> ReportRow:
            return ReportRow(author_id=r["author"], method=r["method"],
                             pct_in_training=r.get("pct_in_training"),
                             n_names=r.get("n_names"), ppl=r.get("ppl"),
                             ppl_reduction=r.get("ppl_reduction"),
                             cosine=r.get("cosine"), accuracy=r.get("accuracy"),
                             lexical_mse=r.get("lexical_mse"),
                             syntactic_jsd=r.get("syntactic_jsd"),
                             surface_mse=r.get("surface_mse"))
        return cls(rows=[parse(r) for r in rec.get("rows", [])],
                   averages=[parse(r) for r in rec.get("averages", [])],
                   metadata=rec.get("metadata", {}))


def alignment_report(generation_profiles: Mapping[tuple[str, str], StyleProfile],
                     reference_profiles: Mapping[str, StyleProfile],
                     *,
                     ppl_values: Mapping[tuple[str, str], float] | None = None,
                     base_ppl_values: Mapping[str, float] | None = None,
                     cosine_values: Mapping[tuple[str, str], float] | None = None,
                     accuracy_values: Mapping[tuple[str, str], float] | None = None,
                     name_stats: Mapping[tuple[str, str], NameOverlapStats] | None = None,
                     metadata: dict | None = None) -> AlignmentReport:
    """Assemble per-(author, method) rows plus per-method macro-average rows.

    Linguistic columns compare each generation profile against its author's
    reference profile; optional columns are filled where inputs are given.
    Averages are unweighted means over authors, per method, over present
    values only.
    """
    rows: list[ReportRow] = []
    for (author, method) in sorted(generation_profiles):
        gen = generation_profiles[(author, method)]
        if author not in reference_profiles:
            raise UnknownAuthor(f"no reference profile for author {author!r}")
        ref = reference_profiles[author]
        row = ReportRow(
            author_id=author, method=method,
            lexical_mse=mse(gen.lexical.as_tuple(), ref.lexical.as_tuple()),
            syntactic_jsd=jsd(gen.syntactic.as_tuple(), ref.syntactic.as_tuple()),
            surface_mse=mse(gen.surface.as_tuple(), ref.surface.as_tuple()),
        )
        if ppl_values and (author, method) in ppl_values:
            row.ppl = ppl_values[(author, method)]
            if base_ppl_values and author in base_ppl_values:
                row.ppl_reduction = ppl_reduction(base_ppl_values[author], row.ppl)
        if cosine_values and (author, method) in cosine_values:
            row.cosine = cosine_values[(author, method)]
        if accuracy_values and (author, method) in accuracy_values:
            row.accuracy = accuracy_values[(author, method)]
        if name_stats and (author, method) in name_stats:
            stats = name_stats[(author, method)]
            row.pct_in_training = stats.pct_in_training
            row.n_names = stats.n_unique_names
        rows.append(row)

    averages: list[ReportRow] = []
    for method in sorted({r.method for r in rows}):
        group = [r for r in rows if r.method == method]
        avg = ReportRow(author_id=AVERAGE_LABEL, method=method)
        for column in ("pct_in_training", "ppl", "ppl_reduction", "cosine", "accuracy",
                       "lexical_mse", "syntactic_jsd", "surface_mse"):
            values = [r.cell(column) for r in group if r.cell(column) is not None]
            if values:
                setattr(avg, column, sum(values) / len(values))
        n_values = [r.n_names for r in group if r.n_names is not None]
        if n_values:
            avg.n_names = sum(n_values) / len(n_values)
        averages.append(avg)
    return AlignmentReport(rows=rows, averages=averages, metadata=metadata or {})


# ---------------------------------------------------------------------------
# sidecar loaders

def _iter_jsonl(path):
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


def load_embeddings(path) -> list[EmbeddingRecord]:
    _, records = _iter_jsonl(path)
    out = [EmbeddingRecord(label=r["label"], vector=tuple(float(x) for x in r["vector"]))
           for r in records]
    if out:
        dim = len(out[0].vector)
        for rec in out:
            if len(rec.vector) != dim:
                raise DimensionMismatch(f"vector for {rec.label!r} has dimension "
                                        f"{len(rec.vector)}, expected {dim}")
            if any(not math.isfinite(x) for x in rec.vector):
                raise InvalidInput(f"non-finite embedding component for {rec.label!r}")
    return out


def load_nll_dumps(path) -> list[NllDump]:
    """Load NLL dumps, converting base-2 records to natural log."""
    _, records = _iter_jsonl(path)
    out = []
    for r in records:
        nlls = [float(x) for x in r["nlls"]]
        base = r.get("log_base", "e")
        if base == "2":
            nlls = [x * math.log(2.0) for x in nlls]
        elif base != "e":
            raise InvalidInput(f"unknown log_base {base!r} in {path}")
        if any(not math.isfinite(x) or x < 0 for x in nlls):
            raise InvalidInput(f"NLLs for {r['unit_id']!r} must be finite and >= 0")
        out.append(NllDump(unit_id=r["unit_id"], nlls=tuple(nlls)))
    return out


def load_predictions(path) -> list[dict]:
    _, records = _iter_jsonl(path)
    for r in records:
        for key in ("unit_id", "gold", "pred"):
            if key not in r:
                raise InvalidInput(f"prediction record missing {key!r}")
    return records
