"""Grouped-corpus benchmarks and the embedding variation matrix.

A benchmark turns a corpus of grouped source documents (reviews of a
location, questions of a forum) into longer documents by concatenating
``k`` randomly chosen sources from one group, then labels every document
pair 1 when both come from the same group. Each embedding variation is
scored by the ROC AUC of pairwise cosine similarity against those labels.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .common_component import first_principal_component, remove_common_component
from .corpus import (
    DEFAULT_TOKENIZER,
    CorpusStats,
    TokenizerConfig,
    build_corpus_stats,
    doc_term_stats,
    tokenize,
)
from .embedder import EmbeddingForm, build_corpus_center, embed_batch
from .evaluation import EvalPair, all_pairs, roc_auc, sample_pairs, score_pairs
from .vectors import VectorStore
from .weighting import WeightScheme

FORM_ORDER = ("sum", "center", "delta")
SCHEME_ORDER = ("idf", "sif", "subsample")


class InsufficientDocumentsError(ValueError):
    def __init__(self, group, have, need):
        self.group = group
        super().__init__(f"group {group!r} has {have} source documents, needs {need}")


@dataclass
class GroupedCorpus:
    groups: dict[str, list[tuple[str, str]]]
    provenance: str = ""

    def __post_init__(self):
        seen = set()
        for gid, docs in self.groups.items():
            if not docs:
                raise ValueError(f"group {gid!r} is empty")
            for doc_id, _ in docs:
                if doc_id in seen:
                    raise ValueError(f"duplicate document id {doc_id!r}")
                seen.add(doc_id)

    @property
    def group_ids(self) -> list[str]:
        return sorted(self.groups)

    def texts(self) -> Iterable[str]:
        for gid in self.group_ids:
            for _, text in self.groups[gid]:
                yield text


def load_grouped_corpus(path) -> GroupedCorpus:
    """Read ``<group_id>/<doc_id>.txt`` directories or a ``group_id<TAB>doc_id<TAB>text`` TSV."""
    path = Path(path)
    groups: dict[str, list[tuple[str, str]]] = {}
    if path.is_dir():
        for gdir in sorted(p for p in path.iterdir() if p.is_dir()):
            docs = [(f.stem, f.read_text(encoding="utf-8")) for f in sorted(gdir.glob("*.txt"))]
            if docs:
                groups[gdir.name] = docs
    else:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n").rstrip("\r")
                if not line:
                    continue
                parts = line.split("\t", 2)
                if len(parts) != 3:
                    raise ValueError(f"{path}:{lineno}: expected group_id<TAB>doc_id<TAB>text")
                groups.setdefault(parts[0], []).append((parts[1], parts[2]))
    if not groups:
        raise ValueError(f"{path}: no documents found")
    return GroupedCorpus(groups, provenance=str(path))


@dataclass(frozen=True)
class BenchmarkSpec:
    k: int
    docs_per_group: int
    seed: int = 0
    pair_budget: int | None = None

    def __post_init__(self):
        if self.k < 1 or self.docs_per_group < 1:
            raise ValueError("k and docs_per_group must be positive")
        if self.pair_budget is not None and self.pair_budget < 1:
            raise ValueError("pair_budget must be positive")


@dataclass(frozen=True)
class BenchDocument:
    doc_id: str
    group: str
    text: str
    sources: tuple[str, ...]


@dataclass
class Benchmark:
    documents: list[BenchDocument]
    pairs: list[EvalPair]
    k: int | None = None


def build_benchmark(corpus: GroupedCorpus, spec: BenchmarkSpec) -> Benchmark:
    """Concatenate ``k`` sampled sources per document, ``docs_per_group`` documents per group.

    Sources are drawn without replacement from the group and joined with a
    single space in draw order. The generator is seeded from ``(seed, k)``,
    so each ``k`` resamples independently.
    """
    need = spec.k * spec.docs_per_group
    for gid in corpus.group_ids:
        have = len(corpus.groups[gid])
        if have < need:
            raise InsufficientDocumentsError(gid, have, need)
    rng = np.random.default_rng([spec.seed, spec.k])
    documents = []
    for gid in corpus.group_ids:
        pool = corpus.groups[gid]
        picks = rng.choice(len(pool), size=need, replace=False)
        for j in range(spec.docs_per_group):
            chosen = [pool[i] for i in picks[j * spec.k:(j + 1) * spec.k]]
            documents.append(
                BenchDocument(
                    f"{gid}/{j}",
                    gid,
                    " ".join(text for _, text in chosen),
                    tuple(doc_id for doc_id, _ in chosen),
                )
            )
    labeled = [(d.doc_id, d.group) for d in documents]
    total = len(labeled) * (len(labeled) - 1) // 2
    if spec.pair_budget is not None and spec.pair_budget < total:
        pairs = sample_pairs(labeled, spec.pair_budget, spec.seed)
    else:
        pairs = all_pairs(labeled)
    return Benchmark(documents, pairs, spec.k)


@dataclass(frozen=True)
class VariationSpec:
    form: EmbeddingForm
    scheme: WeightScheme
    pca: bool = False

    @property
    def name(self) -> str:
        return f"{self.scheme.name}-{self.form.kind}" + ("-pca" if self.pca else "")


def all_variations(a: float = 1e-4, t: float = 1e-5, idf_scaled: bool = False) -> list[VariationSpec]:
    """The 18 combinations of weight scheme, embedding form and PCA post-processing."""
    out = []
    for kind in SCHEME_ORDER:
        scheme = WeightScheme(kind, a=a, t=t, scaled=idf_scaled)
        for form in FORM_ORDER:
            for pca in (False, True):
                out.append(VariationSpec(EmbeddingForm(form), scheme, pca))
    return out


def table1_variations(idf_scaled: bool = False) -> list[VariationSpec]:
    """Six idf variations followed by the unit-weight sum baseline."""
    out = [v for v in all_variations(idf_scaled=idf_scaled) if v.scheme.kind == "idf"]
    out.append(VariationSpec(EmbeddingForm("sum"), WeightScheme("unit")))
    return out


def parse_variations(text: str, a=1e-4, t=1e-5, idf_scaled=False) -> list[VariationSpec]:
    """``all``, ``table1`` or a comma list of names such as ``idf-delta-pca,unit-sum``."""
    text = text.strip()
    if text == "all":
        return all_variations(a, t, idf_scaled)
    if text == "table1":
        return table1_variations(idf_scaled)
    out = []
    for name in (n.strip() for n in text.split(",") if n.strip()):
        parts = name.split("-")
        pca = parts[-1] == "pca"
        if pca:
            parts = parts[:-1]
        if len(parts) != 2:
            raise ValueError(f"bad variation name {name!r}; expected <scheme>-<form>[-pca]")
        scheme = WeightScheme(parts[0], a=a, t=t, scaled=idf_scaled)
        out.append(VariationSpec(EmbeddingForm(parts[1]), scheme, pca))
    if not out:
        raise ValueError("no variations selected")
    return out


@dataclass(frozen=True)
class LengthStats:
    min_words: int
    mean_words: float
    max_words: int


def length_report(documents: Sequence, tokenizer: TokenizerConfig = DEFAULT_TOKENIZER) -> LengthStats | None:
    """Min, mean and max token counts; ``None`` for an empty document set.

    Accepts raw strings, :class:`BenchDocument` objects, or token lists.
    """
    if not documents:
        return None
    lengths = []
    for d in documents:
        if isinstance(d, BenchDocument):
            d = d.text
        lengths.append(len(tokenize(d, tokenizer)) if isinstance(d, str) else len(d))
    return LengthStats(min(lengths), sum(lengths) / len(lengths), max(lengths))


@dataclass
class ResultRow:
    key: object
    cells: dict[str, float | str]
    lengths: LengthStats | None = None


@dataclass
class ResultTable:
    key_name: str
    columns: list[str]
    rows: list[ResultRow] = field(default_factory=list)

    @staticmethod
    def _fmt(cell) -> str:
        return f"{cell:.4f}" if isinstance(cell, float) else "ERR"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([self.key_name, *self.columns])
        for row in self.rows:
            w.writerow([row.key, *(self._fmt(row.cells[c]) for c in self.columns)])
        return buf.getvalue()

    def to_markdown(self) -> str:
        header = [self.key_name, *self.columns]
        body = [[str(r.key), *(self._fmt(r.cells[c]) for c in self.columns)] for r in self.rows]
        return _markdown([header, *body])

    def lengths_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([self.key_name, "min words", "mean words", "max words"])
        for r in self.rows:
            if r.lengths is not None:
                ls = r.lengths
                w.writerow([r.key, ls.min_words, f"{ls.mean_words:.1f}", ls.max_words])
        return buf.getvalue()

    def lengths_markdown(self) -> str:
        rows = [[self.key_name, "min words", "mean words", "max words"]]
        for r in self.rows:
            if r.lengths is not None:
                ls = r.lengths
                rows.append([str(r.key), str(ls.min_words), f"{ls.mean_words:.1f}", str(ls.max_words)])
        return _markdown(rows)

    def errors(self) -> dict[tuple, str]:
        return {
            (r.key, c): v for r in self.rows for c, v in r.cells.items() if isinstance(v, str)
        }


def _markdown(rows: list[list[str]]) -> str:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = []
    for n, r in enumerate(rows):
        cells = [r[0].rjust(widths[0])] + [c.center(w) for c, w in zip(r[1:], widths[1:])]
        lines.append("| " + " | ".join(cells) + " |")
        if n == 0:
            lines.append("|" + "|".join("-" * (w + 2) for w in widths) + "|")
    return "\n".join(lines) + "\n"


def run_variation(
    doc_stats, pairs, store, corpus_stats, variation: VariationSpec, threads=1, pca_center=False
) -> float | str:
    """AUC of one variation, or an error message when it cannot be computed."""
    try:
        center = None
        if variation.form.kind == "center":
            center = build_corpus_center(
                store, corpus_stats, variation.scheme, variation.form.center_threshold
            )
        batch = embed_batch(
            doc_stats, variation.form, variation.scheme, store, corpus_stats, center, threads
        )
        embeddings = batch.embeddings
        if not embeddings:
            return "error: every document was skipped"
        if variation.pca:
            pc = first_principal_component([e.vector for e in embeddings], center=pca_center)
            embeddings = remove_common_component(embeddings, pc)
        scored = score_pairs({e.doc_id: e.vector for e in embeddings}, pairs)
        return roc_auc(scored).auc
    except (ValueError, RuntimeError) as exc:
        return f"error: {exc}"


def run_variation_matrix(
    documents: Sequence,
    pairs: Sequence[EvalPair],
    store: VectorStore,
    corpus_stats: CorpusStats,
    variations: Sequence[VariationSpec],
    tokenizer: TokenizerConfig = DEFAULT_TOKENIZER,
    threads: int = 1,
    key=None,
    pca_center: bool = False,
) -> ResultTable:
    """One result row: every variation's AUC over the same documents and pairs.

    ``documents`` are :class:`BenchDocument` objects or ``(doc_id, text)``
    tuples. Variations may run concurrently; the row does not depend on
    ``threads``.
    """
    texts = [(d.doc_id, d.text) if isinstance(d, BenchDocument) else tuple(d) for d in documents]
    tokens = [tokenize(text, tokenizer) for _, text in texts]
    doc_stats = [
        doc_term_stats(toks, corpus_stats, store, doc_id)
        for (doc_id, _), toks in zip(texts, tokens)
    ]
    threads = max(1, int(threads))

    def one(v):
        return run_variation(doc_stats, pairs, store, corpus_stats, v, 1, pca_center)

    if threads > 1 and len(variations) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            cells = list(pool.map(one, variations))
    else:
        cells = [one(v) for v in variations]
    table = ResultTable("k", [v.name for v in variations])
    lengths = length_report(tokens) if tokens else None
    table.rows.append(ResultRow(key, dict(zip(table.columns, cells)), lengths))
    return table


def run_k_sweep(
    corpus: GroupedCorpus,
    ks: Sequence[int],
    docs_per_group: int,
    store: VectorStore,
    variations: Sequence[VariationSpec],
    corpus_stats: CorpusStats | None = None,
    seed: int = 0,
    pair_budget: int | None = None,
    tokenizer: TokenizerConfig = DEFAULT_TOKENIZER,
    threads: int = 1,
    pca_center: bool = False,
) -> ResultTable:
    """Rows keyed by ``k``. Corpus statistics default to all source documents."""
    if corpus_stats is None:
        corpus_stats = build_corpus_stats(tokenize(t, tokenizer) for t in corpus.texts())
    table = ResultTable("k", [v.name for v in variations])
    for k in ks:
        bench = build_benchmark(corpus, BenchmarkSpec(k, docs_per_group, seed, pair_budget))
        row = run_variation_matrix(
            bench.documents, bench.pairs, store, corpus_stats, variations,
            tokenizer, threads, key=k, pca_center=pca_center,
        ).rows[0]
        table.rows.append(row)
    return table


def run_pair_groups(
    corpus: GroupedCorpus,
    pairs: Sequence[EvalPair],
    store: VectorStore,
    variations: Sequence[VariationSpec],
    tokenizer: TokenizerConfig = DEFAULT_TOKENIZER,
    threads: int = 1,
    pca_center: bool = False,
) -> ResultTable:
    """Rows keyed by group for externally labeled pairs (duplicate-question style).

    Each group is embedded with statistics counted over that group alone,
    and scored on the pairs whose documents both belong to it.
    """
    table = ResultTable("group", [v.name for v in variations])
    for gid in corpus.group_ids:
        docs = corpus.groups[gid]
        ids = {doc_id for doc_id, _ in docs}
        group_pairs = [p for p in pairs if p.doc_a in ids and p.doc_b in ids]
        stats = build_corpus_stats(tokenize(text, tokenizer) for _, text in docs)
        row = run_variation_matrix(
            docs, group_pairs, store, stats, variations, tokenizer, threads,
            key=gid, pca_center=pca_center,
        ).rows[0]
        table.rows.append(row)
    return table
