"""Document embeddings from weighted word vectors.

All three forms build a coefficient vector ``c`` as a weighted combination
of the document's word vectors and return ``u = c / ||c||``, the unit vector
maximizing ``c . u``:

* ``sum``:    c = sum_{i in doc} w_i tf_i v_i
* ``center``: c = sum_{i in doc} w_i tf_i v_i - sum_{i in vocab} w_i tf_ic v_i
* ``delta``:  c = sum_{i in doc} w_i (tf_i - tf_ic) v_i

Terms are accumulated in token-sorted order so results are reproducible.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import kernels
from .corpus import CorpusStats, DocTermStats
from .vectors import VectorStore
from .weighting import WeightScheme, weights

ZERO_NORM_TOL = 1e-12
FORMS = ("sum", "center", "delta")


class EmbeddingError(ValueError):
    cause = "EmbeddingError"

    def __init__(self, message, doc_id=None):
        self.doc_id = doc_id
        super().__init__(message if doc_id is None else f"document {doc_id}: {message}")


class EmptyDocumentError(EmbeddingError):
    cause = "EmptyDocument"


class ZeroNormEmbeddingError(EmbeddingError):
    cause = "ZeroNormEmbedding"


class CenterMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class EmbeddingForm:
    kind: str = "sum"
    center_threshold: float | None = None

    def __post_init__(self):
        if self.kind not in FORMS:
            raise ValueError(f"unknown embedding form {self.kind!r}; expected one of {FORMS}")
        if self.center_threshold is not None:
            if self.kind != "center":
                raise ValueError("center_threshold only applies to the center form")
            if not 0.0 < self.center_threshold < 1.0:
                raise ValueError("center_threshold must lie in (0, 1)")


@dataclass(frozen=True, eq=False)
class DocEmbedding:
    """One document's coefficient vector and unit embedding.

    ``unit`` stops being parallel to ``coefficients`` (and may stop being
    unit length) once common-component removal has run; ``post_processed``
    records that.
    """

    doc_id: object
    coefficients: np.ndarray
    unit: np.ndarray | None
    form: str = ""
    scheme: str = ""
    post_processed: bool = False

    @property
    def vector(self) -> np.ndarray:
        return self.coefficients if self.unit is None else self.unit


@dataclass(frozen=True, eq=False)
class CorpusCenter:
    center: np.ndarray
    fingerprint: str
    threshold: float | None = None


def renormalize(c, doc_id=None) -> np.ndarray:
    c = np.asarray(c, dtype=np.float64)
    norm = math.sqrt(float(np.dot(c, c)))
    if not norm >= ZERO_NORM_TOL:
        raise ZeroNormEmbeddingError(f"coefficient norm {norm:.3g} below {ZERO_NORM_TOL}", doc_id)
    return c / norm


def _shared_words(store: VectorStore, corpus: CorpusStats, threshold=None):
    words = [w for w in corpus.words if w in store.index]
    if threshold is not None:
        words = [w for w in words if corpus.counts[w] / corpus.total_tokens >= threshold]
    return words


def build_corpus_center(
    store: VectorStore, corpus: CorpusStats, scheme: WeightScheme, threshold: float | None = None
) -> CorpusCenter:
    """Weighted corpus center ``sum_i w_i tf_ic v_i`` over words known to both store and corpus.

    With ``threshold`` only words with corpus frequency at or above it count.
    """
    if not _shared_words(store, corpus):
        raise ValueError("vector store and corpus share no tokens")
    words = _shared_words(store, corpus, threshold)
    rows = np.array([store.index[w] for w in words], dtype=np.int64)
    tf_c = np.array([corpus.counts[w] for w in words], dtype=np.float64) / corpus.total_tokens
    coef = weights(scheme, words, corpus) * tf_c
    out = np.zeros((1, store.dimension))
    kernels.weighted_row_sums(
        store.matrix, np.array([0, len(rows)], dtype=np.int64), rows, coef, out
    )
    return CorpusCenter(out[0], scheme.fingerprint, threshold)


def _term_coefficients(doc: DocTermStats, form: str, w: np.ndarray) -> np.ndarray:
    if form == "delta":
        return w * (doc.tf - doc.corpus_tf)
    return w * doc.tf


def _accumulate(doc: DocTermStats, coef: np.ndarray, store: VectorStore) -> np.ndarray:
    out = np.zeros((1, store.dimension))
    kernels.weighted_row_sums(
        store.matrix, np.array([0, len(doc)], dtype=np.int64), doc.store_rows, coef, out
    )
    return out[0]


def _finish(doc, c, form, scheme) -> DocEmbedding:
    return DocEmbedding(doc.doc_id, c, renormalize(c, doc.doc_id), form, scheme.fingerprint)


def _check_nonempty(doc: DocTermStats):
    if doc.is_empty or doc.length == 0:
        raise EmptyDocumentError("no embeddable words", doc.doc_id)


def embed_sum(doc: DocTermStats, store: VectorStore, corpus: CorpusStats, scheme: WeightScheme) -> DocEmbedding:
    _check_nonempty(doc)
    coef = _term_coefficients(doc, "sum", weights(scheme, doc.words, corpus))
    return _finish(doc, _accumulate(doc, coef, store), "sum", scheme)


def _check_center(center: CorpusCenter, scheme: WeightScheme, threshold):
    if center.fingerprint != scheme.fingerprint:
        raise CenterMismatchError(
            f"corpus center built with {center.fingerprint!r}, used with {scheme.fingerprint!r}"
        )
    if center.threshold != threshold:
        raise CenterMismatchError(
            f"corpus center threshold {center.threshold!r} does not match {threshold!r}"
        )


def embed_center(
    doc: DocTermStats,
    store: VectorStore,
    corpus: CorpusStats,
    scheme: WeightScheme,
    center: CorpusCenter | None = None,
    threshold: float | None = None,
) -> DocEmbedding:
    """Center-form embedding. Builds the corpus center when none is passed."""
    _check_nonempty(doc)
    if center is None:
        center = build_corpus_center(store, corpus, scheme, threshold)
    _check_center(center, scheme, threshold)
    coef = _term_coefficients(doc, "center", weights(scheme, doc.words, corpus))
    c = _accumulate(doc, coef, store) - center.center
    return _finish(doc, c, "center", scheme)


def embed_delta(doc: DocTermStats, store: VectorStore, corpus: CorpusStats, scheme: WeightScheme) -> DocEmbedding:
    _check_nonempty(doc)
    coef = _term_coefficients(doc, "delta", weights(scheme, doc.words, corpus))
    return _finish(doc, _accumulate(doc, coef, store), "delta", scheme)


def embed(doc, form: EmbeddingForm, scheme, store, corpus, center=None) -> DocEmbedding:
    if form.kind == "sum":
        return embed_sum(doc, store, corpus, scheme)
    if form.kind == "delta":
        return embed_delta(doc, store, corpus, scheme)
    return embed_center(doc, store, corpus, scheme, center, form.center_threshold)


@dataclass
class BatchResult:
    embeddings: list[DocEmbedding] = field(default_factory=list)
    skipped: list[tuple[object, str]] = field(default_factory=list)

    def __iter__(self):
        return iter((self.embeddings, self.skipped))


def _row_weights(scheme: WeightScheme, store: VectorStore, corpus: CorpusStats, rows: np.ndarray):
    """Weights for the distinct store rows in ``rows``, as a row -> weight array."""
    table = np.full(store.vocabulary_size, np.nan)
    uniq = np.unique(rows)
    table[uniq] = weights(scheme, [store.words[r] for r in uniq], corpus)
    return table


def embed_batch(
    docs: Sequence[DocTermStats],
    form: EmbeddingForm,
    scheme: WeightScheme,
    store: VectorStore,
    corpus: CorpusStats,
    center: CorpusCenter | None = None,
    threads: int = 1,
) -> BatchResult:
    """Embed many documents, preserving order.

    Documents that cannot be embedded are listed in ``skipped`` as
    ``(doc_id, cause)``. The result does not depend on ``threads``: every
    document is accumulated independently by the same kernel.
    """
    result = BatchResult()
    if not docs:
        return result
    if form.kind == "center":
        if center is None:
            center = build_corpus_center(store, corpus, scheme, form.center_threshold)
        _check_center(center, scheme, form.center_threshold)

    live = [d for d in docs if not (d.is_empty or d.length == 0)]
    sizes = np.array([len(d) for d in live], dtype=np.int64)
    indptr = np.zeros(len(live) + 1, dtype=np.int64)
    np.cumsum(sizes, out=indptr[1:])
    if live:
        rows = np.concatenate([d.store_rows for d in live]).astype(np.int64)
        table = _row_weights(scheme, store, corpus, rows)
        coef = np.concatenate(
            [_term_coefficients(d, form.kind, table[d.store_rows]) for d in live]
        )
    else:
        rows = np.zeros(0, dtype=np.int64)
        coef = np.zeros(0)
    sums = np.zeros((len(live), store.dimension))

    def run(lo, hi):
        kernels.weighted_row_sums(store.matrix, indptr[lo:hi + 1], rows, coef, sums[lo:hi])

    threads = max(1, int(threads))
    bounds = np.linspace(0, len(live), min(threads, max(len(live), 1)) + 1).astype(int)
    chunks = [(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
    if len(chunks) <= 1:
        for lo, hi in chunks:
            run(lo, hi)
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            list(pool.map(lambda b: run(*b), chunks))

    by_id = {id(d): i for i, d in enumerate(live)}
    for d in docs:
        i = by_id.get(id(d))
        if i is None:
            result.skipped.append((d.doc_id, EmptyDocumentError.cause))
            continue
        c = sums[i] - center.center if form.kind == "center" else sums[i].copy()
        try:
            result.embeddings.append(_finish(d, c, form.kind, scheme))
        except ZeroNormEmbeddingError as exc:
            result.skipped.append((d.doc_id, exc.cause))
    return result


def mark_post_processed(emb: DocEmbedding, unit: np.ndarray) -> DocEmbedding:
    return replace(emb, unit=unit, post_processed=True)


def write_embeddings(embeddings: Sequence[DocEmbedding], fh) -> None:
    """``doc_id dim f1 ... f_dim`` per line, floats in round-trip repr."""
    for e in embeddings:
        v = e.vector
        fh.write(f"{e.doc_id} {len(v)} " + " ".join(repr(float(x)) for x in v) + "\n")


def read_embeddings(path) -> dict[str, np.ndarray]:
    out: dict[str, np.ndarray] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            try:
                dim = int(parts[1])
                values = np.array([float(x) for x in parts[2:]])
            except (IndexError, ValueError):
                raise ValueError(f"{path}:{lineno}: expected 'doc_id dim f1 ... f_dim'") from None
            if len(values) != dim:
                raise ValueError(f"{path}:{lineno}: declared dim {dim}, found {len(values)} values")
            if parts[0] in out:
                raise ValueError(f"{path}:{lineno}: duplicate doc id {parts[0]!r}")
            out[parts[0]] = values
    return out


def write_skip_report(skipped, fh) -> None:
    fh.write("doc_id,cause\n")
    for doc_id, cause in skipped:
        fh.write(f"{doc_id},{cause}\n")
