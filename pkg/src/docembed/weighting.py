"""Per-word weights derived from corpus statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import CorpusStats, UnknownWordError

KINDS = ("idf", "sif", "subsample", "unit")


@dataclass(frozen=True)
class WeightScheme:
    """Word weight function.

    ``a`` is the smooth-inverse-frequency constant and ``t`` the subsampling
    threshold; each is only read by its own kind. ``scaled`` switches idf to
    its 0-1 min-max rescaled form.
    """

    kind: str = "idf"
    a: float = 1e-4
    t: float = 1e-5
    scaled: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown weight scheme {self.kind!r}; expected one of {KINDS}")
        if not self.a > 0 or not self.t > 0:
            raise ValueError("a and t must be positive")

    @property
    def name(self) -> str:
        return self.kind

    @property
    def fingerprint(self) -> str:
        if self.kind == "idf":
            return "idf-scaled" if self.scaled else "idf"
        if self.kind == "sif":
            return f"sif:a={self.a!r}"
        if self.kind == "subsample":
            return f"subsample:t={self.t!r}"
        return "unit"


IDF = WeightScheme("idf")
SIF = WeightScheme("sif")
SUBSAMPLE = WeightScheme("subsample")
UNIT = WeightScheme("unit")


def sif_weight(tf_corpus, a=1e-4):
    return a / (a + tf_corpus)


def subsample_weight(tf_corpus, t=1e-5):
    """sqrt(t / tf) at or above the threshold, 1 below it."""
    tf_corpus = np.asarray(tf_corpus, dtype=np.float64)
    safe = np.maximum(tf_corpus, t)
    out = np.where(tf_corpus >= t, np.sqrt(t / safe), 1.0)
    return out if out.ndim else float(out)


def weight(scheme: WeightScheme, word: str, corpus: CorpusStats) -> float:
    if word not in corpus.counts:
        raise UnknownWordError(word)
    if scheme.kind == "idf":
        return corpus.scaled_idf(word) if scheme.scaled else corpus.idf(word)
    if scheme.kind == "unit":
        return 1.0
    tf = corpus.tf(word)
    if scheme.kind == "sif":
        return sif_weight(tf, scheme.a)
    return float(subsample_weight(tf, scheme.t))


def weights(scheme: WeightScheme, words: Sequence[str], corpus: CorpusStats) -> np.ndarray:
    """Vectorized :func:`weight` over ``words``."""
    if scheme.kind == "unit":
        for w in words:
            if w not in corpus.counts:
                raise UnknownWordError(w)
        return np.ones(len(words))
    if scheme.kind == "idf":
        return np.array([weight(scheme, w, corpus) for w in words], dtype=np.float64)
    try:
        counts = np.array([corpus.counts[w] for w in words], dtype=np.float64)
    except KeyError as exc:
        raise UnknownWordError(exc.args[0]) from None
    tf = counts / corpus.total_tokens if len(words) else counts
    if scheme.kind == "sif":
        return sif_weight(tf, scheme.a)
    return np.asarray(subsample_weight(tf, scheme.t), dtype=np.float64)


@dataclass(frozen=True)
class CurveRow:
    tf_corpus: float
    scheme: str
    weight: float


def emit_weight_curves(
    corpus: CorpusStats, schemes: Sequence[WeightScheme], grid: Sequence[float]
) -> list[CurveRow]:
    """Weight-versus-corpus-frequency table, one row per grid point and scheme.

    Idf depends on document frequency rather than corpus frequency, so its
    rows report the scaled idf of the counted word(s) whose corpus frequency
    is nearest the grid point on a log scale, averaged over ties.
    """
    grid = [float(g) for g in grid]
    for g in grid:
        if not 0.0 < g <= 1.0:
            raise ValueError(f"grid value {g} outside (0, 1]")
    if not grid:
        return []
    idf_lookup = None
    if any(s.kind == "idf" for s in schemes):
        idf_lookup = _nearest_scaled_idf(corpus)
    rows = []
    for g in grid:
        for s in schemes:
            if s.kind == "sif":
                w = sif_weight(g, s.a)
            elif s.kind == "subsample":
                w = float(subsample_weight(g, s.t))
            elif s.kind == "unit":
                w = 1.0
            else:
                w = idf_lookup(g)
            rows.append(CurveRow(g, s.name, w))
    return rows


def _nearest_scaled_idf(corpus: CorpusStats):
    by_count: dict[int, list[float]] = {}
    for word in corpus.words:
        by_count.setdefault(corpus.counts[word], []).append(corpus.scaled_idf(word))
    if not by_count:
        raise ValueError("corpus has no counted words")
    counts = np.array(sorted(by_count), dtype=np.float64)
    log_tf = np.log(counts / corpus.total_tokens)
    means = [math.fsum(by_count[int(c)]) / len(by_count[int(c)]) for c in counts]

    def lookup(g: float) -> float:
        return means[int(np.argmin(np.abs(log_tf - math.log(g))))]

    return lookup


def write_curves_csv(rows: Sequence[CurveRow], fh) -> None:
    fh.write("tf_corpus,scheme,weight\n")
    for r in rows:
        fh.write(f"{r.tf_corpus!r},{r.scheme},{r.weight!r}\n")
