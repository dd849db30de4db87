"""Cosine scoring of labeled document pairs and tie-aware ROC AUC."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels

ZERO_NORM_TOL = 1e-12


class UndefinedAUCError(ValueError):
    """Raised when the labels contain a single class."""


@dataclass(frozen=True)
class EvalPair:
    doc_a: str
    doc_b: str
    label: int

    def __post_init__(self):
        if self.doc_a == self.doc_b:
            raise ValueError(f"pair references {self.doc_a!r} twice")
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label!r}")


@dataclass(frozen=True)
class ScoredPair:
    doc_a: str
    doc_b: str
    label: int
    score: float


@dataclass
class ScoredPairs:
    rows: list[ScoredPair] = field(default_factory=list)
    skipped: int = 0

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return ((r.score, r.label) for r in self.rows)

    @property
    def scores(self) -> np.ndarray:
        return np.array([r.score for r in self.rows], dtype=np.float64)

    @property
    def labels(self) -> np.ndarray:
        return np.array([r.label for r in self.rows], dtype=np.int8)


@dataclass(frozen=True)
class EvalResult:
    auc: float
    positives: int
    negatives: int
    skipped_pairs: int = 0

    @property
    def total_pairs(self) -> int:
        return self.positives + self.negatives + self.skipped_pairs


def cosine_similarity(u, v) -> float:
    """Cosine of the angle between ``u`` and ``v``; 0 when either is (near) zero."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu, nv = math.sqrt(float(u @ u)), math.sqrt(float(v @ v))
    if nu < ZERO_NORM_TOL or nv < ZERO_NORM_TOL:
        return 0.0
    return max(-1.0, min(1.0, float(u @ v) / (nu * nv)))


def score_pairs(embeddings: Mapping[str, np.ndarray], pairs: Iterable[EvalPair]) -> ScoredPairs:
    """Score every pair whose two documents both have an embedding.

    Pairs naming a missing document are counted in ``skipped``.
    """
    ids = list(embeddings)
    pos = {doc_id: i for i, doc_id in enumerate(ids)}
    kept: list[EvalPair] = []
    left, right = [], []
    skipped = 0
    for pair in pairs:
        a, b = pos.get(pair.doc_a), pos.get(pair.doc_b)
        if a is None or b is None:
            skipped += 1
            continue
        kept.append(pair)
        left.append(a)
        right.append(b)
    if not kept:
        return ScoredPairs([], skipped)
    matrix = np.ascontiguousarray(np.array([embeddings[i] for i in ids], dtype=np.float64))
    if matrix.ndim != 2:
        raise ValueError("embeddings must all share one dimension")
    scores = kernels.pair_cosines(
        matrix, np.array(left, dtype=np.int64), np.array(right, dtype=np.int64), ZERO_NORM_TOL
    )
    rows = [ScoredPair(p.doc_a, p.doc_b, p.label, float(s)) for p, s in zip(kept, scores)]
    return ScoredPairs(rows, skipped)


def auc_score(scores, labels) -> float:
    """Mann-Whitney AUC with average ranks for tied scores."""
    scores = np.ascontiguousarray(scores, dtype=np.float64)
    labels = np.ascontiguousarray(labels, dtype=np.int8)
    if scores.shape != labels.shape:
        raise ValueError("scores and labels differ in length")
    if not np.all(np.isfinite(scores)):
        raise ValueError("scores must be finite")
    n_pos = int(np.count_nonzero(labels == 1))
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedAUCError(
            f"AUC undefined with {n_pos} positive and {n_neg} negative labels"
        )
    order = np.argsort(scores, kind="stable").astype(np.int64)
    rank_sum2 = kernels.doubled_positive_rank_sum(scores, labels, order)
    # Doubled Mann-Whitney U is an exact integer, so the division is the only rounding step.
    u2 = rank_sum2 - n_pos * (n_pos + 1)
    return u2 / (2 * n_pos * n_neg)


def roc_auc(scored, skipped_pairs: int | None = None) -> EvalResult:
    """AUC of a sequence of ``(score, label)`` pairs, or of a :class:`ScoredPairs`."""
    if isinstance(scored, ScoredPairs):
        scores, labels = scored.scores, scored.labels
        if skipped_pairs is None:
            skipped_pairs = scored.skipped
    else:
        scored = list(scored)
        scores = np.array([s for s, _ in scored], dtype=np.float64)
        labels = np.array([lab for _, lab in scored], dtype=np.int8)
    auc = auc_score(scores, labels)
    n_pos = int(np.count_nonzero(labels == 1))
    return EvalResult(auc, n_pos, len(labels) - n_pos, skipped_pairs or 0)


def _unrank_pairs(flat: np.ndarray, n: int):
    """Map linear indices over the upper triangle (row-major) to (i, j) with i < j."""
    i_all = np.arange(n, dtype=np.int64)
    # number of pairs preceding row i
    offsets = i_all * n - i_all * (i_all + 1) // 2
    i = np.searchsorted(offsets, flat, side="right") - 1
    j = flat - offsets[i] + i + 1
    return i, j


def sample_pairs(ids_with_groups: Sequence[tuple[str, object]], count: int, seed: int) -> list[EvalPair]:
    """Distinct unordered pairs labeled 1 iff both ids share a group.

    With ``count`` at or above the number of distinct pairs every pair is
    returned; otherwise ``count`` pairs are drawn uniformly without
    replacement and returned in enumeration order.
    """
    items = list(ids_with_groups)
    n = len(items)
    if n < 2:
        raise ValueError("need at least 2 ids to form a pair")
    if count < 1:
        raise ValueError("count must be positive")
    total = n * (n - 1) // 2
    if count >= total:
        flat = np.arange(total, dtype=np.int64)
    else:
        rng = np.random.default_rng(seed)
        flat = np.sort(rng.choice(total, size=count, replace=False)).astype(np.int64)
    ii, jj = _unrank_pairs(flat, n)
    out = []
    for i, j in zip(ii.tolist(), jj.tolist()):
        (a, ga), (b, gb) = items[i], items[j]
        out.append(EvalPair(a, b, int(ga == gb)))
    return out


def all_pairs(ids_with_groups: Sequence[tuple[str, object]]) -> list[EvalPair]:
    items = list(ids_with_groups)
    return [
        EvalPair(a, b, int(ga == gb))
        for k, (a, ga) in enumerate(items)
        for b, gb in items[k + 1:]
    ]


def read_pairs(path) -> list[EvalPair]:
    """Read a ``doc_a,doc_b,label`` CSV with header."""
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:3]] != ["doc_a", "doc_b", "label"]:
            raise ValueError(f"{path}: expected header 'doc_a,doc_b,label'")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                out.append(EvalPair(row[0].strip(), row[1].strip(), int(row[2])))
            except (IndexError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    return out


def write_pairs(pairs: Iterable[EvalPair], fh) -> None:
    fh.write("doc_a,doc_b,label\n")
    for p in pairs:
        fh.write(f"{p.doc_a},{p.doc_b},{p.label}\n")


def write_scored(scored: ScoredPairs, fh) -> None:
    fh.write("doc_a,doc_b,label,score\n")
    for r in scored.rows:
        fh.write(f"{r.doc_a},{r.doc_b},{r.label},{r.score!r}\n")
