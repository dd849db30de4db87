"""Tokenization and corpus-wide counting.

``CorpusStats`` carries the integer counts (corpus occurrences and document
frequency per word, the document count and the total token count);
frequencies and idf are derived from them on demand.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .vectors import VectorStore

STATS_MAGIC = "# docembed corpus-stats v1"
SPLIT_POLICIES = ("non-alphanumeric", "whitespace")

_ALNUM_RUN = re.compile(r"[^\W_]+")


class UnknownWordError(KeyError):
    def __init__(self, word):
        self.word = word
        super().__init__(word)

    def __str__(self):
        return f"word {self.word!r} is not counted in the corpus"


class DegenerateScaleError(ValueError):
    pass


class StatsFileError(ValueError):
    def __init__(self, message, lineno=None, path=None):
        self.lineno = lineno
        prefix = f"{path}:{lineno}: " if path is not None and lineno else ""
        super().__init__(prefix + message)


@dataclass(frozen=True)
class TokenizerConfig:
    lowercase: bool = True
    split_policy: str = "non-alphanumeric"
    min_token_len: int = 1

    def __post_init__(self):
        if self.split_policy not in SPLIT_POLICIES:
            raise ValueError(f"split_policy must be one of {SPLIT_POLICIES}")
        if self.min_token_len < 0:
            raise ValueError("min_token_len must be non-negative")


DEFAULT_TOKENIZER = TokenizerConfig()


def tokenize(text: str, config: TokenizerConfig = DEFAULT_TOKENIZER) -> list[str]:
    if config.lowercase:
        text = text.lower()
    if config.split_policy == "whitespace":
        tokens = text.split()
    else:
        tokens = _ALNUM_RUN.findall(text)
    if config.min_token_len > 1:
        tokens = [t for t in tokens if len(t) >= config.min_token_len]
    return tokens


@dataclass(frozen=True)
class CorpusStats:
    doc_count: int
    total_tokens: int
    counts: dict[str, int]
    doc_freq: dict[str, int]

    def __post_init__(self):
        if set(self.counts) != set(self.doc_freq):
            raise ValueError("counts and doc_freq must cover the same words")
        for word, n in self.counts.items():
            d = self.doc_freq[word]
            if not 1 <= d <= self.doc_count or n < d:
                raise ValueError(f"inconsistent counts for {word!r}: n={n}, D_i={d}")

    def __contains__(self, word):
        return word in self.counts

    def __len__(self):
        return len(self.counts)

    @property
    def vocabulary_size(self) -> int:
        return len(self.counts)

    @cached_property
    def words(self) -> tuple[str, ...]:
        return tuple(sorted(self.counts))

    def count(self, word: str) -> int:
        try:
            return self.counts[word]
        except KeyError:
            raise UnknownWordError(word) from None

    def tf(self, word: str) -> float:
        """Corpus term frequency n_ic / N_c."""
        return self.count(word) / self.total_tokens

    def idf(self, word: str) -> float:
        """Natural-log inverse document frequency log(D / D_i)."""
        try:
            d_i = self.doc_freq[word]
        except KeyError:
            raise UnknownWordError(word) from None
        return math.log(self.doc_count / d_i)

    @cached_property
    def _idf_range(self) -> tuple[float, float]:
        values = [math.log(self.doc_count / d) for d in set(self.doc_freq.values())]
        lo, hi = min(values, default=0.0), max(values, default=0.0)
        if not hi > lo:
            raise DegenerateScaleError("all counted words share one idf value; cannot rescale")
        return lo, hi

    def scaled_idf(self, word: str) -> float:
        """idf min-max rescaled to [0, 1] over all counted words."""
        value = self.idf(word)
        lo, hi = self._idf_range
        return (value - lo) / (hi - lo)

    def merge(self, other: "CorpusStats") -> "CorpusStats":
        counts = Counter(self.counts)
        counts.update(other.counts)
        doc_freq = Counter(self.doc_freq)
        doc_freq.update(other.doc_freq)
        return CorpusStats(
            self.doc_count + other.doc_count,
            self.total_tokens + other.total_tokens,
            dict(counts),
            dict(doc_freq),
        )

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(STATS_MAGIC + "\n")
            fh.write(f"{self.doc_count} {self.total_tokens}\n")
            for word in self.words:
                if any(ch.isspace() for ch in word):
                    raise ValueError(f"token {word!r} contains whitespace and cannot be saved")
                fh.write(f"{word} {self.counts[word]} {self.doc_freq[word]}\n")

    @classmethod
    def load(cls, path) -> "CorpusStats":
        counts, doc_freq = {}, {}
        with open(path, encoding="utf-8") as fh:
            lines = enumerate(fh, start=1)
            lineno, first = next(lines, (1, ""))
            if first.rstrip("\n") != STATS_MAGIC:
                raise StatsFileError(f"missing '{STATS_MAGIC}' header", lineno, path)
            lineno, second = next(lines, (2, ""))
            try:
                doc_count, total = (int(x) for x in second.split())
            except ValueError:
                raise StatsFileError("expected 'D N_c'", lineno, path) from None
            for lineno, line in lines:
                parts = line.split()
                if not parts:
                    continue
                if len(parts) != 3:
                    raise StatsFileError("expected 'token n_ic D_i'", lineno, path)
                word = parts[0]
                if word in counts:
                    raise StatsFileError(f"duplicate token {word!r}", lineno, path)
                try:
                    counts[word], doc_freq[word] = int(parts[1]), int(parts[2])
                except ValueError:
                    raise StatsFileError("counts must be integers", lineno, path) from None
        if sum(counts.values()) != total:
            raise StatsFileError(f"word counts do not sum to N_c={total}", 2, path)
        return cls(doc_count, total, counts, doc_freq)


def build_corpus_stats(docs: Iterable[Sequence[str]]) -> CorpusStats:
    """Count a corpus of token sequences in a single pass."""
    counts: Counter = Counter()
    doc_freq: Counter = Counter()
    doc_count = 0
    for tokens in docs:
        doc_count += 1
        c = Counter(tokens)
        counts.update(c)
        doc_freq.update(c.keys())
    return CorpusStats(doc_count, sum(counts.values()), dict(counts), dict(doc_freq))


@dataclass(frozen=True, eq=False)
class DocTermStats:
    """Per-document counts restricted to embeddable words, sorted by token.

    ``store_rows`` maps each word to its row in the vector store used to
    build these stats.
    """

    doc_id: object
    words: tuple[str, ...]
    counts: np.ndarray
    length: int
    corpus_tf: np.ndarray
    store_rows: np.ndarray
    tf: np.ndarray = field(init=False)

    def __post_init__(self):
        tf = self.counts / self.length if self.length else np.zeros(0)
        object.__setattr__(self, "tf", tf)

    @property
    def delta(self) -> np.ndarray:
        return self.tf - self.corpus_tf

    @property
    def is_empty(self) -> bool:
        return len(self.words) == 0

    def __len__(self):
        return len(self.words)


def doc_term_stats(
    tokens: Sequence[str],
    corpus: CorpusStats,
    store: VectorStore,
    doc_id=None,
    oov_in_denominator: bool = False,
) -> DocTermStats:
    """Count a document's words that appear in both the store and the corpus.

    Other tokens are dropped before the document length is taken, unless
    ``oov_in_denominator`` is set.
    """
    raw = Counter(tokens)
    kept = sorted(w for w in raw if w in store.index and w in corpus.counts)
    counts = np.array([raw[w] for w in kept], dtype=np.int64)
    length = sum(raw.values()) if oov_in_denominator else int(counts.sum())
    if not kept:
        length = 0
    corpus_tf = np.array([corpus.counts[w] for w in kept], dtype=np.float64)
    if kept:
        corpus_tf /= corpus.total_tokens
    rows = np.array([store.index[w] for w in kept], dtype=np.int64)
    return DocTermStats(doc_id, tuple(kept), counts, length, corpus_tf, rows)


def read_documents(path) -> Iterator[tuple[str, str]]:
    """Yield ``(doc_id, text)`` from a docs-per-line file or a directory of ``.txt`` files.

    Line documents are numbered from 1; file documents use the file stem.
    """
    path = Path(path)
    if path.is_dir():
        for p in sorted(path.glob("*.txt")):
            yield p.stem, p.read_text(encoding="utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                yield str(lineno), line.rstrip("\n").rstrip("\r")
