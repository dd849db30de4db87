"""Pre-trained word vectors: loading, validation and unit normalization.

Two text layouts are read:

* ``word2vec-text``: a ``<count> <dim>`` header line, then one
  ``<token> <f1> ... <f_dim>`` row per word.
* ``glove-text``: the same rows without a header; the dimension is taken
  from the first row.

Tokens are kept exactly as decoded from UTF-8, with no case folding or
Unicode normalization, so they must match the tokenizer output verbatim.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

FORMATS = ("word2vec-text", "glove-text")


class VectorFileError(ValueError):
    """A vector file could not be parsed. ``lineno`` is 1-based."""

    def __init__(self, message: str, lineno: int | None = None, path=None):
        self.lineno = lineno
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}"
        if lineno is not None:
            where += f"{':' if where else 'line '}{lineno}"
        super().__init__(f"{where}: {message}" if where else message)


class MalformedHeaderError(VectorFileError):
    pass


class MalformedRowError(VectorFileError):
    pass


class DimensionMismatchError(VectorFileError):
    pass


class DuplicateTokenError(VectorFileError):
    pass


class NonFiniteComponentError(VectorFileError):
    pass


class ZeroNormVectorError(ValueError):
    def __init__(self, token: str):
        self.token = token
        super().__init__(f"word vector for {token!r} has zero norm")


@dataclass(frozen=True)
class VectorStore:
    """Immutable token -> K-dimensional vector table.

    ``matrix`` row ``i`` holds the vector of ``words[i]``; the array is
    flagged read-only.
    """

    words: tuple[str, ...]
    matrix: np.ndarray
    normalized: bool = False
    index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        matrix = np.ascontiguousarray(self.matrix, dtype=np.float64)
        if matrix.ndim != 2:
            raise ValueError("matrix must be two-dimensional")
        if matrix.shape[0] != len(self.words):
            raise ValueError(
                f"{len(self.words)} words but {matrix.shape[0]} matrix rows"
            )
        index = {}
        for i, word in enumerate(self.words):
            if word in index:
                raise DuplicateTokenError(f"duplicate token {word!r}")
            index[word] = i
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "words", tuple(self.words))
        object.__setattr__(self, "index", index)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[1]

    @property
    def vocabulary_size(self) -> int:
        return len(self.words)

    def __len__(self):
        return len(self.words)

    def __contains__(self, word):
        return word in self.index

    def lookup(self, word: str) -> np.ndarray | None:
        """Vector for ``word``, or ``None`` when it is out of vocabulary."""
        i = self.index.get(word)
        return None if i is None else self.matrix[i]

    def normalize(self) -> "VectorStore":
        return normalize_store(self)

    @classmethod
    def from_dict(cls, vectors: dict, normalize: bool = True) -> "VectorStore":
        words = tuple(vectors)
        if not words:
            return cls((), np.zeros((0, 0)))
        matrix = np.array([np.asarray(vectors[w], dtype=np.float64) for w in words])
        store = cls(words, matrix)
        return normalize_store(store) if normalize else store


def lookup(store: VectorStore, word: str) -> np.ndarray | None:
    return store.lookup(word)


def normalize_store(store: VectorStore) -> VectorStore:
    """Scale every vector to unit Euclidean norm.

    Raises :class:`ZeroNormVectorError` rather than dropping the word, since
    a silently missing row would desynchronize the corpus statistics.
    """
    if store.vocabulary_size == 0:
        return store
    norms = np.linalg.norm(store.matrix, axis=1)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise ZeroNormVectorError(store.words[zero[0]])
    matrix = store.matrix / norms[:, None]
    # A second pass absorbs the last-ulp error of the first division, which
    # makes normalizing an already-normalized store a fixed point.
    matrix /= np.linalg.norm(matrix, axis=1)[:, None]
    return VectorStore(store.words, matrix, normalized=True)


def _parse_row(line: str, lineno: int, dim: int | None, path):
    parts = line.rstrip("\n").rstrip("\r").split(" ")
    while parts and parts[-1] == "":
        # tolerate the trailing space some writers emit
        parts.pop()
    if len(parts) < 2:
        raise MalformedRowError("expected a token followed by components", lineno, path)
    token, fields = parts[0], parts[1:]
    if token == "":
        raise MalformedRowError("empty token", lineno, path)
    if dim is not None and len(fields) != dim:
        raise DimensionMismatchError(
            f"expected {dim} components, found {len(fields)}", lineno, path
        )
    try:
        values = [float(f) for f in fields]
    except ValueError:
        raise MalformedRowError("component is not a decimal number", lineno, path) from None
    if not all(math.isfinite(v) for v in values):
        raise NonFiniteComponentError(f"non-finite component for {token!r}", lineno, path)
    return token, values


def load_vectors(path, expect_dim: int | None = None, format: str = "word2vec-text") -> VectorStore:
    """Read a text vector file. The returned store is *not* normalized."""
    if format not in FORMATS:
        raise ValueError(f"unknown vector format {format!r}; expected one of {FORMATS}")
    path = Path(path)
    words: list[str] = []
    rows: list[list[float]] = []
    seen: set[str] = set()
    declared_count = None
    dim = None
    with open(path, encoding="utf-8") as fh:
        lines = enumerate(fh, start=1)
        if format == "word2vec-text":
            try:
                lineno, header = next(lines)
            except StopIteration:
                raise MalformedHeaderError("empty file, missing header", 1, path) from None
            head = header.split()
            try:
                declared_count, dim = int(head[0]), int(head[1])
            except (ValueError, IndexError):
                raise MalformedHeaderError(
                    "header must be '<count> <dim>'", lineno, path
                ) from None
            if len(head) != 2 or declared_count < 0 or dim <= 0:
                raise MalformedHeaderError("header must be '<count> <dim>'", lineno, path)
        for lineno, line in lines:
            if not line.strip():
                continue
            token, values = _parse_row(line, lineno, dim, path)
            if dim is None:
                dim = len(values)
            if token in seen:
                raise DuplicateTokenError(f"duplicate token {token!r}", lineno, path)
            seen.add(token)
            words.append(token)
            rows.append(values)
    if declared_count is not None and declared_count != len(words):
        raise MalformedHeaderError(
            f"header declares {declared_count} vectors, file has {len(words)}", 1, path
        )
    if dim is None:
        dim = expect_dim or 0
    if expect_dim is not None and dim != expect_dim:
        raise DimensionMismatchError(f"vectors have dimension {dim}, expected {expect_dim}", None, path)
    matrix = np.array(rows, dtype=np.float64).reshape(len(words), dim)
    return VectorStore(tuple(words), matrix)


def save_vectors(store: VectorStore, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{store.vocabulary_size} {store.dimension}\n")
        for word, row in zip(store.words, store.matrix):
            fh.write(word + " " + " ".join(repr(float(x)) for x in row) + "\n")
