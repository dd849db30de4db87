"""Planted-topic grouped corpora for benchmarking without real data.

Every group owns a set of exclusive words; all groups share a background
vocabulary. Each document draws a fixed share of its tokens uniformly from
the background and the rest uniformly from its group's exclusive words.
Word vectors are random unit vectors, so the only group signal an embedding
can pick up is which words occur, weighted by how informative they are.
"""

from __future__ import annotations

import numpy as np

from .harness import GroupedCorpus
from .vectors import VectorStore, normalize_store


def planted_topic_corpus(
    groups: int = 10,
    background_words: int = 300,
    exclusive_words: int = 20,
    dim: int = 32,
    doc_len: int = 100,
    docs_per_group: int = 50,
    background_share: float = 0.8,
    seed: int = 0,
) -> tuple[GroupedCorpus, VectorStore]:
    rng = np.random.default_rng(seed)
    background = [f"bg{i:04d}" for i in range(background_words)]
    exclusive = [[f"g{g:03d}x{i:03d}" for i in range(exclusive_words)] for g in range(groups)]
    vocab = background + [w for ws in exclusive for w in ws]
    store = normalize_store(VectorStore(tuple(vocab), rng.normal(size=(len(vocab), dim))))

    n_background = int(round(background_share * doc_len))
    n_exclusive = doc_len - n_background
    corpus = {}
    for g in range(groups):
        docs = []
        for d in range(docs_per_group):
            tokens = [background[i] for i in rng.integers(0, background_words, n_background)]
            tokens += [exclusive[g][i] for i in rng.integers(0, exclusive_words, n_exclusive)]
            docs.append((f"g{g:03d}d{d:04d}", " ".join(tokens)))
        corpus[f"g{g:03d}"] = docs
    provenance = (
        f"planted-topic groups={groups} background={background_words} exclusive={exclusive_words} "
        f"dim={dim} doc_len={doc_len} docs_per_group={docs_per_group} share={background_share} seed={seed}"
    )
    return GroupedCorpus(corpus, provenance), store
