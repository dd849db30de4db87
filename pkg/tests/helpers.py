"""Independent oracles and random instance builders shared by the tests."""

import math

import numpy as np

from docembed.corpus import build_corpus_stats, doc_term_stats
from docembed.vectors import VectorStore, normalize_store
from docembed.weighting import weight


def random_instance(rng, vocab=50, dim=8, n_docs=30, doc_len=(5, 40), store_extra=0, store_missing=0):
    """Store + corpus + tokenized docs over ``vocab`` words.

    ``store_missing`` words are left out of the store; ``store_extra`` store
    words never occur in the corpus.
    """
    words = [f"w{i}" for i in range(vocab)]
    zipf = 1.0 / np.arange(1, vocab + 1)
    zipf /= zipf.sum()
    docs = [list(rng.choice(words, size=rng.integers(*doc_len), p=zipf)) for _ in range(n_docs)]
    in_store = words[store_missing:] + [f"x{i}" for i in range(store_extra)]
    store = normalize_store(
        VectorStore(tuple(in_store), rng.normal(size=(len(in_store), dim)))
    )
    return store, build_corpus_stats(docs), docs


def dense_delta_oracle(tokens, store, corpus, scheme):
    """sum over every shared vocabulary word of w_i (tf_i - tf_ic) v_i, term by term."""
    kept = [t for t in tokens if t in store.index and t in corpus.counts]
    n = len(kept)
    c = [0.0] * store.dimension
    for word in corpus.counts:
        if word not in store.index:
            continue
        tf = kept.count(word) / n
        coef = weight(scheme, word, corpus) * (tf - corpus.counts[word] / corpus.total_tokens)
        vec = store.matrix[store.index[word]]
        for k in range(store.dimension):
            c[k] += coef * float(vec[k])
    return np.array(c)


def sparse_delta_oracle(tokens, store, corpus, scheme):
    """The same sum restricted to words present in the document."""
    kept = [t for t in tokens if t in store.index and t in corpus.counts]
    n = len(kept)
    c = [0.0] * store.dimension
    for word in set(kept):
        delta = kept.count(word) / n - corpus.counts[word] / corpus.total_tokens
        coef = delta * weight(scheme, word, corpus)
        vec = store.matrix[store.index[word]]
        for k in range(store.dimension):
            c[k] += coef * float(vec[k])
    return np.array(c)


def brute_auc(scores, labels):
    """O(P*N) pair count with ties worth one half; exact as a doubled integer."""
    pos = [s for s, y in zip(scores, labels) if y == 1]
    neg = [s for s, y in zip(scores, labels) if y == 0]
    doubled = 0
    for p in pos:
        for q in neg:
            if p > q:
                doubled += 2
            elif p == q:
                doubled += 1
    return doubled / (2 * len(pos) * len(neg))


def jacobi_eigh(a, tol=1e-15, max_sweeps=100):
    """Cyclic Jacobi eigensolver for a symmetric matrix: (values, vectors as columns)."""
    a = np.array(a, dtype=np.float64)
    n = a.shape[0]
    v = np.eye(n)
    for _ in range(max_sweeps):
        off = math.sqrt(sum(a[i, j] ** 2 for i in range(n) for j in range(n) if i != j))
        if off <= tol * max(1.0, np.abs(a).max()):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if a[p, q] == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * a[p, q])
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp, akq = a[k, p], a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk, aqk = a[p, k], a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                for k in range(n):
                    vkp, vkq = v[k, p], v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
    return np.diag(a).copy(), v


def doc_stats_for(docs, store, corpus):
    return [doc_term_stats(d, corpus, store, doc_id=str(i)) for i, d in enumerate(docs)]
