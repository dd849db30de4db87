"""Time the compiled kernels against the pure-Python (numpy) fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both backends are imported directly, so the comparison does not depend on
which one ``docembed.kernels`` selected.
"""

import argparse
import timeit

import numpy as np

from docembed import _pykernels

try:
    from docembed import _ckernels
except ImportError:
    _ckernels = None


def workloads(rng):
    vocab, dim, docs, doc_words = 20000, 300, 2000, 120
    matrix = rng.normal(size=(vocab, dim))
    indptr = np.arange(0, (docs + 1) * doc_words, doc_words, dtype=np.int64)
    indices = rng.integers(0, vocab, docs * doc_words).astype(np.int64)
    coef = rng.normal(size=docs * doc_words)
    out = np.zeros((docs, dim))
    yield "weighted_row_sums", lambda k: k.weighted_row_sums(matrix, indptr, indices, coef, out)

    vectors = rng.normal(size=(docs, dim))
    n_pairs = 500_000
    left = rng.integers(0, docs, n_pairs).astype(np.int64)
    right = rng.integers(0, docs, n_pairs).astype(np.int64)
    yield "pair_cosines", lambda k: k.pair_cosines(vectors, left, right, 1e-12)

    scores = rng.integers(0, 5000, n_pairs).astype(np.float64)
    labels = rng.integers(0, 2, n_pairs).astype(np.int8)
    order = np.argsort(scores, kind="stable").astype(np.int64)
    yield "doubled_positive_rank_sum", lambda k: k.doubled_positive_rank_sum(scores, labels, order)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    backends = [("python", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    print(f"{'kernel':<28}" + "".join(f"{name:>12}" for name, _ in backends) + "     speedup")
    for name, run in workloads(np.random.default_rng(0)):
        times = [min(timeit.repeat(lambda: run(mod), number=1, repeat=args.repeat)) for _, mod in backends]
        speedup = f"{times[0] / times[1]:>11.1f}x" if len(times) == 2 else ""
        print(f"{name:<28}" + "".join(f"{t * 1e3:>10.1f}ms" for t in times) + speedup)


if __name__ == "__main__":
    main()
