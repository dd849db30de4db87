"""Pure numpy versions of the compiled kernels in ``_ckernels.pyx``."""

import numpy as np


def weighted_row_sums(matrix, indptr, indices, coef, out):
    for r in range(out.shape[0]):
        lo, hi = indptr[r], indptr[r + 1]
        if lo == hi:
            out[r] = 0.0
        else:
            out[r] = coef[lo:hi] @ matrix[indices[lo:hi]]


def pair_cosines(vectors, left, right, zero_tol):
    norms = np.sqrt(np.einsum("ij,ij->i", vectors, vectors))
    out = np.zeros(len(left), dtype=np.float64)
    na, nb = norms[left], norms[right]
    ok = (na >= zero_tol) & (nb >= zero_tol)
    a, b = left[ok], right[ok]
    dots = np.einsum("ij,ij->i", vectors[a], vectors[b])
    out[ok] = np.clip(dots / (na[ok] * nb[ok]), -1.0, 1.0)
    return out


def doubled_positive_rank_sum(scores, labels, order):
    n = len(scores)
    if n == 0:
        return 0
    s = scores[order]
    new_block = np.empty(n, dtype=bool)
    new_block[0] = True
    np.not_equal(s[1:], s[:-1], out=new_block[1:])
    starts = np.flatnonzero(new_block)
    ends = np.append(starts[1:], n)
    block_of = np.cumsum(new_block) - 1
    doubled = (starts + 1 + ends)[block_of].astype(np.int64)
    return int(doubled[labels[order] == 1].sum())
