"""First principal component of a set of embeddings, and its removal."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .embedder import DocEmbedding, mark_post_processed

ANGLE_TOL = 1e-9
ACCEPT_RESIDUAL = 1e-6
MAX_ITER = 1000
_SIGN_TOL = 1e-12


class ConvergenceError(RuntimeError):
    def __init__(self, residual: float, iterations: int):
        self.residual = residual
        self.iterations = iterations
        super().__init__(
            f"power iteration did not converge in {iterations} iterations "
            f"(residual angle {residual:.3g}); top singular values may be tied"
        )


@dataclass(frozen=True)
class PrincipalComponent:
    p: np.ndarray
    iterations_used: int
    residual: float

    @property
    def dimension(self) -> int:
        return len(self.p)


def _sign_normalize(v: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(v) > _SIGN_TOL)
    if nz.size and v[nz[0]] < 0:
        return -v
    return v


def _angle(x: np.ndarray, y: np.ndarray) -> float:
    # chord-based angle stays accurate for tiny angles, unlike arccos
    return 2.0 * math.asin(min(1.0, float(np.linalg.norm(x - y)) / 2.0))


def first_principal_component(
    embeddings,
    center: bool = False,
    tol: float = ANGLE_TOL,
    max_iter: int = MAX_ITER,
) -> PrincipalComponent:
    """Dominant right singular vector of the embedding matrix by power iteration on X^T X.

    Rows are documents. The matrix is used uncentered unless ``center`` is
    set. Iteration starts from the normalized column sum of X (e_1 if that
    vanishes) and stops once successive iterates differ by less than ``tol``
    radians. Sign is fixed so the first nonzero component is positive.
    """
    X = np.asarray(embeddings, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("need a matrix with at least 2 rows")
    if X.shape[1] < 1:
        raise ValueError("embeddings must have at least one column")
    if not np.all(np.isfinite(X)):
        raise ValueError("embedding matrix contains non-finite values")
    if center:
        X = X - X.mean(axis=0)

    gram = X.T @ X
    scale = np.trace(gram)
    if scale == 0.0:
        raise ValueError("embedding matrix is all zeros")
    gram /= scale

    x = X.sum(axis=0)
    norm = np.linalg.norm(x)
    if norm < _SIGN_TOL:
        x = np.zeros(X.shape[1])
        x[0] = 1.0
    else:
        x = x / norm

    # The top eigenvalue is at least ||G e_i|| for every i. An iterate whose
    # Rayleigh quotient falls below that bound is stuck on a lesser
    # eigenvector (the start was orthogonal to the dominant one), so restart
    # from the best column.
    col_norms = np.linalg.norm(gram, axis=0)
    best_col = int(np.argmax(col_norms))
    bound = col_norms[best_col] * (1.0 - 1e-9)
    used = 0
    for _attempt in range(2):
        x, it, residual = _power_iterate(gram, x, tol, max_iter - used)
        used += it
        if residual > tol or float(x @ gram @ x) >= bound:
            break
        x = gram[:, best_col] / col_norms[best_col]
    if residual >= tol and residual > ACCEPT_RESIDUAL:
        raise ConvergenceError(residual, used)
    return PrincipalComponent(_sign_normalize(x), used, residual)


def _power_iterate(gram, x, tol, max_iter):
    residual = math.inf
    it = 0
    for it in range(1, max_iter + 1):
        y = gram @ x
        ny = np.linalg.norm(y)
        if ny == 0.0:
            # start vector in the null space; restart from a basis vector
            y = np.zeros_like(x)
            y[it % len(x)] = 1.0
            ny = 1.0
        y /= ny
        # X^T X is positive semidefinite, so iterates never flip sign
        residual = _angle(x, y)
        x = y
        if residual < tol:
            break
    return x, it, residual


def remove_projection(vectors, p) -> np.ndarray:
    """Row-wise u - p (p . u)."""
    V = np.asarray(vectors, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    if V.shape[-1] != p.shape[0]:
        raise ValueError(f"dimension mismatch: vectors have {V.shape[-1]}, component has {p.shape[0]}")
    return V - np.multiply.outer(V @ p, p)


def remove_common_component(
    embeddings: Sequence[DocEmbedding], pc: PrincipalComponent
) -> list[DocEmbedding]:
    """Project ``pc`` out of every embedding. Results are not renormalized."""
    if not embeddings:
        return []
    U = np.array([e.vector for e in embeddings])
    R = remove_projection(U, pc.p)
    return [mark_post_processed(e, r) for e, r in zip(embeddings, R)]


def write_component(pc: PrincipalComponent, fh) -> None:
    fh.write(f"PC {pc.dimension} " + " ".join(repr(float(x)) for x in pc.p) + "\n")


def read_component(path) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        parts = fh.readline().split()
    if len(parts) < 2 or parts[0] != "PC" or len(parts) != int(parts[1]) + 2:
        raise ValueError(f"{path}: expected 'PC <dim> f1 ... f_dim'")
    return np.array([float(x) for x in parts[2:]])
