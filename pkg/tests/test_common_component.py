import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from docembed.common_component import (
    ConvergenceError,
    PrincipalComponent,
    first_principal_component,
    read_component,
    remove_common_component,
    remove_projection,
    write_component,
)
from docembed.embedder import DocEmbedding

from helpers import jacobi_eigh


def as_embeddings(rows):
    return [DocEmbedding(str(i), r.copy(), r.copy()) for i, r in enumerate(np.asarray(rows, float))]


def test_rank_one():
    u = np.array([-0.6, 0.0, 0.8])
    pc = first_principal_component([u, u, u])
    np.testing.assert_allclose(pc.p, -u, atol=1e-12)
    assert pc.p[0] > 0


def test_dominant_axis():
    pc = first_principal_component([[1, 0], [-1, 0], [0, 0.1]])
    np.testing.assert_allclose(pc.p, [1, 0], atol=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_matches_jacobi(seed):
    X = np.random.default_rng(seed).normal(size=(50, 10))
    pc = first_principal_component(X)
    values, vectors = jacobi_eigh(X.T @ X)
    top = vectors[:, np.argmax(values)]
    top = top if top @ pc.p > 0 else -top
    np.testing.assert_allclose(pc.p, top, atol=1e-6)
    assert abs(np.linalg.norm(pc.p) - 1) < 1e-9
    assert pc.iterations_used <= 1000


def test_centered_option():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(40, 5)) + np.array([5.0, 0, 0, 0, 0])
    Xc = X - X.mean(axis=0)
    values, vectors = np.linalg.eigh(Xc.T @ Xc)
    pc = first_principal_component(X, center=True)
    assert abs(abs(pc.p @ vectors[:, -1]) - 1) < 1e-9
    # uncentered, the mean offset dominates
    assert abs(first_principal_component(X).p[0]) > 0.99


def test_restart_when_start_is_a_lesser_eigenvector():
    # column sum is e_2, itself an eigenvector of X^T X with the smaller eigenvalue
    X = np.array([[1.0, 0, 0], [-1.0, 0, 0], [0, 0.3, 0], [0, 0, 0.5], [0, 0, -0.5]])
    np.testing.assert_allclose(first_principal_component(X).p, [1, 0, 0], atol=1e-12)


def test_start_vector_fallback():
    # column sums vanish; start falls back to e_1
    pc = first_principal_component([[1, 0], [-1, 0], [0, 0.5], [0, -0.5]])
    np.testing.assert_allclose(pc.p, [1, 0], atol=1e-12)


def test_input_validation():
    with pytest.raises(ValueError):
        first_principal_component([[1.0, 0.0]])
    with pytest.raises(ValueError):
        first_principal_component([[1.0, np.nan], [0.0, 1.0]])
    with pytest.raises(ValueError):
        first_principal_component(np.zeros((3, 2)))


def test_nonconvergence_reports_residual():
    # an iteration budget far too small to settle
    with pytest.raises(ConvergenceError) as err:
        first_principal_component(np.array([[1.0, 0.2], [0.3, 0.9], [0.1, 0.1]]), max_iter=2)
    assert err.value.residual > 1e-6


def test_remove_examples():
    p = np.array([0.0, 1.0, 0.0])
    pc = PrincipalComponent(p, 1, 0.0)
    q = np.array([1.0, 0.0, 0.0])
    out = remove_common_component(as_embeddings([p, q, (p + q) / np.sqrt(2)]), pc)
    np.testing.assert_array_equal(out[0].unit, 0.0)
    np.testing.assert_array_equal(out[1].unit, q)
    np.testing.assert_allclose(out[2].unit, q / np.sqrt(2), atol=1e-15)
    assert all(e.post_processed for e in out)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        remove_projection(np.ones((2, 3)), np.array([1.0, 0.0]))


unit_rows = arrays(np.float64, st.tuples(st.integers(2, 20), st.integers(1, 8)),
                   elements=st.floats(-1, 1, allow_nan=False)).filter(
    lambda m: np.all(np.linalg.norm(m, axis=1) > 1e-3))


@settings(max_examples=150, deadline=None)
@given(unit_rows, st.integers(0, 2**31))
def test_removal_properties(m, seed):
    U = m / np.linalg.norm(m, axis=1, keepdims=True)
    p = np.random.default_rng(seed).normal(size=U.shape[1])
    p /= np.linalg.norm(p)
    R = remove_projection(U, p)
    assert np.all(np.abs(R @ p) < 1e-6)
    np.testing.assert_allclose(remove_projection(R, p), R, atol=1e-12, rtol=0)
    assert np.all(np.linalg.norm(R, axis=1) <= np.linalg.norm(U, axis=1) + 1e-15)
    np.testing.assert_allclose((U * U).sum(1), (R * R).sum(1) + (U @ p) ** 2, atol=1e-9)
    np.testing.assert_allclose(remove_projection(U, -p), R, atol=1e-15, rtol=0)


def test_component_file(tmp_path):
    pc = PrincipalComponent(np.array([0.6, 0.8]), 3, 1e-10)
    p = tmp_path / "pc.txt"
    with open(p, "w") as fh:
        write_component(pc, fh)
    assert p.read_text().startswith("PC 2 0.6 0.8")
    np.testing.assert_array_equal(read_component(p), pc.p)
