import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from docembed.evaluation import (
    EvalPair,
    UndefinedAUCError,
    all_pairs,
    auc_score,
    cosine_similarity,
    read_pairs,
    roc_auc,
    sample_pairs,
    score_pairs,
    write_pairs,
    write_scored,
)

from helpers import brute_auc


@pytest.mark.parametrize("u,v,expected", [
    ((1, 0), (1, 0), 1.0),
    ((1, 0), (0, 1), 0.0),
    ((1, 1), (1, 0), 1 / math.sqrt(2)),
    ((0, 0), (1, 0), 0.0),
    ((1e-13, 0), (1, 0), 0.0),
])
def test_cosine_examples(u, v, expected):
    assert cosine_similarity(u, v) == pytest.approx(expected, abs=1e-15)


def test_cosine_dimension_mismatch():
    with pytest.raises(ValueError):
        cosine_similarity([1, 0], [1, 0, 0])


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**31), st.floats(1e-3, 1e3), st.floats(1e-3, 1e3))
def test_cosine_symmetric_scale_invariant(seed, alpha, beta):
    u, v = np.random.default_rng(seed).normal(size=(2, 6))
    c = cosine_similarity(u, v)
    assert c == cosine_similarity(v, u)
    assert abs(cosine_similarity(alpha * u, beta * v) - c) < 1e-12


def test_score_pairs_examples():
    emb = {"a": np.array([0.6, 0.8]), "b": np.array([0.6, 0.8]), "c": np.array([1.0, 0.0])}
    scored = score_pairs(emb, [EvalPair("a", "b", 1), EvalPair("a", "zzz", 0), EvalPair("b", "c", 0)])
    assert scored.skipped == 1
    assert [r.score for r in scored.rows] == pytest.approx([1.0, 0.6], abs=1e-15)
    assert score_pairs(emb, [EvalPair("x", "y", 1)]).rows == []


def test_score_pairs_match_oracle():
    rng = np.random.default_rng(8)
    emb = {f"d{i}": rng.normal(size=5) for i in range(6)}
    emb["zero"] = np.zeros(5)
    ids = list(emb)
    pairs = [EvalPair(*rng.choice(ids, 2, replace=False), int(rng.integers(0, 2))) for _ in range(10)]
    scored = score_pairs(emb, pairs)
    for r in scored.rows:
        a, b = emb[r.doc_a], emb[r.doc_b]
        na, nb = math.sqrt(sum(x * x for x in a)), math.sqrt(sum(x * x for x in b))
        expected = 0.0 if min(na, nb) < 1e-12 else sum(x * y for x, y in zip(a, b)) / (na * nb)
        assert abs(r.score - expected) < 1e-12


@pytest.mark.parametrize("scores,labels,expected", [
    ([0.9, 0.8, 0.1], [1, 1, 0], 1.0),
    ([0.5, 0.5], [1, 0], 0.5),
    ([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1], 0.75),
])
def test_auc_examples(scores, labels, expected):
    result = roc_auc(list(zip(scores, labels)))
    assert result.auc == expected
    assert result.positives == sum(labels)


def test_auc_single_class():
    with pytest.raises(UndefinedAUCError):
        roc_auc([(0.1, 1), (0.3, 1)])
    with pytest.raises(UndefinedAUCError):
        roc_auc([(0.1, 0)])


def test_auc_rejects_nan():
    with pytest.raises(ValueError):
        auc_score([np.nan, 1.0], [0, 1])


scores_labels = st.integers(2, 60).flatmap(lambda n: st.tuples(
    st.lists(st.sampled_from([0.0, 0.1, 0.25, 0.5, 0.9, -1.0, 3.0]) | st.floats(-5, 5), min_size=n, max_size=n),
    st.lists(st.integers(0, 1), min_size=n, max_size=n),
)).filter(lambda t: 0 < sum(t[1]) < len(t[1]))


@settings(max_examples=300, deadline=None)
@given(scores_labels)
def test_auc_properties(data):
    scores, labels = data
    auc = auc_score(scores, labels)
    assert auc == brute_auc(scores, labels)
    assert 0.0 <= auc <= 1.0
    # strictly increasing maps that are exact in floating point
    _, inverse = np.unique(scores, return_inverse=True)
    assert auc_score(inverse * 3.7 - 11.0, labels) == auc
    assert auc_score(np.array(scores) * 4.0, labels) == auc
    flipped = auc_score(scores, [1 - y for y in labels])
    assert abs(flipped - (1 - auc)) < 1e-15


def test_auc_result_accounting():
    emb = {"a": np.array([1.0, 0]), "b": np.array([1.0, 0.1]), "c": np.array([0.0, 1])}
    pairs = [EvalPair("a", "b", 1), EvalPair("a", "c", 0), EvalPair("b", "q", 1)]
    result = roc_auc(score_pairs(emb, pairs))
    assert (result.auc, result.positives, result.negatives, result.skipped_pairs) == (1.0, 1, 1, 1)
    assert result.total_pairs == 3


def test_sample_pairs_exhaustive():
    pairs = sample_pairs([("a", 0), ("b", 0), ("c", 0)], 3, seed=1)
    assert [(p.doc_a, p.doc_b, p.label) for p in pairs] == [("a", "b", 1), ("a", "c", 1), ("b", "c", 1)]
    assert sample_pairs([("a", 0), ("b", 1)], 1, seed=0) == [EvalPair("a", "b", 0)]
    assert len(sample_pairs([("a", 0), ("b", 1)], 10, seed=0)) == 1


def test_sample_pairs_deterministic_and_distinct():
    items = [(f"d{i}", i % 4) for i in range(200)]
    a = sample_pairs(items, 500, seed=42)
    assert a == sample_pairs(items, 500, seed=42)
    assert a != sample_pairs(items, 500, seed=43)
    keys = {(p.doc_a, p.doc_b) for p in a}
    assert len(keys) == 500
    idx = {d: i for i, (d, _) in enumerate(items)}
    assert all(idx[p.doc_a] < idx[p.doc_b] for p in a)
    assert all(p.label == int(items[idx[p.doc_a]][1] == items[idx[p.doc_b]][1]) for p in a)


def test_sample_pairs_uniform():
    # every one of the 10 pairs over 5 ids should be drawn about equally often
    items = [(str(i), 0) for i in range(5)]
    counts = {}
    for seed in range(4000):
        for p in sample_pairs(items, 3, seed):
            counts[(p.doc_a, p.doc_b)] = counts.get((p.doc_a, p.doc_b), 0) + 1
    assert len(counts) == 10
    expected = 4000 * 3 / 10
    assert all(abs(c - expected) < 5 * math.sqrt(expected) for c in counts.values())


def test_sample_pairs_errors():
    with pytest.raises(ValueError):
        sample_pairs([("a", 0)], 1, 0)
    with pytest.raises(ValueError):
        sample_pairs([("a", 0), ("b", 0)], 0, 0)


def test_all_pairs_matches_sampling():
    items = [(f"d{i}", i % 3) for i in range(9)]
    assert all_pairs(items) == sample_pairs(items, 10**6, 0)


def test_pair_validation():
    with pytest.raises(ValueError):
        EvalPair("a", "a", 1)
    with pytest.raises(ValueError):
        EvalPair("a", "b", 2)


def test_pair_files(tmp_path):
    p = tmp_path / "pairs.csv"
    with open(p, "w") as fh:
        write_pairs([EvalPair("a", "b", 1), EvalPair("a", "c", 0)], fh)
    pairs = read_pairs(p)
    assert pairs == [EvalPair("a", "b", 1), EvalPair("a", "c", 0)]
    import io

    buf = io.StringIO()
    write_scored(score_pairs({"a": np.array([1.0]), "b": np.array([2.0])}, pairs), buf)
    assert buf.getvalue() == "doc_a,doc_b,label,score\na,b,1,1.0\n"
    bad = tmp_path / "bad.csv"
    bad.write_text("x,y\n")
    with pytest.raises(ValueError):
        read_pairs(bad)
