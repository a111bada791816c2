import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jobskills.centrality import (GLYPHS, LEVELS, centrality, discretize, family_topic_matrix, glyph_row,
                                  normalize, skill_share)

from oracles import band


def test_family_topic_matrix_examples():
    cm = family_topic_matrix(np.array([[0.5, 0.2, 0.1, 0.1, 0.1]]), ["d"], {"d": "F"})
    np.testing.assert_array_equal(cm.A, [[0.5, 0.2, 0.1, 0.1, 0.1]])
    cm = family_topic_matrix(np.array([[1.0, 0.0], [0.0, 1.0]]), ["a", "b"], {"a": "F", "b": "F"})
    np.testing.assert_array_equal(cm.A, [[0.5, 0.5]])
    assert cm.doc_counts == [2]


def test_unmapped_document_and_empty_family():
    with pytest.raises(KeyError):
        family_topic_matrix(np.ones((1, 2)) / 2, ["a"], {})
    cm = family_topic_matrix(np.ones((1, 2)) / 2, ["a"], {"a": "F"}, family_order=["E", "F"])
    assert cm.families == ["F"] and cm.warnings


def test_normalize_examples():
    np.testing.assert_allclose(normalize([[0.5, 0.2, 0.1, 0.1, 0.1]]), [[2.5, 1.0, 0.5, 0.5, 0.5]], atol=1e-12)
    np.testing.assert_array_equal(normalize(np.full((1, 4), 0.25)), np.ones((1, 4)))
    np.testing.assert_array_equal(normalize([[0.3], [1.0]]), [[1.0], [1.0]])
    with pytest.raises(ValueError):
        normalize([[0.0, 0.0]])


def test_discretize_examples():
    assert discretize([[0.25]]) == [["not_central"]]
    assert discretize([[2.5, 1.0, 0.5, 0.5, 0.5]]) == [["highly_central"] * 2 + ["slightly_central"] * 3]
    assert discretize(np.ones((2, 3))) == [["highly_central"] * 3] * 2
    with pytest.raises(ValueError):
        discretize([[-0.1]])


def test_rounding_at_a_bound_stays_in_the_lower_band():
    cm = centrality(np.array([[0.5, 0.2, 0.1, 0.1, 0.1]]), ["d"], {"d": "F"})
    assert cm.levels == [["highly_central"] * 2 + ["slightly_central"] * 3]
    assert discretize([[0.75 + 1e-9]]) == [["highly_central"]]


def test_glyph_encoding():
    assert glyph_row(["moderately_central"] + ["not_central"] * 4) == "■■■□ □□□□ □□□□ □□□□ □□□□"
    assert set(GLYPHS) == set(LEVELS)


def test_discretize_matches_bruteforce_bands():
    rng = np.random.default_rng(0)
    vals = np.concatenate([rng.uniform(0, 3, 10_000 - 6), [0.25, 0.5, 0.75, 0.0, 0.7500000001, 0.2499999999]])
    got = discretize(vals.reshape(100, 100))
    assert [x for row in got for x in row] == [band(v) for v in vals]


probability_rows = st.integers(1, 6).flatmap(
    lambda K: st.lists(st.lists(st.floats(0.01, 1.0), min_size=K, max_size=K), min_size=1, max_size=8))


@settings(max_examples=150, deadline=None)
@given(probability_rows, st.floats(0.1, 10.0))
def test_centrality_algebra(rows, scale):
    theta = np.array(rows)
    theta /= theta.sum(axis=1, keepdims=True)
    ids = [str(i) for i in range(len(theta))]
    fam = {d: "F" if i % 2 else "G" for i, d in enumerate(ids)}
    cm = centrality(theta, ids, fam)
    K = theta.shape[1]
    np.testing.assert_allclose(cm.A.sum(axis=1), 1.0, atol=1e-6)
    assert np.all(np.abs(cm.A_hat - K * cm.A) <= 1e-9)
    assert np.all(np.abs(cm.A_hat.mean(axis=1) - 1.0) <= 1e-9)
    # row scaling cancels in the normalized matrix
    assert discretize(normalize(cm.A * scale)) == cm.levels


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 3), st.floats(0, 1))
def test_levels_monotone(x, bump):
    assert LEVELS.index(discretize([[x + bump]])[0][0]) >= LEVELS.index(discretize([[x]])[0][0])


def test_skill_share_examples():
    fam = {"a": "F", "b": "F", "c": "G", "d": "G"}
    names, shares, counts = skill_share(fam, {"a": 0, "b": 0, "c": 0, "d": 1}, 5)
    np.testing.assert_array_equal(shares[0], [1, 0, 0, 0, 0])
    np.testing.assert_array_equal(shares[1], [0.5, 0.5, 0, 0, 0])
    assert names == ["F", "G"] and counts == [2, 2]


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.sampled_from("FGH"), st.integers(0, 3)), min_size=1, max_size=40))
def test_skill_share_rows_and_global_totals(items):
    fam = {str(i): f for i, (f, _) in enumerate(items)}
    dom = {str(i): k for i, (_, k) in enumerate(items)}
    names, shares, counts = skill_share(fam, dom, 4)
    np.testing.assert_allclose(shares.sum(axis=1), 1.0, atol=1e-9)
    total = (shares * np.array(counts)[:, None]).sum(axis=0)
    np.testing.assert_allclose(total, np.bincount(list(dom.values()), minlength=4), atol=1e-9)
