import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jobskills.fixtures import planted_two_topics, separable_corpus
from jobskills.svm import (SvmConfig, SvmModel, cross_validate, fold_metrics, load_svm, predict, save_svm,
                           stratified_folds, train_svm)
from jobskills.text import SparseVector, fit_tfidf, vectorize


def vectors(docs):
    m = fit_tfidf(docs)
    return [vectorize(m, d) for d in docs]


@pytest.fixture(scope="module")
def toy():
    docs, labels, _ = planted_two_topics(n_per_topic=20, vocab_size=10, doc_len=8, seed=4)
    return vectors(docs), [f"c{l}" for l in labels]


def test_separable_toy_set_is_fit_perfectly(toy):
    X, y = toy
    model = train_svm(X, y)
    assert [predict(model, v)[0] for v in X] == y
    assert np.all(np.isfinite(model.weights))


def test_objective_of_kept_iterate_never_rises(toy):
    X, y = toy
    model = train_svm(X, y, SvmConfig(epochs=30))
    kept = model.retained_objective
    assert np.all(np.diff(kept, axis=1) <= 1e-6)


def test_input_errors(toy):
    X, y = toy
    with pytest.raises(ValueError, match="degenerate label set"):
        train_svm(X, ["c0"] * len(X))
    with pytest.raises(ValueError, match="mismatch"):
        train_svm(X, y[:-1])
    with pytest.raises(ValueError, match="at least 2 examples"):
        train_svm(X[:3], ["a", "a", "b"])


def test_same_seed_same_weights(toy):
    X, y = toy
    a, b = train_svm(X, y, SvmConfig(seed=3)), train_svm(X, y, SvmConfig(seed=3))
    assert a.weights.tobytes() == b.weights.tobytes() and a.bias.tobytes() == b.bias.tobytes()


def test_zero_vector_goes_to_largest_bias():
    model = SvmModel(["a", "b"], np.zeros((2, 3)), np.array([-0.2, -0.5]), SvmConfig())
    assert predict(model, SparseVector.zero(3)) == ("a", pytest.approx(-0.2))


def test_predict_is_pure(toy):
    X, y = toy
    model = train_svm(X, y)
    v = X[5]
    first = predict(model, v)
    assert all(predict(model, v) == first for _ in range(5))
    assert first[0] == model.classes[int(np.argmax(model.weights[:, v.indices] @ v.weights + model.bias))]


def test_round_trip(tmp_path, toy):
    X, y = toy
    model = train_svm(X, y)
    save_svm(model, tmp_path / "m.flat")
    back = load_svm(tmp_path / "m.flat")
    assert back.classes == model.classes
    assert back.weights.tobytes() == model.weights.tobytes()
    assert back.bias.tobytes() == model.bias.tobytes()


def test_cv_on_separable_corpus():
    docs, labels = separable_corpus(n_classes=4, per_class=15, seed=2)
    cv = cross_validate(vectors(docs), labels, k=5)
    assert cv.accuracy == 1.0 and cv.false_positive_rate == 0.0
    assert all(f["accuracy"] == 1.0 and f["false_positive_rate"] == 0.0 for f in cv.per_fold)
    assert cv.accuracy == np.mean([f["accuracy"] for f in cv.per_fold])
    assert cv.confusion.sum() == len(labels)
    assert sum(f["n"] for f in cv.per_fold) == len(labels)


def test_cv_on_random_labels_is_near_chance():
    v = SparseVector.from_dense([1.0, 0.0])
    accs = []
    for seed in range(20):
        rng = np.random.default_rng(seed)
        labels = list(rng.choice(["a", "b"], 40))
        if min(labels.count("a"), labels.count("b")) < 5:
            continue
        accs.append(cross_validate([v] * 40, labels, k=5, cfg=SvmConfig(seed=seed)).accuracy)
    assert abs(np.mean(accs) - 0.5) <= 0.1


def test_cv_errors_and_warnings():
    docs, labels = separable_corpus(n_classes=2, per_class=4, seed=1)
    X = vectors(docs)
    with pytest.raises(ValueError):
        cross_validate(X, labels, k=1)
    with pytest.raises(ValueError):
        cross_validate(X[:3], labels[:3], k=5)
    cv = cross_validate(X, labels, k=5)
    assert any("best-effort" in w for w in cv.warnings)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.sampled_from("abcd"), min_size=5, max_size=40), st.integers(2, 5), st.integers(0, 99))
def test_folds_partition(labels, k, seed):
    folds = stratified_folds(labels, k, seed)
    assert folds.shape == (len(labels),)
    assert set(folds.tolist()) <= set(range(k))
    # each class is spread as evenly as possible
    for c in set(labels):
        counts = np.bincount(folds[[i for i, l in enumerate(labels) if l == c]], minlength=k)
        assert counts.max() - counts.min() <= 1


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.sampled_from("abc"), st.sampled_from("abc")), min_size=1, max_size=30))
def test_metric_bounds(pairs):
    t, p = zip(*pairs)
    m = fold_metrics(t, p, ["a", "b", "c"])
    for key in ("accuracy", "macro_precision", "false_positive_rate"):
        assert 0.0 <= m[key] <= 1.0
