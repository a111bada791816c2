"""One-vs-rest linear SVM trained by primal stochastic subgradient descent.

Each binary problem minimizes ``lam/2 |w|^2 + mean(hinge)`` with step size
``1/(lam t)`` and ``lam = 1/(C n)``. The bias is an extra constant feature
(so it is regularized along with the weights). Subgradient steps are not
guaranteed to descend, so the iterate with the lowest end-of-epoch objective
is the one kept.
"""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from numba import njit

from .flatfile import read_flat, write_flat
from .seeding import derive_seed
from .text import SparseVector, TfIdfModel, TokenPipelineConfig, to_csr, tokenize_normalize, vectorize

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1


@dataclass(frozen=True)
class SvmConfig:
    C: float = 1.0
    epochs: int = 20
    seed: int = 0

    def __post_init__(self):
        if not self.C > 0:
            raise ValueError("C must be positive")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")


@dataclass
class SvmModel:
    classes: list[str]
    weights: np.ndarray  # (n_classes, V)
    bias: np.ndarray  # (n_classes,)
    config: SvmConfig
    objective: np.ndarray = field(default=None, repr=False)  # (n_classes, epochs), raw iterates

    @property
    def retained_objective(self) -> np.ndarray:
        """Objective of the kept iterate after each epoch (running minimum)."""
        return np.minimum.accumulate(self.objective, axis=1)

    @property
    def n_features(self) -> int:
        return self.weights.shape[1]

    def scores(self, v: SparseVector) -> np.ndarray:
        return self.weights[:, v.indices] @ v.weights + self.bias


@njit(cache=True)
def _pegasos(indptr, indices, data, y, perms, lam, n_features):
    n = y.shape[0]
    u = np.zeros(n_features)
    ub = 0.0
    a = 1.0
    t = 0
    epochs = perms.shape[0]
    objective = np.empty(epochs)
    best = np.inf
    best_w = np.zeros(n_features)
    best_b = 0.0
    for e in range(epochs):
        for k in range(n):
            i = perms[e, k]
            t += 1
            eta = 1.0 / (lam * t)
            s = ub
            for p in range(indptr[i], indptr[i + 1]):
                s += u[indices[p]] * data[p]
            margin = y[i] * a * s
            a *= 1.0 - 1.0 / t
            if a == 0.0:
                u[:] = 0.0
                ub = 0.0
                a = 1.0
            elif a < 1e-9:
                u *= a
                ub *= a
                a = 1.0
            if margin < 1.0:
                step = eta * y[i] / a
                for p in range(indptr[i], indptr[i + 1]):
                    u[indices[p]] += step * data[p]
                ub += step
        # objective at the end of the epoch
        sq = ub * ub
        for j in range(n_features):
            sq += u[j] * u[j]
        hinge = 0.0
        for i in range(n):
            s = ub
            for p in range(indptr[i], indptr[i + 1]):
                s += u[indices[p]] * data[p]
            m = 1.0 - y[i] * a * s
            if m > 0.0:
                hinge += m
        objective[e] = 0.5 * lam * a * a * sq + hinge / n
        if objective[e] < best:
            best = objective[e]
            best_w[:] = u * a
            best_b = ub * a
    return best_w, best_b, objective


def _check_inputs(vectors, labels):
    if len(vectors) != len(labels):
        raise ValueError(f"length mismatch: {len(vectors)} vectors, {len(labels)} labels")
    if len(set(labels)) < 2:
        raise ValueError("degenerate label set: need at least two classes")


def _fit(vectors: Sequence[SparseVector], labels: Sequence[str], cfg: SvmConfig,
         n_features: int | None = None) -> SvmModel:
    classes = sorted(set(labels))
    n = len(labels)
    V = n_features if n_features is not None else vectors[0].dim
    X = to_csr(vectors, V)
    indptr, indices, data = X.indptr.astype(np.int64), X.indices.astype(np.int64), X.data
    lab = np.array([classes.index(l) for l in labels]) if n else np.zeros(0, int)
    lam = 1.0 / (cfg.C * n)
    W = np.zeros((len(classes), V))
    b = np.zeros(len(classes))
    obj = np.zeros((len(classes), cfg.epochs))
    for c in range(len(classes)):
        rng = np.random.default_rng(derive_seed(cfg.seed, c))
        perms = np.stack([rng.permutation(n) for _ in range(cfg.epochs)]).astype(np.int64)
        y = np.where(lab == c, 1.0, -1.0)
        W[c], b[c], obj[c] = _pegasos(indptr, indices, data, y, perms, lam, V)
    return SvmModel(classes, W, b, cfg, obj)


def train_svm(vectors: Sequence[SparseVector], labels: Sequence[str], cfg: SvmConfig | None = None) -> SvmModel:
    cfg = cfg or SvmConfig()
    _check_inputs(vectors, labels)
    counts = {l: labels.count(l) for l in set(labels)}
    thin = sorted(l for l, c in counts.items() if c < 2)
    if thin:
        raise ValueError(f"every class needs at least 2 examples; too few for: {', '.join(thin)}")
    return _fit(vectors, list(labels), cfg)


def predict(model: SvmModel, v: SparseVector) -> tuple[str, float]:
    """Highest-scoring class and its score; ties go to the earlier class."""
    if v.is_zero:
        logger.warning("predicting a zero vector: decided by the biases alone")
    s = model.scores(v)
    k = int(np.argmax(s))
    return model.classes[k], float(s[k])


def save_svm(model: SvmModel, path: str | Path) -> None:
    write_flat(path, "svm", FORMAT_VERSION,
               {"classes": model.classes, "V": model.n_features, "config": asdict(model.config)},
               {"weights": model.weights, "bias": model.bias})


def load_svm(path: str | Path) -> SvmModel:
    head, arrays = read_flat(path, "svm")
    if head["version"] != FORMAT_VERSION:
        raise ValueError(f"unsupported svm file version {head['version']}")
    return SvmModel(list(head["classes"]), arrays["weights"], arrays["bias"], SvmConfig(**head["config"]))


@dataclass
class TextClassifier:
    """TF-IDF description vectors feeding an :class:`SvmModel`."""

    tfidf: TfIdfModel
    svm: SvmModel
    token_cfg: TokenPipelineConfig | None = None

    def predict_text(self, text: str) -> tuple[str, float]:
        return predict(self.svm, vectorize(self.tfidf, tokenize_normalize(text, self.token_cfg)))


# ---------------------------------------------------------------------------
# cross-validation


@dataclass
class CvMetrics:
    accuracy: float
    macro_precision: float
    false_positive_rate: float
    per_fold: list[dict]
    classes: list[str]
    confusion: np.ndarray  # rows true, columns predicted; summed over folds
    fold_of: np.ndarray
    warnings: list[str] = field(default_factory=list)


def stratified_folds(labels: Sequence[str], k: int, seed: int) -> np.ndarray:
    """Fold index per sample; each class is spread round-robin over the folds."""
    rng = np.random.default_rng(derive_seed(seed, 10_000))
    labels = list(labels)
    fold_of = np.empty(len(labels), dtype=np.int64)
    start = 0
    for cls in sorted(set(labels)):
        idx = np.array([i for i, l in enumerate(labels) if l == cls])
        idx = idx[rng.permutation(len(idx))]
        fold_of[idx] = (start + np.arange(len(idx))) % k
        start = (start + len(idx)) % k
    return fold_of


def fold_metrics(y_true: Sequence[str], y_pred: Sequence[str], classes: Sequence[str]) -> dict:
    n = len(y_true)
    tp = {c: 0 for c in classes}
    fp = {c: 0 for c in classes}
    fn = {c: 0 for c in classes}
    for t, p in zip(y_true, y_pred):
        if t == p:
            tp[t] += 1
        else:
            fp[p] += 1
            fn[t] += 1
    precisions, empty = [], []
    for c in classes:
        if tp[c] + fp[c] == 0:
            precisions.append(1.0)
            empty.append(c)
        else:
            precisions.append(tp[c] / (tp[c] + fp[c]))
    fp_total = sum(fp.values())
    tn_total = sum(n - tp[c] - fp[c] - fn[c] for c in classes)
    return {
        "n": n,
        "accuracy": sum(tp.values()) / n if n else 0.0,
        "macro_precision": float(np.mean(precisions)) if precisions else 1.0,
        "false_positive_rate": fp_total / (fp_total + tn_total) if fp_total + tn_total else 0.0,
        "classes_without_predictions": empty,
    }


def cross_validate(vectors: Sequence[SparseVector], labels: Sequence[str], k: int = 5,
                   cfg: SvmConfig | None = None) -> CvMetrics:
    """Stratified k-fold CV; aggregate metrics are the means over folds.

    The false-positive rate pools one-vs-rest counts over classes:
    ``sum FP / (sum FP + sum TN)``.
    """
    cfg = cfg or SvmConfig()
    if k < 2:
        raise ValueError("k must be at least 2")
    if len(labels) < k:
        raise ValueError(f"{len(labels)} samples cannot fill {k} folds")
    _check_inputs(vectors, labels)
    labels = list(labels)
    classes = sorted(set(labels))
    warnings = []
    counts = {c: labels.count(c) for c in classes}
    for c in classes:
        if counts[c] < k:
            warnings.append(f"class {c} has {counts[c]} < {k} examples; folds are best-effort")
    fold_of = stratified_folds(labels, k, cfg.seed)
    V = vectors[0].dim
    pos = {c: i for i, c in enumerate(classes)}
    confusion = np.zeros((len(classes), len(classes)), dtype=np.int64)
    per_fold = []
    for f in range(k):
        train = np.flatnonzero(fold_of != f)
        test = np.flatnonzero(fold_of == f)
        train_labels = [labels[i] for i in train]
        if len(set(train_labels)) < 2:
            raise ValueError(f"fold {f}: training split has a single class")
        fold_cfg = SvmConfig(cfg.C, cfg.epochs, derive_seed(cfg.seed, 20_000 + f))
        model = _fit([vectors[i] for i in train], train_labels, fold_cfg, V)
        y_true = [labels[i] for i in test]
        y_pred = [predict(model, vectors[i])[0] for i in test]
        for t, p in zip(y_true, y_pred):
            confusion[pos[t], pos[p]] += 1
        m = fold_metrics(y_true, y_pred, classes)
        if m["classes_without_predictions"]:
            warnings.append(f"fold {f}: {len(m['classes_without_predictions'])} classes never predicted "
                            "(precision counted as 1)")
        m["fold"] = f
        per_fold.append(m)
    for w in warnings:
        logger.warning(w)
    return CvMetrics(
        accuracy=float(np.mean([m["accuracy"] for m in per_fold])),
        macro_precision=float(np.mean([m["macro_precision"] for m in per_fold])),
        false_positive_rate=float(np.mean([m["false_positive_rate"] for m in per_fold])),
        per_fold=per_fold, classes=classes, confusion=confusion, fold_of=fold_of, warnings=warnings,
    )
