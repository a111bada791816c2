"""Slow, obviously-correct reference implementations used as test oracles.

Nothing here imports the package's numeric kernels.
"""
from __future__ import annotations

import math
from collections import Counter

import numpy as np


def levenshtein_dp(a: str, b: str) -> int:
    """Full (len(a)+1) x (len(b)+1) dynamic-programming table."""
    D = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(len(a) + 1):
        D[i][0] = i
    for j in range(len(b) + 1):
        D[0][j] = j
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            D[i][j] = min(D[i - 1][j] + 1, D[i][j - 1] + 1, D[i - 1][j - 1] + (a[i - 1] != b[j - 1]))
    return D[len(a)][len(b)]


def partial_ratio_windows(a: str, b: str) -> float:
    """Lowercase, collapse whitespace, then try every window of the longer string."""
    a = " ".join(a.lower().split())
    b = " ".join(b.lower().split())
    s, t = (a, b) if len(a) <= len(b) else (b, a)
    m = len(s)
    if m == 0:
        return 1.0 if len(t) == 0 else 0.0
    windows = [t[i:i + m] for i in range(len(t) - m + 1)] or [t]
    return max(1.0 - levenshtein_dp(s, w) / m for w in windows)


def tfidf_dense(docs: list[list[str]]):
    """Dense smoothed TF-IDF matrix with rows L2-normalized; returns (vocab, X)."""
    vocab = sorted({t for d in docs for t in d})
    N = len(docs)
    df = Counter(t for d in docs for t in set(d))
    idf = np.array([math.log((1 + N) / (1 + df[t])) + 1 for t in vocab])
    X = np.zeros((N, len(vocab)))
    col = {t: j for j, t in enumerate(vocab)}
    for i, d in enumerate(docs):
        for t, c in Counter(d).items():
            X[i, col[t]] = c * idf[col[t]]
        n = np.linalg.norm(X[i])
        if n > 0:
            X[i] /= n
    return vocab, X


def cosine_all_pairs(X: np.ndarray) -> np.ndarray:
    n = X.shape[0]
    S = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            ni, nj = np.linalg.norm(X[i]), np.linalg.norm(X[j])
            S[i, j] = X[i] @ X[j] / (ni * nj) if ni > 0 and nj > 0 else 0.0
    return S


def gibbs_sweep_python(doc_index, words, z, n_dk, n_kw, n_k, alpha, beta, uniforms):
    """Textbook collapsed Gibbs pass, written out with Python scalars."""
    K, V = n_kw.shape
    for i in range(len(words)):
        d, w, k = int(doc_index[i]), int(words[i]), int(z[i])
        n_dk[d, k] -= 1
        n_kw[k, w] -= 1
        n_k[k] -= 1
        weights = [(n_dk[d, j] + alpha) * (n_kw[j, w] + beta) / (n_k[j] + V * beta) for j in range(K)]
        target = uniforms[i] * sum(weights)
        acc, new = 0.0, K - 1
        for j, wt in enumerate(weights):
            acc += wt
            if target < acc:
                new = j
                break
        z[i] = new
        n_dk[d, new] += 1
        n_kw[new, w] += 1
        n_k[new] += 1


def band(x: float) -> str:
    if x <= 0.25:
        return "not_central"
    if x <= 0.5:
        return "slightly_central"
    if x <= 0.75:
        return "moderately_central"
    return "highly_central"


def umass(top_words: list[list[str]], docs: list[list[str]]) -> float:
    """Mean over topics of sum_{i<j} log((D(wi, wj) + 1) / D(wj))."""
    sets = [set(d) for d in docs]
    scores = []
    for words in top_words:
        s = 0.0
        for j in range(1, len(words)):
            for i in range(j):
                dj = sum(words[j] in d for d in sets)
                if dj == 0:
                    continue
                dij = sum(words[i] in d and words[j] in d for d in sets)
                s += math.log((dij + 1) / dj)
        scores.append(s)
    return float(np.mean(scores))


def unigram_perplexity(docs: list[list[str]], beta: float) -> float:
    """exp of the cross-entropy of the corpus under beta-smoothed unigram frequencies."""
    counts = Counter(t for d in docs for t in d)
    V = len(counts)
    N = sum(counts.values())
    ll = sum(c * math.log((c + beta) / (N + V * beta)) for c in counts.values())
    return math.exp(-ll / N)
