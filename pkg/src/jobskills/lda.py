"""Skill-set topics: anchor-term context windows and LDA by collapsed Gibbs sampling.

Model selection uses UMass coherence and perplexity over a hyperparameter
grid. All randomness flows from an explicit seed; the sampler consumes
pre-drawn uniforms, so a run is reproducible bit for bit.
"""
from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from numba import njit

from .flatfile import read_flat, write_flat
from .ingest import JobPosting
from .seeding import derive_seed
from .text import TokenPipelineConfig, raw_words, split_sentences, tokenize_normalize

logger = logging.getLogger(__name__)

DEFAULT_ANCHORS = ("chatgpt", "chat gpt", "gpt-4", "gpt-3.5")
FORMAT_VERSION = 1


@dataclass(frozen=True)
class ContextDoc:
    posting_id: str
    sentences: tuple[str, ...]
    tokens: tuple[str, ...]


def _anchor_regex(anchors: Iterable[str]) -> re.Pattern:
    alts = sorted((re.escape(a.strip()).replace(r"\ ", r"\s+") for a in anchors), key=len, reverse=True)
    return re.compile(r"(?<!\w)(?:" + "|".join(alts) + r")(?!\w)", re.IGNORECASE)


def anchor_tokens(anchors: Iterable[str]) -> frozenset[str]:
    return frozenset(w for a in anchors for w in raw_words(a))


def extract_context(posting: JobPosting, anchor_terms: Iterable[str] = DEFAULT_ANCHORS, window: int = 1,
                    cfg: TokenPipelineConfig | None = None) -> ContextDoc | None:
    """Sentences that mention an anchor plus ``window`` neighbours on each side.

    Overlapping windows are merged and order is kept. The anchor words
    themselves are dropped from the tokens since every context has them.
    """
    anchor_terms = tuple(anchor_terms)
    if not anchor_terms:
        raise ValueError("anchor_terms must be non-empty")
    if window < 0:
        raise ValueError("window must be >= 0")
    pat = _anchor_regex(anchor_terms)
    sents = split_sentences(posting.description)
    hits = [i for i, s in enumerate(sents) if pat.search(s)]
    if not hits:
        return None
    keep = sorted({j for i in hits for j in range(max(0, i - window), min(len(sents), i + window + 1))})
    chosen = tuple(sents[j] for j in keep)
    drop = anchor_tokens(anchor_terms)
    tokens = tuple(t for t in tokenize_normalize(" ".join(chosen), cfg) if t not in drop)
    return ContextDoc(posting.id, chosen, tokens)


# ---------------------------------------------------------------------------
# corpus encoding


@dataclass
class EncodedCorpus:
    vocab: list[str]
    doc_index: np.ndarray  # token -> document
    words: np.ndarray  # token -> vocabulary index
    doc_lengths: np.ndarray

    @property
    def n_docs(self) -> int:
        return len(self.doc_lengths)


def _token_lists(docs) -> list[Sequence[str]]:
    return [d.tokens if isinstance(d, ContextDoc) else d for d in docs]


def encode(docs, vocab: Sequence[str] | None = None) -> EncodedCorpus:
    """Integer-encode token lists; tokens outside a given ``vocab`` are dropped."""
    lists = _token_lists(docs)
    if vocab is None:
        vocab = sorted({t for doc in lists for t in doc})
    index = {t: i for i, t in enumerate(vocab)}
    dropped = 0
    d_idx, w_idx, lengths = [], [], []
    for d, doc in enumerate(lists):
        ids = [index[t] for t in doc if t in index]
        dropped += len(doc) - len(ids)
        d_idx.extend([d] * len(ids))
        w_idx.extend(ids)
        lengths.append(len(ids))
    if dropped:
        logger.warning("dropped %d out-of-vocabulary tokens", dropped)
    return EncodedCorpus(list(vocab), np.array(d_idx, dtype=np.int64), np.array(w_idx, dtype=np.int64),
                         np.array(lengths, dtype=np.int64))


# ---------------------------------------------------------------------------
# sampler


@njit(cache=True)
def gibbs_sweep(doc_index, words, z, n_dk, n_kw, n_k, alpha, beta, uniforms):
    """One pass over all tokens, resampling each topic assignment in place."""
    K = n_k.shape[0]
    V = n_kw.shape[1]
    vbeta = V * beta
    p = np.empty(K)
    for i in range(words.shape[0]):
        d = doc_index[i]
        w = words[i]
        k = z[i]
        n_dk[d, k] -= 1
        n_kw[k, w] -= 1
        n_k[k] -= 1
        total = 0.0
        for j in range(K):
            total += (n_dk[d, j] + alpha) * (n_kw[j, w] + beta) / (n_k[j] + vbeta)
            p[j] = total
        u = uniforms[i] * total
        k = K - 1
        for j in range(K):
            if u < p[j]:
                k = j
                break
        z[i] = k
        n_dk[d, k] += 1
        n_kw[k, w] += 1
        n_k[k] += 1


@njit(cache=True)
def _log_likelihood(doc_index, words, theta, phi):
    ll = 0.0
    K = phi.shape[0]
    for i in range(words.shape[0]):
        s = 0.0
        for k in range(K):
            s += theta[doc_index[i], k] * phi[k, words[i]]
        ll += math.log(s)
    return ll


@njit(cache=True)
def _fold_in_sweep(doc_index, words, z, n_dk, phi, alpha, uniforms):
    K = phi.shape[0]
    p = np.empty(K)
    for i in range(words.shape[0]):
        d = doc_index[i]
        n_dk[d, z[i]] -= 1
        total = 0.0
        for j in range(K):
            total += (n_dk[d, j] + alpha) * phi[j, words[i]]
            p[j] = total
        u = uniforms[i] * total
        k = K - 1
        for j in range(K):
            if u < p[j]:
                k = j
                break
        z[i] = k
        n_dk[d, k] += 1


def _theta_from_counts(n_dk, lengths, alpha):
    K = n_dk.shape[1]
    return (n_dk + alpha) / (lengths[:, None] + K * alpha)


def _phi_from_counts(n_kw, n_k, beta):
    V = n_kw.shape[1]
    return (n_kw + beta) / (n_k[:, None] + V * beta)


@dataclass
class LdaModel:
    K: int
    alpha: float
    beta: float
    phi: np.ndarray  # K x V
    theta: np.ndarray  # D x K
    vocab: list[str]
    seed: int
    iterations: int
    burn_in: int
    thin: int = 10
    doc_ids: list[str] = field(default_factory=list)
    perplexity_trace: np.ndarray = field(default=None, repr=False)

    @property
    def V(self) -> int:
        return len(self.vocab)

    def dominant_topics(self) -> np.ndarray:
        return np.argmax(self.theta, axis=1)

    def relabel(self, order: Sequence[int]) -> "LdaModel":
        """Model with topics permuted so new topic ``i`` is old topic ``order[i]``."""
        order = list(order)
        return LdaModel(self.K, self.alpha, self.beta, self.phi[order].copy(), self.theta[:, order].copy(),
                        list(self.vocab), self.seed, self.iterations, self.burn_in, self.thin,
                        list(self.doc_ids), self.perplexity_trace)


def _run_chain(corpus: EncodedCorpus, K: int, alpha: float, beta: float, iterations: int, burn_in: int,
               thin: int, rng: np.random.Generator, check_counts: bool):
    D, V, N = corpus.n_docs, len(corpus.vocab), len(corpus.words)
    z = rng.integers(0, K, size=N).astype(np.int64)
    n_dk = np.zeros((D, K), dtype=np.int64)
    n_kw = np.zeros((K, V), dtype=np.int64)
    np.add.at(n_dk, (corpus.doc_index, z), 1)
    np.add.at(n_kw, (z, corpus.words), 1)
    n_k = n_kw.sum(axis=1)

    sum_dk = np.zeros((D, K))
    sum_kw = np.zeros((K, V))
    kept = 0
    trace = np.empty(iterations)
    for sweep in range(1, iterations + 1):
        gibbs_sweep(corpus.doc_index, corpus.words, z, n_dk, n_kw, n_k, alpha, beta, rng.random(N))
        if check_counts:
            assert np.array_equal(n_dk.sum(axis=1), corpus.doc_lengths)
            assert np.array_equal(n_kw.sum(axis=1), n_k)
            assert (n_dk >= 0).all() and (n_kw >= 0).all()
        th = _theta_from_counts(n_dk, corpus.doc_lengths, alpha)
        ph = _phi_from_counts(n_kw, n_k, beta)
        trace[sweep - 1] = math.exp(-_log_likelihood(corpus.doc_index, corpus.words, th, ph) / N) if N else np.nan
        if sweep > burn_in and (sweep - burn_in) % thin == 0:
            sum_dk += n_dk
            sum_kw += n_kw
            kept += 1
    if kept:
        mean_dk, mean_kw = sum_dk / kept, sum_kw / kept
    else:
        mean_dk, mean_kw = n_dk.astype(float), n_kw.astype(float)
    theta = _theta_from_counts(mean_dk, corpus.doc_lengths, alpha)
    phi = _phi_from_counts(mean_kw, mean_kw.sum(axis=1), beta)
    ppl = math.exp(-_log_likelihood(corpus.doc_index, corpus.words, theta, phi) / N) if N else np.nan
    return theta, phi, trace, ppl


def fit_lda(contexts, K: int, alpha: float | None = None, beta: float = 0.01, iterations: int = 1000,
            burn_in: int = 500, seed: int = 0, thin: int = 10, check_counts: bool = False,
            restarts: int = 1) -> LdaModel:
    """Collapsed Gibbs sampling for LDA with symmetric priors.

    ``alpha`` defaults to ``50/K``. Counts from every ``thin``-th sweep after
    ``burn_in`` are averaged (the final state when none qualify), then
    ``theta = (n_dk + alpha) / (N_d + K alpha)`` and
    ``phi = (n_kw + beta) / (n_k + V beta)``.

    With ``restarts > 1`` independent chains are run (the first seeded with
    ``seed`` itself) and the one with the lowest training perplexity is kept;
    single chains regularly stall with two topics merged and another split.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    alpha = 50.0 / K if alpha is None else float(alpha)
    if alpha <= 0 or beta <= 0:
        raise ValueError("priors must be positive")
    if iterations < 1 or burn_in < 0 or thin < 1 or restarts < 1:
        raise ValueError("iterations >= 1, burn_in >= 0, thin >= 1 and restarts >= 1 required")
    docs = list(contexts)
    corpus = encode(docs)
    if not corpus.vocab:
        raise ValueError("empty vocabulary")
    if K > corpus.n_docs:
        raise ValueError(f"K={K} exceeds the number of documents ({corpus.n_docs})")

    best = None
    for r in range(restarts):
        rng = np.random.default_rng(seed if r == 0 else derive_seed(seed, r))
        chain = _run_chain(corpus, K, alpha, beta, iterations, burn_in, thin, rng, check_counts)
        logger.debug("lda K=%d chain %d: perplexity %.4f", K, r, chain[3])
        if best is None or chain[3] < best[3]:
            best = chain
    theta, phi, trace, _ = best
    ids = [d.posting_id if isinstance(d, ContextDoc) else str(i) for i, d in enumerate(docs)]
    return LdaModel(K, alpha, beta, phi, theta, corpus.vocab, seed, iterations, burn_in, thin, ids, trace)


def infer_theta(model: LdaModel, docs, iterations: int = 50, seed: int = 0) -> np.ndarray:
    """Document-topic rows for unseen documents, sampling with ``phi`` held fixed."""
    corpus = encode(docs, model.vocab)
    rng = np.random.default_rng(seed)
    N = len(corpus.words)
    z = rng.integers(0, model.K, size=N).astype(np.int64)
    n_dk = np.zeros((corpus.n_docs, model.K), dtype=np.int64)
    np.add.at(n_dk, (corpus.doc_index, z), 1)
    total = np.zeros((corpus.n_docs, model.K))
    half = iterations // 2
    for it in range(iterations):
        _fold_in_sweep(corpus.doc_index, corpus.words, z, n_dk, model.phi, model.alpha, rng.random(N))
        if it >= half:
            total += n_dk
    return _theta_from_counts(total / (iterations - half), corpus.doc_lengths, model.alpha)


def perplexity(model: LdaModel, corpus, theta: np.ndarray | None = None) -> float:
    """``exp(-sum log sum_k theta_dk phi_kw / n_tokens)`` over ``corpus``.

    ``corpus`` must line up row for row with ``theta`` (the model's own
    training rows unless ``theta`` is given). Unknown words are dropped.
    """
    enc = encode(corpus, model.vocab)
    theta = model.theta if theta is None else theta
    if enc.n_docs != theta.shape[0]:
        raise ValueError("corpus does not line up with the document-topic rows")
    if len(enc.words) == 0:
        raise ValueError("no tokens to score")
    ll = _log_likelihood(enc.doc_index, enc.words, theta, model.phi)
    return math.exp(-ll / len(enc.words))


def top_word_indices(phi_row: np.ndarray, n: int) -> np.ndarray:
    # stable sort: equal probabilities keep vocabulary order
    return np.argsort(-phi_row, kind="stable")[:n]


def coherence_umass(model: LdaModel, corpus, top_n: int = 10, per_topic: bool = False):
    """Mean over topics of ``sum log((D(w_i, w_j) + 1) / D(w_j))`` across the
    top-``top_n`` word pairs, ``w_i`` ranked above ``w_j``. D counts documents."""
    if top_n < 2:
        raise ValueError("top_n must be >= 2")
    docsets: dict[int, set[int]] = {}
    index = {t: i for i, t in enumerate(model.vocab)}
    for d, doc in enumerate(_token_lists(corpus)):
        for t in set(doc):
            i = index.get(t)
            if i is not None:
                docsets.setdefault(i, set()).add(d)
    scores = []
    skipped = 0
    for k in range(model.K):
        top = top_word_indices(model.phi[k], top_n)
        s = 0.0
        for j in range(1, len(top)):
            dj = docsets.get(int(top[j]), set())
            if not dj:
                skipped += 1
                continue
            for i in range(j):
                di = docsets.get(int(top[i]), set())
                s += math.log((len(di & dj) + 1) / len(dj))
        scores.append(s)
    if skipped:
        logger.warning("coherence: skipped %d pairs whose word never occurs in the corpus", skipped)
    return scores if per_topic else float(np.mean(scores))


@dataclass
class GridCell:
    K: int
    alpha: float
    beta: float
    seed: int
    coherence: float = float("nan")
    perplexity: float = float("nan")
    heldout_perplexity: float = float("nan")
    error: str = ""

    def row(self) -> dict:
        return {"K": self.K, "alpha": self.alpha, "beta": self.beta, "seed": self.seed,
                "coherence": self.coherence, "perplexity": self.perplexity,
                "heldout_perplexity": self.heldout_perplexity, "error": self.error}


def select_cell(cells: Sequence[GridCell], coherence_tol: float = 0.05, perplexity_tol: float = 0.02) -> int:
    """Index of the winning cell.

    Highest coherence wins; cells within ``coherence_tol`` (relative) of the
    best count as tied and are separated by lower perplexity, where cells
    within ``perplexity_tol`` (relative) of the lowest are tied again and the
    smallest K wins.
    """
    ok = [i for i, c in enumerate(cells) if not c.error]
    if not ok:
        raise RuntimeError("every grid cell failed")
    best_c = max(cells[i].coherence for i in ok)
    tier1 = [i for i in ok if cells[i].coherence >= best_c - coherence_tol * abs(best_c)]
    best_p = min(cells[i].perplexity for i in tier1)
    tier2 = [i for i in tier1 if cells[i].perplexity <= best_p * (1 + perplexity_tol)]
    return min(tier2, key=lambda i: (cells[i].K, -cells[i].coherence, cells[i].perplexity, i))


def grid_search(contexts, K_values: Sequence[int], alpha_values: Sequence[float | None] = (None,),
                beta_values: Sequence[float] = (0.01,), seeds: Sequence[int] = (0,), iterations: int = 1000,
                burn_in: int = 500, thin: int = 10, top_n: int = 10, heldout_fraction: float = 0.0,
                coherence_tol: float = 0.05, perplexity_tol: float = 0.02, restarts: int = 1):
    """Fit every (K, alpha, beta, seed) cell and pick one by :func:`select_cell`.

    A ``None`` alpha means ``50/K``. With ``heldout_fraction > 0`` a seeded
    split of the contexts is held out and scored separately; the selection
    itself always uses training-set perplexity. Returns ``(best_model, cells)``.
    """
    docs = list(contexts)
    if not (K_values and alpha_values and beta_values and seeds):
        raise ValueError("grids must be non-empty")
    heldout = []
    train = docs
    if heldout_fraction > 0:
        rng = np.random.default_rng(seeds[0])
        perm = rng.permutation(len(docs))
        n_out = int(round(heldout_fraction * len(docs)))
        out_idx = set(perm[:n_out].tolist())
        train = [d for i, d in enumerate(docs) if i not in out_idx]
        heldout = [d for i, d in enumerate(docs) if i in out_idx]
    cells, models = [], []
    for K in K_values:
        for a in alpha_values:
            for b in beta_values:
                for s in seeds:
                    cell = GridCell(K, 50.0 / K if a is None else float(a), float(b), int(s))
                    model = None
                    try:
                        model = fit_lda(train, K, cell.alpha, cell.beta, iterations, burn_in, s, thin, restarts=restarts)
                        cell.coherence = coherence_umass(model, train, top_n)
                        cell.perplexity = perplexity(model, train)
                        if heldout:
                            th = infer_theta(model, heldout, seed=s)
                            cell.heldout_perplexity = perplexity(model, heldout, th)
                    except (ValueError, FloatingPointError) as exc:
                        cell.error = str(exc)
                        logger.warning("grid cell K=%d alpha=%s beta=%s seed=%d failed: %s", K, a, b, s, exc)
                        model = None
                    cells.append(cell)
                    models.append(model)
    best = select_cell(cells, coherence_tol, perplexity_tol)
    return models[best], cells


@dataclass(frozen=True)
class TopicSummary:
    topic_id: int
    top_words: tuple[tuple[str, float], ...]
    share_of_docs: float
    label: str | None = None


def summarize_topics(model: LdaModel, top_n: int = 15, labels: Sequence[str] | None = None) -> list[TopicSummary]:
    """Top words per topic and the share of documents each topic dominates."""
    D = model.theta.shape[0]
    dom = model.dominant_topics()
    counts = np.bincount(dom, minlength=model.K)
    out = []
    for k in range(model.K):
        top = top_word_indices(model.phi[k], top_n)
        words = tuple((model.vocab[i], float(model.phi[k, i])) for i in top)
        label = labels[k] if labels is not None and k < len(labels) else None
        out.append(TopicSummary(k, words, counts[k] / D if D else 0.0, label))
    return out


def align_topics(model: LdaModel, vocabularies: Sequence[Iterable[str]]):
    """Match recovered topics to reference vocabularies by maximum phi mass.

    Returns ``(assignment, mass)`` where ``assignment[k]`` is the reference
    index matched to topic ``k`` (``-1`` if unmatched) and ``mass[k]`` the phi
    mass topic ``k`` puts on that vocabulary.
    """
    from scipy.optimize import linear_sum_assignment

    index = {t: i for i, t in enumerate(model.vocab)}
    M = np.zeros((model.K, len(vocabularies)))
    for j, vocab in enumerate(vocabularies):
        cols = sorted({index[t] for t in vocab if t in index})
        if cols:
            M[:, j] = model.phi[:, cols].sum(axis=1)
    rows, cols = linear_sum_assignment(-M)
    assignment = np.full(model.K, -1)
    mass = np.zeros(model.K)
    assignment[rows] = cols
    mass[rows] = M[rows, cols]
    return assignment, mass


def save_lda(model: LdaModel, path: str | Path) -> None:
    header = {"K": model.K, "alpha": model.alpha, "beta": model.beta, "vocab": model.vocab,
              "seed": model.seed, "iterations": model.iterations, "burn_in": model.burn_in,
              "thin": model.thin, "doc_ids": model.doc_ids}
    write_flat(path, "lda", FORMAT_VERSION, header, {"phi": model.phi, "theta": model.theta})


def load_lda(path: str | Path) -> LdaModel:
    head, arrays = read_flat(path, "lda")
    if head["version"] != FORMAT_VERSION:
        raise ValueError(f"unsupported lda file version {head['version']}")
    return LdaModel(head["K"], head["alpha"], head["beta"], arrays["phi"], arrays["theta"], head["vocab"],
                    head["seed"], head["iterations"], head["burn_in"], head["thin"], head["doc_ids"])
