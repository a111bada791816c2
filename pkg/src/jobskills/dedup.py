"""Near-duplicate detection over TF-IDF description vectors."""
from __future__ import annotations

import datetime as dt
import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .ingest import JobPosting
from .text import SparseVector, TfIdfModel, TokenPipelineConfig, to_csr, tokenize_normalize, vectorize

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.90
# float slack so identical documents still clear a threshold of 1.0
_EPS = 1e-12


class ConsistencyError(RuntimeError):
    pass


@dataclass(frozen=True)
class DuplicateCluster:
    representative_id: str
    member_ids: tuple[str, ...]
    pairwise_scores: tuple[tuple[str, str, float], ...]


def description_vectors(corpus: Sequence[JobPosting], model: TfIdfModel,
                        cfg: TokenPipelineConfig | None = None) -> list[SparseVector]:
    return [vectorize(model, tokenize_normalize(p.description, cfg)) for p in corpus]


def similar_pairs(vectors: Sequence[SparseVector], threshold: float) -> list[tuple[int, int, float]]:
    """All ``(i, j, score)`` with ``i < j`` and cosine >= threshold.

    Vectors are unit-norm (or zero), so the cosine matrix is the sparse
    Gram matrix; only pairs that share a term are ever materialized.
    """
    if not vectors:
        return []
    X = to_csr(vectors)
    gram = (X @ X.T).tocoo()
    mask = (gram.row < gram.col) & (gram.data >= threshold - _EPS)
    rows, cols, vals = gram.row[mask], gram.col[mask], np.minimum(gram.data[mask], 1.0)
    order = np.lexsort((cols, rows))
    return [(int(rows[k]), int(cols[k]), float(vals[k])) for k in order]


def _components(n: int, edges) -> list[list[int]]:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j, _ in edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return [g for g in groups.values() if len(g) >= 2]


def _rep_key(p: JobPosting):
    return (p.posted_date is None, p.posted_date or dt.date.min, p.id)


def find_duplicates(corpus: Sequence[JobPosting], model: TfIdfModel,
                    threshold: float = DEFAULT_THRESHOLD,
                    cfg: TokenPipelineConfig | None = None,
                    vectors: Sequence[SparseVector] | None = None) -> list[DuplicateCluster]:
    """Connected components of the ``cosine >= threshold`` graph.

    The representative of each cluster is the earliest-posted member
    (undated postings last), ties broken by id.
    """
    if not 0 < threshold <= 1:
        raise ValueError("threshold must be in (0, 1]")
    if not corpus:
        return []
    if vectors is None:
        vectors = description_vectors(corpus, model, cfg)
    edges = similar_pairs(vectors, threshold)
    clusters = []
    for comp in _components(len(corpus), edges):
        members = set(comp)
        rep = min((corpus[i] for i in comp), key=_rep_key)
        scores = tuple((corpus[i].id, corpus[j].id, s) for i, j, s in edges if i in members)
        clusters.append(DuplicateCluster(rep.id, tuple(corpus[i].id for i in comp), scores))
    logger.info("%d duplicate clusters over %d postings", len(clusters), len(corpus))
    return clusters


@dataclass(frozen=True)
class Removal:
    removed_id: str
    representative_id: str
    max_edge_score: float


def deduplicate(corpus: Sequence[JobPosting], clusters: Sequence[DuplicateCluster]):
    """Drop every non-representative cluster member.

    Returns ``(kept, manifest)``; ``kept`` preserves input order.
    """
    ids = {p.id for p in corpus}
    drop: dict[str, Removal] = {}
    for c in clusters:
        unknown = [m for m in c.member_ids if m not in ids]
        if unknown or c.representative_id not in ids:
            raise ConsistencyError(f"cluster references unknown posting ids: {unknown or [c.representative_id]}")
        for m in c.member_ids:
            if m == c.representative_id:
                continue
            best = max((s for a, b, s in c.pairwise_scores if m in (a, b)), default=float("nan"))
            drop[m] = Removal(m, c.representative_id, best)
    kept = [p for p in corpus if p.id not in drop]
    manifest = [drop[p.id] for p in corpus if p.id in drop]
    return kept, manifest
