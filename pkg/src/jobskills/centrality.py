"""Family-by-skill-set centrality: averaged topic rows, row-mean normalization
and four discrete centrality levels."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

logger = logging.getLogger(__name__)

LEVELS = ("not_central", "slightly_central", "moderately_central", "highly_central")
DEFAULT_BOUNDS = (0.25, 0.5, 0.75)
BOUND_SLACK = 1e-12
GLYPHS = {
    "not_central": "□□□□",
    "slightly_central": "■□□□",
    "moderately_central": "■■■□",
    "highly_central": "■■■■",
}


@dataclass
class CentralityMatrix:
    families: list[str]
    topics: list[int]
    A: np.ndarray
    doc_counts: list[int]
    A_hat: np.ndarray | None = None
    levels: list[list[str]] | None = None
    warnings: list[str] = field(default_factory=list)

    def glyph_rows(self) -> list[str]:
        if self.levels is None:
            raise ValueError("levels not computed")
        return [glyph_row(row) for row in self.levels]


def family_topic_matrix(theta: np.ndarray, doc_ids: Sequence[str], families: Mapping[str, str],
                        family_order: Sequence[str] | None = None) -> CentralityMatrix:
    """``A[f, s]`` = mean of ``theta[d, s]`` over documents ``d`` in family ``f``.

    Families are sorted by name unless ``family_order`` is given; families in
    that order with no documents are dropped with a warning.
    """
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape[0] != len(doc_ids):
        raise ValueError("theta rows and doc_ids differ in length")
    missing = [d for d in doc_ids if d not in families]
    if missing:
        raise KeyError(f"documents without a family: {missing[:5]}")
    fam_of = [families[d] for d in doc_ids]
    names = list(family_order) if family_order is not None else sorted(set(fam_of))
    warnings = []
    rows, counts, kept = [], [], []
    for f in names:
        idx = [i for i, g in enumerate(fam_of) if g == f]
        if not idx:
            warnings.append(f"family {f!r} has no documents; excluded")
            continue
        rows.append(theta[idx].mean(axis=0))
        counts.append(len(idx))
        kept.append(f)
    for w in warnings:
        logger.warning(w)
    K = theta.shape[1]
    A = np.vstack(rows) if rows else np.zeros((0, K))
    return CentralityMatrix(kept, list(range(K)), A, counts, warnings=warnings)


def normalize(A: np.ndarray) -> np.ndarray:
    """Divide each row by its mean."""
    A = np.asarray(A, dtype=np.float64)
    means = A.mean(axis=1, keepdims=True)
    if np.any(means <= 0):
        raise ValueError("every row mean must be positive")
    return A / means


def discretize(A_hat: np.ndarray, bounds: Sequence[float] = DEFAULT_BOUNDS) -> list[list[str]]:
    """Band each entry: ``<= b0`` not, ``<= b1`` slightly, ``<= b2`` moderately, else highly central."""
    A_hat = np.asarray(A_hat, dtype=np.float64)
    if not np.all(np.isfinite(A_hat)) or np.any(A_hat < 0):
        raise ValueError("A_hat must be finite and non-negative")
    b = np.asarray(bounds, dtype=np.float64)
    if len(b) != 3 or np.any(np.diff(b) <= 0):
        raise ValueError("bounds must be three increasing numbers")
    # side="left" puts values equal to a bound in the lower band; the slack
    # absorbs rounding in A / rowmean (0.1 / 0.2 is not exactly 0.5)
    codes = np.searchsorted(b, A_hat - BOUND_SLACK, side="left")
    return [[LEVELS[c] for c in row] for row in np.atleast_2d(codes)]


def glyph_row(levels: Sequence[str]) -> str:
    return " ".join(GLYPHS[l] for l in levels)


def centrality(theta: np.ndarray, doc_ids: Sequence[str], families: Mapping[str, str],
               bounds: Sequence[float] = DEFAULT_BOUNDS, family_order: Sequence[str] | None = None) -> CentralityMatrix:
    cm = family_topic_matrix(theta, doc_ids, families, family_order)
    cm.A_hat = normalize(cm.A)
    cm.levels = discretize(cm.A_hat, bounds)
    return cm


def skill_share(families: Mapping[str, str], dominant: Mapping[str, int], K: int,
                family_order: Sequence[str] | None = None) -> tuple[list[str], np.ndarray, list[int]]:
    """Fraction of each family's postings whose dominant topic is ``s``.

    Only postings present in both mappings count. Returns
    ``(family_names, shares, counts)``.
    """
    ids = [p for p in dominant if p in families]
    names = list(family_order) if family_order is not None else sorted({families[p] for p in ids})
    rows, counts, kept = [], [], []
    for f in names:
        topics = [dominant[p] for p in ids if families[p] == f]
        if not topics:
            logger.warning("family %r has no postings with a dominant topic; excluded", f)
            continue
        rows.append(np.bincount(topics, minlength=K)[:K] / len(topics))
        counts.append(len(topics))
        kept.append(f)
    return kept, (np.vstack(rows) if rows else np.zeros((0, K))), counts
