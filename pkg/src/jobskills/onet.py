"""Occupation taxonomy loading and title-to-occupation assignment.

Titles are matched in three stages: TF-IDF cosine over normalized titles,
partial-ratio fuzzy matching, and finally a description classifier for the
leftovers. Assignments are then rolled up to family levels 1-3.
"""
from __future__ import annotations

import csv
import io
import logging
import math
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np

from .ingest import JobPosting
from .text import (TfIdfModel, TokenPipelineConfig, fit_tfidf, partial_ratio, to_csr,
                   tokenize_normalize, vectorize)

logger = logging.getLogger(__name__)

MATCH_THRESHOLD = 0.95
METHODS = ("cosine_exact", "fuzzy_partial", "classifier")
TAXONOMY_COLUMNS = ("soc_code", "title", "family_l1", "family_l2", "family_l3")
TITLE_NOISE = frozenset({"senior", "sr", "jr", "lead", "remote"})
ROMAN_NUMERALS = frozenset({"i", "ii", "iii", "iv", "v", "vi", "vii", "viii", "ix", "x"})
_EPS = 1e-12


class TaxonomyError(ValueError):
    pass


class ConsistencyError(RuntimeError):
    pass


class ClassifierRequired(RuntimeError):
    pass


@dataclass(frozen=True)
class Occupation:
    soc_code: str
    title: str
    family_l1: str
    family_l2: str = ""
    family_l3: str = ""


class OnetTaxonomy:
    def __init__(self, records: Sequence[Occupation]):
        codes = Counter(r.soc_code for r in records)
        dups = sorted(c for c, n in codes.items() if n > 1)
        if dups:
            raise TaxonomyError(f"duplicate soc_code: {', '.join(dups)}")
        for r in records:
            if not r.title.strip() or not r.family_l1.strip():
                raise TaxonomyError(f"{r.soc_code}: title and family_l1 must be non-empty")
        major: dict[str, set] = {}
        for r in records:
            if re.fullmatch(r"\d{2}-\d{4}(\.\d{2})?", r.soc_code):
                major.setdefault(r.soc_code[:2], set()).add(r.family_l1)
        bad = sorted(k for k, v in major.items() if len(v) > 1)
        if bad:
            raise TaxonomyError(f"major groups with inconsistent family_l1: {', '.join(bad)}")
        self.records = tuple(sorted(records, key=lambda r: r.soc_code))
        self.by_code = {r.soc_code: r for r in self.records}

    def __len__(self):
        return len(self.records)

    def __contains__(self, code):
        return code in self.by_code

    def to_tsv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, delimiter="\t", lineterminator="\n")
        w.writerow(TAXONOMY_COLUMNS)
        for r in self.records:
            w.writerow([r.soc_code, r.title, r.family_l1, r.family_l2, r.family_l3])
        return buf.getvalue()


def load_taxonomy(source: str | Path | io.TextIOBase) -> OnetTaxonomy:
    """Read a delimited taxonomy table (tab or comma) with a header row."""
    if isinstance(source, (str, Path)):
        text = Path(source).read_text("utf-8")
    else:
        text = source.read()
    first = text.splitlines()[0] if text else ""
    delim = "\t" if "\t" in first else ","
    reader = csv.DictReader(io.StringIO(text), delimiter=delim)
    header = [h.strip() for h in (reader.fieldnames or [])]
    for col in TAXONOMY_COLUMNS:
        if col not in header:
            raise TaxonomyError(f"taxonomy is missing column {col!r}")
    records = []
    for row in reader:
        row = {k.strip(): (v or "").strip() for k, v in row.items() if k}
        records.append(Occupation(*(row[c] for c in TAXONOMY_COLUMNS)))
    return OnetTaxonomy(records)


@dataclass(frozen=True)
class TitleAssignment:
    posting_id: str
    soc_code: str
    method: str
    score: float


def title_tokens(title: str, cfg: TokenPipelineConfig | None = None) -> list[str]:
    """Normalized title tokens with seniority/remote noise and roman numerals removed."""
    return [t for t in tokenize_normalize(title, cfg) if t not in TITLE_NOISE and t not in ROMAN_NUMERALS]


class TitleMatcher:
    """Precomputed title vectors and normalized strings for one taxonomy."""

    def __init__(self, taxonomy: OnetTaxonomy, cfg: TokenPipelineConfig | None = None):
        if len(taxonomy) == 0:
            raise TaxonomyError("taxonomy is empty")
        self.taxonomy = taxonomy
        self.cfg = cfg
        self.codes = [r.soc_code for r in taxonomy.records]
        self.tokens = [title_tokens(r.title, cfg) for r in taxonomy.records]
        self.norm_titles = [" ".join(t) for t in self.tokens]
        self.model: TfIdfModel = fit_tfidf(self.tokens)
        self.matrix = to_csr([vectorize(self.model, t) for t in self.tokens], len(self.model.vocabulary))
        # idf a term would get with df = 0
        self.unseen_idf = math.log(1.0 + self.model.n_docs) + 1.0

    def cosine_scores(self, tokens: Sequence[str]) -> np.ndarray:
        """Cosine against every taxonomy title. Words unknown to the taxonomy
        still count toward the query norm, so extra words lower the score."""
        counts = Counter(tokens)
        if not counts:
            return np.zeros(len(self.codes))
        q = np.zeros(len(self.model.vocabulary))
        norm2 = 0.0
        for t, c in counts.items():
            i = self.model.vocabulary.get(t)
            if i is None:
                norm2 += (c * self.unseen_idf) ** 2
            else:
                q[i] = c * self.model.idf[i]
                norm2 += q[i] ** 2
        return np.asarray(self.matrix @ q).ravel() / math.sqrt(norm2)

    def fuzzy_scores(self, tokens: Sequence[str]) -> np.ndarray:
        query = " ".join(tokens)
        if not query:
            return np.zeros(len(self.codes))
        return np.array([partial_ratio(query, t) for t in self.norm_titles])


def _best(scores: np.ndarray, codes: Sequence[str], tau: float):
    # codes are sorted ascending, so argmax picks the lowest code on ties
    if len(scores) == 0:
        return None
    k = int(np.argmax(scores))
    s = float(scores[k])
    if s >= tau - _EPS:
        return codes[k], min(s, 1.0)
    return None


def match_cosine(title_raw: str, matcher: TitleMatcher, tau: float = MATCH_THRESHOLD,
                 posting_id: str = "") -> TitleAssignment | None:
    hit = _best(matcher.cosine_scores(title_tokens(title_raw, matcher.cfg)), matcher.codes, tau)
    return TitleAssignment(posting_id, hit[0], "cosine_exact", max(hit[1], tau)) if hit else None


def match_fuzzy(title_raw: str, matcher: TitleMatcher, tau: float = MATCH_THRESHOLD,
                posting_id: str = "") -> TitleAssignment | None:
    hit = _best(matcher.fuzzy_scores(title_tokens(title_raw, matcher.cfg)), matcher.codes, tau)
    return TitleAssignment(posting_id, hit[0], "fuzzy_partial", max(hit[1], tau)) if hit else None


def match_stages(corpus: Sequence[JobPosting], matcher: TitleMatcher,
                 tau_cosine: float = MATCH_THRESHOLD, tau_fuzzy: float = MATCH_THRESHOLD):
    """Stage 1 then stage 2 for each posting; ``None`` where neither matches."""
    out = []
    for p in corpus:
        a = match_cosine(p.title_raw, matcher, tau_cosine, p.id)
        if a is None:
            a = match_fuzzy(p.title_raw, matcher, tau_fuzzy, p.id)
        out.append(a)
    return out


class DescriptionClassifier(Protocol):
    def predict_text(self, text: str) -> tuple[str, float]: ...


def _squash_margin(margin: float) -> float:
    return 1.0 / (1.0 + math.exp(-max(min(margin, 50.0), -50.0)))


def assign_titles(corpus: Sequence[JobPosting], matcher: TitleMatcher,
                  classifier: DescriptionClassifier | None = None,
                  tau_cosine: float = MATCH_THRESHOLD, tau_fuzzy: float = MATCH_THRESHOLD,
                  staged: Sequence[TitleAssignment | None] | None = None):
    """One assignment per posting plus per-method coverage counts.

    ``staged`` may carry precomputed :func:`match_stages` output. Classifier
    scores are the winning margin squashed through a logistic, not a
    calibrated probability.
    """
    if staged is None:
        staged = match_stages(corpus, matcher, tau_cosine, tau_fuzzy)
    if len(staged) != len(corpus):
        raise ValueError("staged results do not line up with the corpus")
    if classifier is None and any(a is None for a in staged):
        raise ClassifierRequired("classifier required: some postings matched no taxonomy title")
    out = []
    for p, a in zip(corpus, staged):
        if a is None:
            code, margin = classifier.predict_text(p.description)
            a = TitleAssignment(p.id, code, "classifier", _squash_margin(margin))
        if a.soc_code not in matcher.taxonomy:
            raise ConsistencyError(f"{p.id}: assigned unknown code {a.soc_code}")
        out.append(a)
    return out, coverage(out)


def coverage(assignments: Sequence[TitleAssignment]) -> dict:
    n = len(assignments)
    counts = Counter(a.method for a in assignments)
    return {m: {"count": counts.get(m, 0), "share": counts.get(m, 0) / n if n else 0.0}
            for m in METHODS} | {"total": n}


def family_rollup(assignments: Sequence[TitleAssignment], taxonomy: OnetTaxonomy) -> dict[str, tuple[str, str, str]]:
    table = {}
    for a in assignments:
        rec = taxonomy.by_code.get(a.soc_code)
        if rec is None:
            raise ConsistencyError(f"{a.posting_id}: soc_code {a.soc_code} not in taxonomy")
        table[a.posting_id] = (rec.family_l1, rec.family_l2, rec.family_l3)
    return table


def family_counts(table: dict[str, tuple[str, str, str]]) -> dict[str, int]:
    return dict(sorted(Counter(v[0] for v in table.values()).items()))


def audit_rows(assignments: Sequence[TitleAssignment], corpus: Sequence[JobPosting],
               taxonomy: OnetTaxonomy, per_method: int = 20) -> list[dict]:
    """Lowest-scoring matches per method, for human review."""
    titles = {p.id: p.title_raw for p in corpus}
    rows = []
    for m in METHODS:
        sel = sorted((a for a in assignments if a.method == m), key=lambda a: (a.score, a.posting_id))
        for a in sel[:per_method]:
            rows.append({"method": m, "posting_id": a.posting_id, "title_raw": titles.get(a.posting_id, ""),
                         "soc_code": a.soc_code, "onet_title": taxonomy.by_code[a.soc_code].title,
                         "score": a.score})
    rows.sort(key=lambda r: (r["score"], r["method"], r["posting_id"]))
    return rows
