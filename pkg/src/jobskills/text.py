"""Shared text primitives.

Sentence splitting, token normalization (stop words + light lemmatization),
TF-IDF vectors, cosine similarity, Levenshtein distance and the
partial-ratio fuzzy score used for title matching.
"""
from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from numba import njit

logger = logging.getLogger(__name__)

DEFAULT_KEEP_TERMS = frozenset({"chatgpt", "ai", "llm", "ml", "nlp", "seo", "crm"})

_ABBREVIATIONS = frozenset({
    "dr", "mr", "mrs", "ms", "sr", "jr", "st", "inc", "ltd", "co", "corp", "llc",
    "vs", "etc", "e.g", "i.e", "eg", "ie", "approx", "dept", "no", "u.s", "jan",
    "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept", "oct", "nov", "dec",
})


# ---------------------------------------------------------------------------
# configuration


def _read_lines(text: str) -> list[str]:
    out = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.append(line)
    return out


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Read a one-word-per-line stop list; the bundled list when ``path`` is None."""
    if path is None:
        text = resources.files("jobskills.data").joinpath("stopwords.txt").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    return frozenset(w.lower() for w in _read_lines(text))


def load_lemma_table(path: str | Path | None = None) -> dict[str, str]:
    """Read ``token<TAB>lemma`` lines; the bundled table when ``path`` is None."""
    if path is None:
        text = resources.files("jobskills.data").joinpath("lemmas.txt").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    table = {}
    for line in _read_lines(text):
        parts = line.split("\t") if "\t" in line else line.split()
        if len(parts) != 2:
            raise ValueError(f"bad lemma table line: {line!r}")
        table[parts[0].lower()] = parts[1].lower()
    return table


@dataclass(frozen=True)
class TokenPipelineConfig:
    stopwords: frozenset[str] = field(default_factory=load_stopwords)
    lemma_table: dict[str, str] = field(default_factory=load_lemma_table)
    min_token_len: int = 2
    keep_terms: frozenset[str] = DEFAULT_KEEP_TERMS

    def __post_init__(self):
        if self.min_token_len < 1:
            raise ValueError("min_token_len must be >= 1")
        clash = self.keep_terms & self.stopwords
        if clash:
            raise ValueError(f"keep_terms overlap the stop list: {sorted(clash)}")
        for k, v in self.lemma_table.items():
            if k != k.lower() or v != v.lower():
                raise ValueError(f"lemma table entries must be lowercase: {k!r} -> {v!r}")

    def __hash__(self):
        return id(self)


_DEFAULT_CFG: TokenPipelineConfig | None = None


def default_config() -> TokenPipelineConfig:
    global _DEFAULT_CFG
    if _DEFAULT_CFG is None:
        _DEFAULT_CFG = TokenPipelineConfig()
    return _DEFAULT_CFG


# ---------------------------------------------------------------------------
# sentences and tokens

_TERMINATOR = re.compile(r"[.!?]+")
_PARAGRAPH = re.compile(r"\n[ \t\r\f\v]*\n")


def _split_paragraph(text: str) -> list[str]:
    out = []
    start = 0
    for m in _TERMINATOR.finditer(text):
        end = m.end()
        rest = text[end:]
        stripped = rest.lstrip()
        if stripped:
            # a terminator only ends a sentence before whitespace + capital
            if len(stripped) == len(rest) or not stripped[0].isupper():
                continue
        if m.group().startswith(".") and len(m.group()) == 1:
            prev = re.search(r"([\w.]+)\.$", text[start:end])
            if prev and prev.group(1).lower() in _ABBREVIATIONS:
                continue
        piece = text[start:end].strip()
        if piece:
            out.append(piece)
        start = end
    tail = text[start:].strip()
    if tail:
        out.append(tail)
    return out


def split_sentences(text: str) -> list[str]:
    """Split ``text`` into sentences.

    A sentence ends at ``.``, ``!`` or ``?`` followed by whitespace and an
    uppercase letter (or end of text), unless the word before a single period
    is a known abbreviation. Blank lines always split.
    """
    sentences = []
    for para in _PARAGRAPH.split(text):
        sentences.extend(_split_paragraph(para))
    return sentences


_WORD = re.compile(r"[^\W_]+(?:['’\-][^\W_]+)*")
_VOWELS = set("aeiou")


def _is_consonant(word: str, i: int) -> bool:
    ch = word[i]
    if ch in _VOWELS:
        return False
    if ch == "y":
        return i == 0 or not _is_consonant(word, i - 1)
    return True


def _measure(stem: str) -> int:
    # number of VC sequences
    m = 0
    prev_vowel = False
    for i in range(len(stem)):
        cons = _is_consonant(stem, i)
        if cons and prev_vowel:
            m += 1
        prev_vowel = not cons
    return m


def _ends_cvc(stem: str) -> bool:
    if len(stem) < 3:
        return False
    return (_is_consonant(stem, len(stem) - 3)
            and not _is_consonant(stem, len(stem) - 2)
            and _is_consonant(stem, len(stem) - 1)
            and stem[-1] not in "wxy")


def _has_vowel(stem: str) -> bool:
    return any(not _is_consonant(stem, i) for i in range(len(stem)))


def _strip_verbal(stem: str) -> str:
    if stem.endswith(("at", "bl", "iz")):
        return stem + "e"
    if len(stem) >= 2 and stem[-1] == stem[-2] and _is_consonant(stem, len(stem) - 1) \
            and stem[-1] not in "lsz":
        return stem[:-1]
    if _measure(stem) == 1 and _ends_cvc(stem):
        return stem + "e"
    return stem


def _suffix_step(word: str) -> str:
    if not word.isalpha():
        return word
    if word.endswith("ies") and len(word) > 4:
        return word[:-3] + "y"
    if word.endswith("es") and len(word) > 4 and word[:-2].endswith(("s", "x", "z", "ch", "sh")):
        return word[:-2]
    if word.endswith("s") and len(word) > 3 and not word.endswith(("ss", "us", "is")):
        return word[:-1]
    if word.endswith("ing") and len(word) > 5 and _has_vowel(word[:-3]):
        return _strip_verbal(word[:-3])
    if word.endswith("ed") and len(word) > 4 and _has_vowel(word[:-2]):
        return _strip_verbal(word[:-2])
    return word


def lemmatize(word: str, lemma_table: dict[str, str]) -> str:
    """Dictionary lookup, then suffix rules applied until the word stops changing."""
    # every rule shortens the word, so this terminates
    while True:
        if word in lemma_table:
            return lemma_table[word]
        nxt = _suffix_step(word)
        if nxt == word:
            return word
        word = nxt


def raw_words(text: str) -> list[str]:
    """Lowercased word tokens with internal hyphens/apostrophes folded away."""
    return [re.sub(r"['’\-]", "", w) for w in _WORD.findall(text.lower())]


def tokenize_normalize(text: str, cfg: TokenPipelineConfig | None = None) -> list[str]:
    cfg = cfg or default_config()
    out = []
    for w in raw_words(text):
        if w in cfg.keep_terms:
            out.append(w)
            continue
        if w in cfg.stopwords or len(w) < cfg.min_token_len:
            continue
        lemma = lemmatize(w, cfg.lemma_table)
        if lemma in cfg.keep_terms:
            out.append(lemma)
        elif lemma not in cfg.stopwords and len(lemma) >= cfg.min_token_len:
            out.append(lemma)
    return out


# ---------------------------------------------------------------------------
# TF-IDF


@dataclass(frozen=True)
class SparseVector:
    """Sorted (index, weight) pairs; zero weights are never stored."""

    indices: np.ndarray
    weights: np.ndarray
    dim: int

    def __post_init__(self):
        if self.indices.shape != self.weights.shape:
            raise ValueError("indices/weights shape mismatch")
        if len(self.indices) and (np.any(np.diff(self.indices) <= 0)
                                  or self.indices[0] < 0 or self.indices[-1] >= self.dim):
            raise ValueError("indices must be strictly increasing and within bounds")
        if not np.all(np.isfinite(self.weights)) or np.any(self.weights == 0):
            raise ValueError("weights must be finite and non-zero")

    @classmethod
    def from_dense(cls, dense) -> "SparseVector":
        dense = np.asarray(dense, dtype=np.float64)
        idx = np.flatnonzero(dense)
        return cls(idx.astype(np.int64), dense[idx].copy(), dense.shape[0])

    @classmethod
    def zero(cls, dim: int) -> "SparseVector":
        return cls(np.zeros(0, np.int64), np.zeros(0, np.float64), dim)

    @property
    def is_zero(self) -> bool:
        return len(self.indices) == 0

    def norm(self) -> float:
        return float(np.sqrt(np.dot(self.weights, self.weights)))

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim)
        out[self.indices] = self.weights
        return out

    def items(self) -> list[tuple[int, float]]:
        return list(zip(self.indices.tolist(), self.weights.tolist()))


def smooth_idf(n_docs: int, df) -> np.ndarray:
    return np.log((1.0 + n_docs) / (1.0 + np.asarray(df, dtype=np.float64))) + 1.0


@dataclass(frozen=True)
class TfIdfModel:
    vocabulary: dict[str, int]
    idf: np.ndarray
    n_docs: int
    weighting: str = "rawtf-smoothidf-l2"

    @property
    def terms(self) -> list[str]:
        out = [""] * len(self.vocabulary)
        for t, i in self.vocabulary.items():
            out[i] = t
        return out

    def to_dict(self) -> dict:
        return {"weighting": self.weighting, "n_docs": self.n_docs,
                "terms": self.terms, "idf": self.idf.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "TfIdfModel":
        vocab = {t: i for i, t in enumerate(d["terms"])}
        return cls(vocab, np.asarray(d["idf"], dtype=np.float64), int(d["n_docs"]), d["weighting"])


def fit_tfidf(docs: Sequence[Sequence[str]]) -> TfIdfModel:
    """Vocabulary over all tokens (sorted), smoothed idf ``ln((1+N)/(1+df)) + 1``."""
    if not any(len(d) for d in docs):
        raise ValueError("empty corpus")
    df: dict[str, int] = {}
    for doc in docs:
        for t in set(doc):
            df[t] = df.get(t, 0) + 1
    terms = sorted(df)
    vocab = {t: i for i, t in enumerate(terms)}
    idf = smooth_idf(len(docs), [df[t] for t in terms])
    return TfIdfModel(vocab, idf, len(docs))


def vectorize(model: TfIdfModel, doc: Iterable[str]) -> SparseVector:
    """Raw count times idf, L2-normalized. Unknown tokens are ignored."""
    counts: dict[int, int] = {}
    for t in doc:
        i = model.vocabulary.get(t)
        if i is not None:
            counts[i] = counts.get(i, 0) + 1
    dim = len(model.vocabulary)
    if not counts:
        logger.debug("all tokens out of vocabulary; zero vector")
        return SparseVector.zero(dim)
    idx = np.array(sorted(counts), dtype=np.int64)
    w = np.array([counts[i] for i in idx.tolist()], dtype=np.float64) * model.idf[idx]
    w /= np.sqrt(np.dot(w, w))
    return SparseVector(idx, w, dim)


def to_csr(vectors: Sequence[SparseVector], dim: int | None = None):
    """Stack sparse vectors into a ``scipy.sparse.csr_matrix``."""
    from scipy import sparse

    if dim is None:
        dim = vectors[0].dim if vectors else 0
    indptr = np.zeros(len(vectors) + 1, dtype=np.int64)
    for i, v in enumerate(vectors):
        indptr[i + 1] = indptr[i] + len(v.indices)
    indices = np.concatenate([v.indices for v in vectors]) if vectors else np.zeros(0, np.int64)
    data = np.concatenate([v.weights for v in vectors]) if vectors else np.zeros(0)
    return sparse.csr_matrix((data, indices, indptr), shape=(len(vectors), dim))


def cosine(u: SparseVector, v: SparseVector) -> float:
    """Cosine similarity; 0.0 when either side is the zero vector."""
    if u.is_zero or v.is_zero:
        return 0.0
    # rescale first so tiny or huge weights neither underflow nor overflow
    a = u.weights / np.max(np.abs(u.weights))
    b = v.weights / np.max(np.abs(v.weights))
    _, iu, iv = np.intersect1d(u.indices, v.indices, assume_unique=True, return_indices=True)
    dot = float(np.dot(a[iu], b[iv]))
    return dot / math.sqrt(float(np.dot(a, a)) * float(np.dot(b, b)))


# ---------------------------------------------------------------------------
# edit distances


@njit(cache=True)
def _levenshtein_codes(a, b):
    n, m = a.shape[0], b.shape[0]
    if n == 0:
        return m
    if m == 0:
        return n
    prev = np.arange(m + 1)
    cur = np.empty(m + 1, dtype=prev.dtype)
    for i in range(1, n + 1):
        cur[0] = i
        ai = a[i - 1]
        for j in range(1, m + 1):
            cost = 0 if ai == b[j - 1] else 1
            best = prev[j - 1] + cost
            if prev[j] + 1 < best:
                best = prev[j] + 1
            if cur[j - 1] + 1 < best:
                best = cur[j - 1] + 1
            cur[j] = best
        prev, cur = cur, prev
    return prev[m]


@njit(cache=True)
def _min_window_distance(short, long):
    m = short.shape[0]
    best = m
    for start in range(long.shape[0] - m + 1):
        d = _levenshtein_codes(short, long[start:start + m])
        if d < best:
            best = d
            if best == 0:
                break
    return best


def _codes(s: str) -> np.ndarray:
    return np.frombuffer(s.encode("utf-32-le"), dtype=np.uint32)


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance (insert, delete, substitute)."""
    return int(_levenshtein_codes(_codes(a), _codes(b)))


def _squash(s: str) -> str:
    return " ".join(s.lower().split())


def partial_ratio(a: str, b: str) -> float:
    """Best ``1 - lev/m`` between the shorter string (length m) and any
    length-m window of the longer one, after lowercasing and collapsing
    whitespace. Two empty strings score 1, one empty string scores 0."""
    a, b = _squash(a), _squash(b)
    short, long = (a, b) if len(a) <= len(b) else (b, a)
    m = len(short)
    if m == 0:
        return 1.0 if len(long) == 0 else 0.0
    d = int(_min_window_distance(_codes(short), _codes(long)))
    return 1.0 - d / m


def ratio_floor(a: str, b: str) -> float:
    """``1 - lev(a, b) / max(len)`` on the squashed strings; 1.0 for two empties."""
    a, b = _squash(a), _squash(b)
    n = max(len(a), len(b))
    return 1.0 if n == 0 else 1.0 - levenshtein(a, b) / n


__all__ = [
    "TokenPipelineConfig", "SparseVector", "TfIdfModel", "split_sentences",
    "tokenize_normalize", "fit_tfidf", "vectorize", "cosine", "levenshtein",
    "partial_ratio", "load_stopwords", "load_lemma_table", "default_config", "to_csr",
    "lemmatize", "smooth_idf", "raw_words",
]
