"""Pipeline configuration, stored as a JSON document.

Relative paths are resolved against the directory holding the config file.
A ``null`` alpha in the LDA grid means ``50/K``.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .ingest import HOURS_PER_YEAR
from .lda import DEFAULT_ANCHORS


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Thresholds:
    dedup: float = 0.90
    cosine_match: float = 0.95
    fuzzy_match: float = 0.95


@dataclass(frozen=True)
class LdaGrid:
    K: tuple[int, ...] = (5,)
    alpha: tuple[float | None, ...] = (None,)
    beta: tuple[float, ...] = (0.01,)
    seeds: tuple[int, ...] = (0,)
    iterations: int = 1000
    burn_in: int = 500
    thin: int = 10
    restarts: int = 1
    top_n: int = 10
    heldout_fraction: float = 0.0
    coherence_tol: float = 0.05
    perplexity_tol: float = 0.02


@dataclass(frozen=True)
class SvmSettings:
    C: float = 1.0
    epochs: int = 20
    cv_folds: int = 5


@dataclass(frozen=True)
class PipelineConfig:
    corpus: str = "corpus.jsonl"
    taxonomy: str = "taxonomy.tsv"
    output_dir: str = "out"
    seed: int = 0
    stopwords: str | None = None
    lemma_table: str | None = None
    filter_rules: tuple[dict, ...] = ()
    thresholds: Thresholds = field(default_factory=Thresholds)
    lda: LdaGrid = field(default_factory=LdaGrid)
    svm: SvmSettings = field(default_factory=SvmSettings)
    anchor_terms: tuple[str, ...] = DEFAULT_ANCHORS
    context_window: int = 1
    topic_labels: tuple[str, ...] = ()
    centrality_bounds: tuple[float, float, float] = (0.25, 0.5, 0.75)
    experience_edges: tuple[int, ...] = (2, 5, 10)
    hours_per_year: int = HOURS_PER_YEAR
    formats: tuple[str, ...] = ("delimited", "markdown", "structured")
    base_dir: str = field(default=".", compare=False)

    def __post_init__(self):
        t = self.thresholds
        for name in ("dedup", "cosine_match", "fuzzy_match"):
            v = getattr(t, name)
            if not 0 < v <= 1:
                raise ConfigError(f"threshold {name}={v} outside (0, 1]")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise ConfigError("seed must be an integer")
        if not self.lda.K or any(k < 1 for k in self.lda.K):
            raise ConfigError("lda.K must list positive integers")
        if not self.lda.alpha or not self.lda.beta or not self.lda.seeds:
            raise ConfigError("lda grids must be non-empty")
        if not self.anchor_terms:
            raise ConfigError("anchor_terms must be non-empty")
        if self.context_window < 0:
            raise ConfigError("context_window must be >= 0")
        b = self.centrality_bounds
        if len(b) != 3 or not b[0] < b[1] < b[2]:
            raise ConfigError("centrality_bounds must be three increasing numbers")
        e = self.experience_edges
        if not e or any(x >= y for x, y in zip(e, e[1:])) or e[0] < 0:
            raise ConfigError("experience_edges must be increasing non-negative integers")
        bad = set(self.formats) - {"delimited", "markdown", "structured"}
        if bad:
            raise ConfigError(f"unknown report formats: {sorted(bad)}")

    def path(self, name: str) -> Path | None:
        value = getattr(self, name)
        if value is None:
            return None
        p = Path(value)
        return p if p.is_absolute() else Path(self.base_dir) / p

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("base_dir")
        return d

    def digest(self) -> str:
        """SHA-256 of the canonical JSON form (paths as written, not resolved)."""
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    def replace(self, **changes) -> "PipelineConfig":
        d = self.to_dict()
        d.update(changes)
        return config_from_dict(d, self.base_dir)


def _tuple(v):
    return tuple(v) if isinstance(v, (list, tuple)) else (v,)


def config_from_dict(d: dict, base_dir: str | Path = ".") -> PipelineConfig:
    d = dict(d)
    known = set(PipelineConfig.__dataclass_fields__) - {"base_dir"}
    unknown = set(d) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        if isinstance(d.get("thresholds"), dict):
            d["thresholds"] = Thresholds(**d["thresholds"])
        if isinstance(d.get("lda"), dict):
            lda = dict(d["lda"])
            for k in ("K", "alpha", "beta", "seeds"):
                if k in lda:
                    lda[k] = _tuple(lda[k])
            d["lda"] = LdaGrid(**lda)
        if isinstance(d.get("svm"), dict):
            d["svm"] = SvmSettings(**d["svm"])
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    for k in ("filter_rules", "anchor_terms", "topic_labels", "centrality_bounds", "experience_edges", "formats"):
        if k in d:
            d[k] = _tuple(d[k])
    return PipelineConfig(**d, base_dir=str(base_dir))


def load_config(path: str | Path | None) -> PipelineConfig:
    """Read a JSON config; ``None`` gives the defaults rooted at the working directory."""
    if path is None:
        return PipelineConfig()
    path = Path(path)
    try:
        d = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(d, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return config_from_dict(d, path.parent)
