"""Stage-by-stage orchestration with persisted artifacts.

Each stage reads the previous stage's files from the output directory and
writes its own subdirectory, so any stage can be re-run on its own:

    ingest/postings.jsonl      parsed records
    filter/kept.jsonl          relevant postings, filter/rejected.tsv
    dedup/deduped.jsonl        one posting per cluster, dedup/removed.tsv
    extract/postings.jsonl     postings with attributes filled in
    match/staged.tsv           cosine and fuzzy title matches (blank when neither hit)
    train/                     description TF-IDF, SVM, CV metrics, final assignments.tsv
    topics/                    context documents, grid table, fitted LDA
    centrality/centrality.json A, A-hat and levels
    report/                    emitted tables

A failing stage leaves earlier artifacts in place and writes ``FAILED``.
"""
from __future__ import annotations

import csv
import hashlib
import json
import logging
import platform
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .centrality import centrality, skill_share
from .config import PipelineConfig
from .dedup import deduplicate, description_vectors, find_duplicates
from .ingest import (Diagnostic, DiagnosticLog, FilterRuleSet, Gazetteer, JobPosting, extract_attributes,
                     filter_irrelevant, load_posting_records, read_postings, write_postings)
from .lda import (ContextDoc, GridCell, extract_context, grid_search, load_lda, save_lda, select_cell,
                  summarize_topics)
from .onet import (ClassifierRequired, TitleAssignment, TitleMatcher, assign_titles, audit_rows, coverage,
                   family_rollup, load_taxonomy, match_stages)
from .report import (Report, audit_table, build_attribute_tables, centrality_tables, coverage_table, cv_table,
                     emit, family_tables, lda_selection_table, provenance_table, skill_share_table, stats_table,
                     topic_tables)
from .svm import SvmConfig, TextClassifier, cross_validate, load_svm, save_svm, train_svm
from .text import TfIdfModel, TokenPipelineConfig, fit_tfidf, load_lemma_table, load_stopwords, tokenize_normalize, vectorize

logger = logging.getLogger(__name__)

STAGES = ("ingest", "filter", "dedup", "extract", "match", "train", "topics", "centrality", "report")


class StageError(RuntimeError):
    """A stage failed; ``stage`` names it and the message gives the cause."""

    def __init__(self, stage: str, cause: str):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


class InputError(ValueError):
    """Bad or missing input files."""


@dataclass
class Context:
    cfg: PipelineConfig
    out: Path

    def dir(self, stage: str) -> Path:
        d = self.out / stage
        d.mkdir(parents=True, exist_ok=True)
        return d

    def need(self, stage: str, name: str) -> Path:
        p = self.out / stage / name
        if not p.exists():
            raise InputError(f"missing artifact {p}; run the {stage!r} stage first")
        return p

    @property
    def diagnostics(self) -> DiagnosticLog:
        return DiagnosticLog(self.out / "diagnostics.jsonl")


def token_config(cfg: PipelineConfig) -> TokenPipelineConfig:
    sw, lem = cfg.path("stopwords"), cfg.path("lemma_table")
    if sw is None and lem is None:
        return None
    from .text import default_config

    base = default_config()
    return TokenPipelineConfig(load_stopwords(sw) if sw else base.stopwords,
                               load_lemma_table(lem) if lem else base.lemma_table,
                               base.min_token_len, base.keep_terms)


def _write_tsv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _read_tsv(path: Path) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh, delimiter="\t"))


def _dump_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


# ---------------------------------------------------------------------------
# stages


def stage_ingest(ctx: Context) -> dict:
    src = ctx.cfg.path("corpus")
    if src is None or not src.exists():
        raise InputError(f"corpus not found: {src}")
    (ctx.out / "diagnostics.jsonl").write_text("", encoding="utf-8")
    diags: list[Diagnostic] = []
    postings = read_postings(src, diags)
    ctx.diagnostics.extend(diags)
    if not postings:
        raise StageError("ingest", "empty corpus")
    write_postings(postings, ctx.dir("ingest") / "postings.jsonl")
    with open(src, encoding="utf-8") as fh:
        n_lines = sum(1 for line in fh if line.strip())
    stats = {"n_records": n_lines, "n_ingested": len(postings), "n_rejected_records": n_lines - len(postings)}
    _dump_json(ctx.dir("ingest") / "stats.json", stats)
    return stats


def stage_filter(ctx: Context) -> dict:
    postings = load_posting_records(ctx.need("ingest", "postings.jsonl"))
    rules = FilterRuleSet.from_config(list(ctx.cfg.filter_rules))
    kept, rejected = filter_irrelevant(postings, rules)
    write_postings(kept, ctx.dir("filter") / "kept.jsonl")
    _write_tsv(ctx.dir("filter") / "rejected.tsv", ["posting_id", "rule_id"], [(p.id, r) for p, r in rejected])
    stats = {"n_kept": len(kept), "n_irrelevant": len(rejected)}
    _dump_json(ctx.dir("filter") / "stats.json", stats)
    return stats


def stage_dedup(ctx: Context) -> dict:
    postings = load_posting_records(ctx.need("filter", "kept.jsonl"))
    tcfg = token_config(ctx.cfg)
    if not postings:
        raise StageError("dedup", "empty corpus after filtering")
    model = fit_tfidf([tokenize_normalize(p.description, tcfg) for p in postings])
    vectors = description_vectors(postings, model, tcfg)
    clusters = find_duplicates(postings, model, ctx.cfg.thresholds.dedup, tcfg, vectors)
    kept, removed = deduplicate(postings, clusters)
    write_postings(kept, ctx.dir("dedup") / "deduped.jsonl")
    _write_tsv(ctx.dir("dedup") / "removed.tsv", ["removed_id", "representative_id", "max_edge_score"],
               [(r.removed_id, r.representative_id, repr(r.max_edge_score)) for r in removed])
    stats = {"n_deduped": len(kept), "n_duplicates": len(removed),
             "n_clusters": sum(1 for c in clusters if len(c.member_ids) > 1)}
    _dump_json(ctx.dir("dedup") / "stats.json", stats)
    return stats


def stage_extract(ctx: Context) -> dict:
    postings = load_posting_records(ctx.need("dedup", "deduped.jsonl"))
    gaz = Gazetteer(hours_per_year=ctx.cfg.hours_per_year)
    diags: list[Diagnostic] = []
    out = [extract_attributes(p, gaz, diags) for p in postings]
    ctx.diagnostics.extend(diags)
    write_postings(out, ctx.dir("extract") / "postings.jsonl")
    stats = {"n_extracted": len(out), "n_extract_diagnostics": len(diags)}
    _dump_json(ctx.dir("extract") / "stats.json", stats)
    return stats


def _taxonomy(ctx: Context):
    path = ctx.cfg.path("taxonomy")
    if path is None or not path.exists():
        raise InputError(f"taxonomy not found: {path}")
    return load_taxonomy(path)


def stage_match(ctx: Context) -> dict:
    postings = load_posting_records(ctx.need("extract", "postings.jsonl"))
    matcher = TitleMatcher(_taxonomy(ctx), token_config(ctx.cfg))
    t = ctx.cfg.thresholds
    staged = match_stages(postings, matcher, t.cosine_match, t.fuzzy_match)
    rows = [(p.id, a.soc_code, a.method, repr(a.score)) if a else (p.id, "", "", "")
            for p, a in zip(postings, staged)]
    _write_tsv(ctx.dir("match") / "staged.tsv", ["posting_id", "soc_code", "method", "score"], rows)
    n_hit = sum(a is not None for a in staged)
    stats = {"n_staged": n_hit, "n_unmatched": len(staged) - n_hit}
    _dump_json(ctx.dir("match") / "stats.json", stats)
    return stats


def _load_staged(ctx: Context) -> list[TitleAssignment | None]:
    return [TitleAssignment(r["posting_id"], r["soc_code"], r["method"], float(r["score"])) if r["soc_code"] else None
            for r in _read_tsv(ctx.need("match", "staged.tsv"))]


def stage_train(ctx: Context) -> dict:
    """Train the description classifier on stage-1/2 matches and assign every posting."""
    postings = load_posting_records(ctx.need("extract", "postings.jsonl"))
    staged = _load_staged(ctx)
    if [a.posting_id for a in staged if a] != [p.id for p, a in zip(postings, staged) if a]:
        raise StageError("train", "staged matches do not line up with the extracted postings")
    tcfg = token_config(ctx.cfg)
    taxonomy = _taxonomy(ctx)
    matcher = TitleMatcher(taxonomy, tcfg)
    d = ctx.dir("train")

    labelled = [(p, a.soc_code) for p, a in zip(postings, staged) if a is not None]
    counts: dict[str, int] = {}
    for _, c in labelled:
        counts[c] = counts.get(c, 0) + 1
    thin = sorted(c for c, n in counts.items() if n < 2)
    if thin:
        ctx.diagnostics.add(Diagnostic("train", "thin_class",
                                       f"{len(thin)} codes with a single matched posting left out of training: "
                                       + ", ".join(thin)))
    train = [(p, c) for p, c in labelled if counts[c] >= 2]
    classifier = None
    stats: dict = {"n_train": len(train), "n_classes": len({c for _, c in train})}
    if stats["n_classes"] >= 2:
        docs = [tokenize_normalize(p.description, tcfg) for p, _ in train]
        tfidf = fit_tfidf(docs)
        vectors = [vectorize(tfidf, t) for t in docs]
        labels = [c for _, c in train]
        scfg = SvmConfig(ctx.cfg.svm.C, ctx.cfg.svm.epochs, ctx.cfg.seed)
        svm = train_svm(vectors, labels, scfg)
        save_svm(svm, d / "svm.flat")
        _dump_json(d / "tfidf.json", tfidf.to_dict())
        cv = cross_validate(vectors, labels, ctx.cfg.svm.cv_folds, scfg)
        _dump_json(d / "cv.json", {"accuracy": cv.accuracy, "macro_precision": cv.macro_precision,
                                   "false_positive_rate": cv.false_positive_rate, "per_fold": cv.per_fold,
                                   "warnings": cv.warnings, "classes": cv.classes})
        classifier = TextClassifier(tfidf, svm, tcfg)
        stats.update(cv_accuracy=cv.accuracy, cv_false_positive_rate=cv.false_positive_rate)
    else:
        for name in ("svm.flat", "tfidf.json", "cv.json"):
            (d / name).unlink(missing_ok=True)
    try:
        assignments, cov = assign_titles(postings, matcher, classifier, staged=staged)
    except ClassifierRequired as exc:
        raise StageError("train", str(exc)) from None
    _write_tsv(d / "assignments.tsv", ["posting_id", "soc_code", "method", "score"],
               [(a.posting_id, a.soc_code, a.method, repr(a.score)) for a in assignments])
    stats["coverage"] = cov
    _dump_json(d / "stats.json", stats)
    return stats


def _load_assignments(ctx: Context) -> list[TitleAssignment]:
    return [TitleAssignment(r["posting_id"], r["soc_code"], r["method"], float(r["score"]))
            for r in _read_tsv(ctx.need("train", "assignments.tsv"))]


def stage_topics(ctx: Context, contexts_path: str | Path | None = None) -> dict:
    """Context extraction then the LDA grid.

    With ``contexts_path`` the context documents are read from that file
    instead of being extracted from the postings.
    """
    d = ctx.dir("topics")
    if contexts_path is not None:
        if not Path(contexts_path).exists():
            raise InputError(f"contexts file not found: {contexts_path}")
        contexts = [c for c in read_contexts(Path(contexts_path)) if c.tokens]
    else:
        postings = load_posting_records(ctx.need("extract", "postings.jsonl"))
        tcfg = token_config(ctx.cfg)
        contexts = []
        for p in postings:
            c = extract_context(p, ctx.cfg.anchor_terms, ctx.cfg.context_window, tcfg)
            if c is not None and c.tokens:
                contexts.append(c)
    write_contexts(contexts, d / "contexts.jsonl")
    if not contexts:
        raise StageError("topics", "no posting mentions an anchor term")
    g = ctx.cfg.lda
    seeds = tuple(ctx.cfg.seed + s for s in g.seeds)
    model, cells = grid_search(contexts, g.K, g.alpha, g.beta, seeds, g.iterations, g.burn_in, g.thin, g.top_n,
                               g.heldout_fraction, g.coherence_tol, g.perplexity_tol, g.restarts)
    chosen = select_cell(cells, g.coherence_tol, g.perplexity_tol)
    save_lda(model, d / "lda.flat")
    _dump_json(d / "grid.json", {"cells": [c.row() for c in cells], "selected": chosen})
    stats = {"n_contexts": len(contexts), "K": model.K, "alpha": model.alpha}
    _dump_json(d / "stats.json", stats)
    return stats


def write_contexts(contexts, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for c in contexts:
            fh.write(json.dumps({"posting_id": c.posting_id, "sentences": list(c.sentences),
                                 "tokens": list(c.tokens)}, sort_keys=True, ensure_ascii=False) + "\n")


def read_contexts(path: Path) -> list[ContextDoc]:
    with open(path, encoding="utf-8") as fh:
        out = []
        for line in fh:
            if line.strip():
                r = json.loads(line)
                out.append(ContextDoc(r["posting_id"], tuple(r["sentences"]), tuple(r["tokens"])))
        return out


def _families(ctx: Context) -> dict[str, str]:
    return {pid: fam[0] for pid, fam in family_rollup(_load_assignments(ctx), _taxonomy(ctx)).items()}


def stage_centrality(ctx: Context) -> dict:
    model = load_lda(ctx.need("topics", "lda.flat"))
    families = _families(ctx)
    cm = centrality(model.theta, model.doc_ids, families, ctx.cfg.centrality_bounds)
    _dump_json(ctx.dir("centrality") / "centrality.json", {
        "families": cm.families, "doc_counts": cm.doc_counts, "A": cm.A.tolist(), "A_hat": cm.A_hat.tolist(),
        "levels": cm.levels, "glyphs": cm.glyph_rows(), "warnings": cm.warnings, "bounds": list(ctx.cfg.centrality_bounds)})
    return {"n_families": len(cm.families)}


def _stage_stats(ctx: Context) -> list[tuple[str, int]]:
    merged: dict = {}
    for s in ("ingest", "filter", "dedup", "extract", "match", "train", "topics"):
        p = ctx.out / s / "stats.json"
        if p.exists():
            merged.update(json.loads(p.read_text(encoding="utf-8")))
    keys = ("n_records", "n_ingested", "n_irrelevant", "n_kept", "n_duplicates", "n_deduped", "n_staged",
            "n_unmatched", "n_train", "n_contexts")
    return [(k, merged[k]) for k in keys if k in merged]


def stage_report(ctx: Context) -> Report:
    cfg = ctx.cfg
    postings = load_posting_records(ctx.need("extract", "postings.jsonl"))
    taxonomy = _taxonomy(ctx)
    assignments = _load_assignments(ctx)
    families = _families(ctx)
    codes = {a.posting_id: a.soc_code for a in assignments}
    titles = {r.soc_code: r.title for r in taxonomy.records}
    model = load_lda(ctx.need("topics", "lda.flat"))
    grid = json.loads(ctx.need("topics", "grid.json").read_text(encoding="utf-8"))
    cells = [GridCell(**c) for c in grid["cells"]]
    labels = list(cfg.topic_labels) if len(cfg.topic_labels) == model.K else None
    if cfg.topic_labels and labels is None:
        logger.warning("topic_labels has %d entries for K=%d; labels omitted", len(cfg.topic_labels), model.K)

    rep = Report()
    rep.add(stats_table(_stage_stats(ctx)))
    for t in family_tables(postings, families, codes, titles):
        rep.add(t)
    for t in build_attribute_tables(postings, families, cfg.experience_edges):
        rep.add(t)
    rep.add(coverage_table(coverage(assignments)))
    cv_path = ctx.out / "train" / "cv.json"
    if cv_path.exists():
        cv = json.loads(cv_path.read_text(encoding="utf-8"))
        rep.add(cv_table(cv))
    rep.add(audit_table(audit_rows(assignments, postings, taxonomy)))
    rep.add(lda_selection_table(cells, grid["selected"]))
    for t in topic_tables(summarize_topics(model, 15, labels)):
        rep.add(t)
    cm = centrality(model.theta, model.doc_ids, families, cfg.centrality_bounds)
    for t in centrality_tables(cm, labels or ()):
        rep.add(t)
    dominant = dict(zip(model.doc_ids, (int(k) for k in model.dominant_topics())))
    rep.add(skill_share_table(*skill_share(families, dominant, model.K)))
    rep.add(provenance_table(provenance(ctx)))
    emit(rep, ctx.dir("report"), cfg.formats)
    return rep


def provenance(ctx: Context) -> dict:
    import numba
    import scipy

    cfg = ctx.cfg
    out = {
        "config_sha256": cfg.digest(),
        "seed": cfg.seed,
        "package_version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "numba": numba.__version__,
    }
    for name in ("corpus", "taxonomy", "stopwords", "lemma_table"):
        p = cfg.path(name)
        if p is not None and p.exists():
            out[f"{name}_sha256"] = _sha256(p)
    out["config"] = json.dumps(cfg.to_dict(), sort_keys=True, separators=(",", ":"))
    return out


_RUNNERS = {
    "ingest": stage_ingest, "filter": stage_filter, "dedup": stage_dedup, "extract": stage_extract,
    "match": stage_match, "train": stage_train, "topics": stage_topics, "centrality": stage_centrality,
    "report": stage_report,
}


def run_stage(stage: str, cfg: PipelineConfig, out: str | Path | None = None, **kwargs):
    """Run one stage; failures leave a ``FAILED`` marker naming the stage and cause."""
    out_dir = Path(out) if out is not None else cfg.path("output_dir")
    out_dir.mkdir(parents=True, exist_ok=True)
    ctx = Context(cfg, out_dir)
    marker = out_dir / "FAILED"
    marker.unlink(missing_ok=True)
    logger.info("stage %s", stage)
    try:
        return _RUNNERS[stage](ctx, **kwargs)
    except StageError as exc:
        marker.write_text(f"{exc.stage}: {exc.cause}\n", encoding="utf-8")
        raise
    except InputError as exc:
        marker.write_text(f"{stage}: {exc}\n", encoding="utf-8")
        raise
    except Exception as exc:
        marker.write_text(f"{stage}: {type(exc).__name__}: {exc}\n", encoding="utf-8")
        raise StageError(stage, f"{type(exc).__name__}: {exc}") from exc


def run_pipeline(cfg: PipelineConfig, out: str | Path | None = None) -> Report:
    """Every stage in order; returns the report built at the end."""
    result = None
    for stage in STAGES:
        result = run_stage(stage, cfg, out)
    return result
