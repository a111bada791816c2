"""Report tables and their delimited, markdown and JSON renderings."""
from __future__ import annotations

import csv
import io
import json
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .centrality import CentralityMatrix
from .ingest import JobPosting

logger = logging.getLogger(__name__)

FORMATS = ("delimited", "markdown", "structured")
_EXT = {"delimited": ".csv", "markdown": ".md", "structured": ".json"}
DEGREE_ORDER = ("associate", "bachelor", "master", "phd")


@dataclass
class Table:
    name: str
    columns: list[str]
    rows: list[list]
    notes: dict = field(default_factory=dict)  # denominators and other context
    percent_columns: tuple[str, ...] = ()

    def column(self, name: str) -> list:
        j = self.columns.index(name)
        return [r[j] for r in self.rows]

    def as_dicts(self) -> list[dict]:
        return [dict(zip(self.columns, r)) for r in self.rows]


@dataclass
class Report:
    tables: dict[str, Table] = field(default_factory=dict)

    def add(self, table: Table) -> Table:
        self.tables[table.name] = table
        return table

    def __getitem__(self, name: str) -> Table:
        return self.tables[name]


def pct(count: float, denom: float) -> float:
    return 100.0 * count / denom if denom else 0.0


def _share_table(name: str, key: str, counts: Mapping, order: Sequence | None = None, notes: dict | None = None) -> Table:
    denom = sum(counts.values())
    keys = list(order) if order is not None else sorted(counts, key=lambda k: (-counts[k], str(k)))
    rows = [[k, int(counts.get(k, 0)), pct(counts.get(k, 0), denom)] for k in keys]
    return Table(name, [key, "count", "share_pct"], rows, {"denominator": int(denom), **(notes or {})},
                 ("share_pct",))


# ---------------------------------------------------------------------------
# attribute tables


def experience_bucket_labels(edges: Sequence[int]) -> list[str]:
    labels, lo = [], 0
    for e in edges:
        labels.append(f"{lo}-{e}")
        lo = e + 1
    labels.append(f">{edges[-1]}")
    return labels


def experience_bucket(years: int, edges: Sequence[int]) -> str:
    labels = experience_bucket_labels(edges)
    for e, lab in zip(edges, labels):
        if years <= e:
            return lab
    return labels[-1]


def salary_midpoint(p: JobPosting) -> float | None:
    if p.salary_min_usd_year is None or p.salary_max_usd_year is None:
        return None
    return (p.salary_min_usd_year + p.salary_max_usd_year) / 2.0


def build_attribute_tables(postings: Sequence[JobPosting], families: Mapping[str, str],
                           experience_edges: Sequence[int] = (2, 5, 10),
                           four_states: Sequence[str] = ("CA", "TX", "NY", "FL")) -> list[Table]:
    """State, remote, contract, degree, experience and salary tables.

    Postings lacking an attribute are left out of that table; each table
    records its denominator.
    """
    n = len(postings)
    states = Counter(p.state for p in postings if p.state)
    n_state = sum(states.values())
    state_t = _share_table("state_distribution", "state", states,
                           notes={"missing": n - n_state,
                                  "top4_share_pct": pct(sum(c for _, c in states.most_common(4)), n_state)})

    remote = Counter("remote" if p.remote else "on_site" for p in postings if p.remote is not None)
    remote_t = _share_table("remote_share", "work_mode", remote, order=("remote", "on_site"),
                            notes={"missing": n - sum(remote.values())})

    contract = Counter(p.contract_type for p in postings if p.contract_type)
    contract_t = _share_table("contract_share", "contract_type", contract,
                              notes={"missing": n - sum(contract.values())})

    degree = Counter(p.degree_req for p in postings if p.degree_req)
    degree_t = _share_table("degree_distribution", "degree", degree, order=DEGREE_ORDER,
                            notes={"not_stated": n - sum(degree.values())})

    exp = Counter(experience_bucket(p.experience_years_min, experience_edges)
                  for p in postings if p.experience_years_min is not None)
    exp_t = _share_table("experience_buckets", "years", exp, order=experience_bucket_labels(experience_edges),
                         notes={"not_stated": n - sum(exp.values())})

    by_fam = defaultdict(list)
    for p in postings:
        m = salary_midpoint(p)
        if m is not None and p.id in families:
            by_fam[families[p.id]].append(m)
    sal_rows = [[f, len(v), float(np.mean(v)), float(np.median(v))] for f, v in sorted(by_fam.items())]
    sal_t = Table("salary_by_family", ["family", "n_with_salary", "mean_midpoint_usd", "median_midpoint_usd"],
                  sal_rows, {"estimator": "midpoint of (min, max) annualized range",
                             "denominator": sum(len(v) for v in by_fam.values())})

    four = sum(states.get(s, 0) for s in four_states)
    summary = Table("attribute_summary", ["metric", "value_pct", "numerator", "denominator"], [
        ["remote_share", pct(remote.get("remote", 0), sum(remote.values())), remote.get("remote", 0), sum(remote.values())],
        ["four_state_share", pct(four, n_state), four, n_state],
        *[[f"degree_{d}", pct(degree.get(d, 0), sum(degree.values())), degree.get(d, 0), sum(degree.values())]
          for d in DEGREE_ORDER],
    ], {"four_states": list(four_states)}, ("value_pct",))
    return [state_t, remote_t, contract_t, degree_t, exp_t, sal_t, summary]


# ---------------------------------------------------------------------------
# occupation tables


def family_tables(postings: Sequence[JobPosting], families: Mapping[str, str], codes: Mapping[str, str],
                  titles: Mapping[str, str], top_n: int = 3) -> list[Table]:
    """Family counts, monthly family trend (dated postings only) and top titles per family."""
    fam_counts = Counter(families[p.id] for p in postings if p.id in families)
    counts_t = _share_table("family_counts", "family", fam_counts)

    dated = [p for p in postings if p.posted_date is not None and p.id in families]
    trend = Counter((families[p.id], p.posted_date.strftime("%Y-%m")) for p in dated)
    trend_rows = [[f, m, c] for (f, m), c in sorted(trend.items())]
    trend_t = Table("family_trend", ["family", "month", "count"], trend_rows,
                    {"dated": len(dated), "undated": len(postings) - len(dated),
                     "coverage_pct": pct(len(dated), len(postings))})

    rows = []
    for f in sorted(fam_counts):
        c = Counter(codes[p.id] for p in postings if families.get(p.id) == f)
        for rank, (code, k) in enumerate(sorted(c.items(), key=lambda kv: (-kv[1], kv[0]))[:top_n], 1):
            rows.append([f, rank, code, titles.get(code, ""), k, pct(k, fam_counts[f])])
    top_t = Table("family_top_titles", ["family", "rank", "soc_code", "title", "count", "share_of_family_pct"], rows)
    return [counts_t, trend_t, top_t]


def coverage_table(coverage: Mapping) -> Table:
    methods = [m for m in coverage if m != "total"]
    return _share_table("title_coverage", "method", {m: coverage[m]["count"] for m in methods}, order=methods)


def cv_table(cv: Mapping) -> Table:
    """Per-fold rows plus a mean row, from the persisted CV summary."""
    folds = cv["per_fold"]
    rows = [[m["fold"], m["n"], m["accuracy"], m["macro_precision"], m["false_positive_rate"]] for m in folds]
    rows.append(["mean", sum(m["n"] for m in folds), cv["accuracy"], cv["macro_precision"], cv["false_positive_rate"]])
    return Table("cv_metrics", ["fold", "n", "accuracy", "macro_precision", "false_positive_rate"], rows,
                 {"classes": len(cv["classes"]), "warnings": list(cv["warnings"])})


def audit_table(rows: Sequence[dict]) -> Table:
    cols = ["method", "posting_id", "title_raw", "soc_code", "onet_title", "score"]
    return Table("match_audit", cols, [[r[c] for c in cols] for r in rows])


# ---------------------------------------------------------------------------
# topic tables


def lda_selection_table(cells, chosen: int) -> Table:
    rows = [[c.K, c.alpha, c.beta, c.seed, c.coherence, c.perplexity, c.heldout_perplexity,
             "yes" if i == chosen else "", c.error] for i, c in enumerate(cells)]
    return Table("lda_selection", ["K", "alpha", "beta", "seed", "coherence_umass", "perplexity",
                                   "heldout_perplexity", "selected", "error"], rows)


def topic_tables(summaries, top_n: int = 15) -> list[Table]:
    share_rows = [[s.topic_id + 1, s.label or "", 100.0 * s.share_of_docs] for s in summaries]
    shares = Table("topic_shares", ["topic", "label", "share_pct"], share_rows,
                   {"basis": "dominant topic per context document"}, ("share_pct",))
    word_rows = [[s.topic_id + 1, r, w, p] for s in summaries for r, (w, p) in enumerate(s.top_words[:top_n], 1)]
    words = Table("topic_words", ["topic", "rank", "word", "phi"], word_rows)
    return [shares, words]


def centrality_tables(cm: CentralityMatrix, labels: Sequence[str] = ()) -> list[Table]:
    K = cm.A.shape[1]
    tcols = [f"s{k + 1}" for k in range(K)]
    a_rows = [[f, n, *map(float, a), *map(float, ah), *lv]
              for f, n, a, ah, lv in zip(cm.families, cm.doc_counts, cm.A, cm.A_hat, cm.levels)]
    cols = (["family", "n_docs"] + [f"A_{c}" for c in tcols] + [f"Ahat_{c}" for c in tcols]
            + [f"level_{c}" for c in tcols])
    matrix = Table("centrality", cols, a_rows, {"warnings": list(cm.warnings),
                                                 "topic_labels": list(labels)})
    glyphs = Table("centrality_glyphs", ["family", "glyphs"],
                   [[f, g] for f, g in zip(cm.families, cm.glyph_rows())],
                   {"legend": "□□□□ not, ■□□□ slightly, ■■■□ moderately, ■■■■ highly central"})
    return [matrix, glyphs]


def skill_share_table(names, shares: np.ndarray, counts) -> Table:
    K = shares.shape[1] if shares.size else 0
    rows = [[f, n, *(100.0 * shares[i])] for i, (f, n) in enumerate(zip(names, counts))]
    cols = ["family", "n_docs"] + [f"s{k + 1}_pct" for k in range(K)]
    return Table("skill_share", cols, rows, {"basis": "dominant topic per posting"},
                 tuple(cols[2:]))


def stats_table(counts: Sequence[tuple[str, int]]) -> Table:
    return Table("corpus_stats", ["stage", "count"], [[k, int(v)] for k, v in counts])


def provenance_table(items: Mapping[str, str]) -> Table:
    return Table("provenance", ["key", "value"], [[k, str(v)] for k, v in items.items()])


# ---------------------------------------------------------------------------
# rendering


def _cell(v, percent: bool = False) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if v != v:
            return "nan"
        return f"{v:.4f}" if percent else f"{v:.6f}"
    return str(v)


def _rendered_rows(t: Table) -> list[list[str]]:
    pc = {t.columns.index(c) for c in t.percent_columns if c in t.columns}
    return [[_cell(v, j in pc) for j, v in enumerate(r)] for r in t.rows]


def render_delimited(t: Table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(t.columns)
    w.writerows(_rendered_rows(t))
    return buf.getvalue()


def render_markdown(t: Table) -> str:
    def esc(s: str) -> str:
        return s.replace("|", "\\|")

    lines = [f"## {t.name}", ""]
    lines.append("| " + " | ".join(esc(c) for c in t.columns) + " |")
    lines.append("|" + "|".join("---" for _ in t.columns) + "|")
    for r in _rendered_rows(t):
        lines.append("| " + " | ".join(esc(c) for c in r) + " |")
    if t.notes:
        lines.append("")
        for k in sorted(t.notes):
            lines.append(f"- {k}: {_note(t.notes[k])}")
    return "\n".join(lines) + "\n"


def _note(v) -> str:
    if isinstance(v, float):
        return _cell(v, True)
    if isinstance(v, (list, tuple)):
        return ", ".join(str(x) for x in v) if v else "none"
    return str(v)


def _jsonable(v, percent: bool = False):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if v != v:
            return None
        return round(v, 4 if percent else 6)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def table_document(t: Table) -> dict:
    pc = set(t.percent_columns)
    return {"name": t.name, "columns": t.columns,
            "rows": [{c: _jsonable(v, c in pc) for c, v in zip(t.columns, r)} for r in t.rows],
            "notes": _jsonable(t.notes)}


def render_structured(t: Table) -> str:
    return json.dumps(table_document(t), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


_RENDER = {"delimited": render_delimited, "markdown": render_markdown, "structured": render_structured}


def emit(report: Report, out_dir: str | Path, formats: Sequence[str] = FORMATS) -> list[Path]:
    """Write one file per table per format, named ``<table><ext>``; returns paths written."""
    bad = set(formats) - set(FORMATS)
    if bad:
        raise ValueError(f"unknown formats: {sorted(bad)}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name in sorted(report.tables):
        t = report.tables[name]
        for fmt in FORMATS:
            if fmt not in formats:
                continue
            p = out / f"{name}{_EXT[fmt]}"
            p.write_text(_RENDER[fmt](t), encoding="utf-8", newline="\n")
            written.append(p)
    if "structured" in formats:
        doc = {"tables": sorted(report.tables)}
        p = out / "report.json"
        p.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        written.append(p)
    return written
