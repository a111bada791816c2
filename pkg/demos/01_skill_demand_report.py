"""Walk through the whole pipeline on the synthetic job-posting corpus.

Run from the repo root:  python demos/01_skill_demand_report.py [workdir]
"""
# %%
import sys
import tempfile
from pathlib import Path

from jobskills.config import load_config
from jobskills.fixtures import write_fixture
from jobskills.pipeline import run_pipeline
from jobskills.report import render_markdown

work = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="jobskills-"))

# %% [markdown]
# The generator writes a corpus, a small occupation taxonomy and a config.
# The manifest records what was planted, so we can compare the report against it.

# %%
manifest = write_fixture(work / "fixture", seed=0, kind="paper")
print(f"{manifest['n_records']} raw records, {manifest['n_unique']} unique postings planted")

# %%
cfg = load_config(work / "fixture" / "config.json")
report = run_pipeline(cfg, work / "run")

# %% [markdown]
# Stage counts first: what survived ingest, the relevance filter and dedup.

# %%
print(render_markdown(report["corpus_stats"]))

# %% [markdown]
# Job attributes, then the planted values for comparison.

# %%
print(render_markdown(report["attribute_summary"]))
print("planted remote share:", round(100 * manifest["remote_share"], 2))
print("planted bachelor share:", round(100 * manifest["degree_shares"]["bachelor"], 2))

# %% [markdown]
# Skill sets found by the topic model, with their top words.

# %%
print(render_markdown(report["topic_shares"]))
print(render_markdown(report["topic_words"]))

# %% [markdown]
# How central each skill set is to each occupation family.
# Each glyph group is one skill set: four filled squares is highly central, all empty is not central.

# %%
print(render_markdown(report["centrality_glyphs"]))
print("artifacts in", work / "run" / "report")
