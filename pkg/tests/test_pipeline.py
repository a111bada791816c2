import json

import pytest

from jobskills import cli
from jobskills.config import config_from_dict, load_config
from jobskills.fixtures import FAMILIES, PAPER_TOPIC_SHARES, topic_vocabularies
from jobskills.lda import align_topics, load_lda
from jobskills.pipeline import InputError, StageError, run_stage


def stat(out, stage, key):
    return json.loads((out / stage / "stats.json").read_text())[key]


def test_paper_fixture_report_shape(paper_run):
    out, rep = paper_run
    assert [r[0] for r in rep["centrality"].rows] == sorted(FAMILIES)
    assert len(rep["topic_shares"].rows) == 5
    stages = dict(rep["corpus_stats"].rows)
    assert stages["n_ingested"] >= stages["n_kept"] >= stages["n_deduped"]
    assert stages["n_deduped"] == 1128
    assert not (out / "FAILED").exists()
    prov = dict(rep["provenance"].rows)
    assert {"config_sha256", "seed", "corpus_sha256", "taxonomy_sha256", "config"} <= set(prov)


def test_reference_shares_on_paper_fixture(paper_run):
    out, rep = paper_run
    assignment, _ = align_topics(load_lda(out / "topics" / "lda.flat"), topic_vocabularies())
    shares = [r[2] for r in rep["topic_shares"].rows]
    for fitted, planted in enumerate(assignment):
        assert shares[fitted] == pytest.approx(100 * PAPER_TOPIC_SHARES[planted], abs=5.0)
    row = next(r for r in rep["skill_share"].rows if r[0] == "Computer and Mathematical")
    pct = {planted: row[2 + fitted] for fitted, planted in enumerate(assignment)}
    # the two skill sets the reference puts at 34.4% each
    assert pct[3] == pytest.approx(34.4, abs=5.0) and pct[4] == pytest.approx(34.4, abs=5.0)


def test_assignments_are_complete_and_correct(paper_run, paper_manifest):
    out, _ = paper_run
    rows = [line.split("\t") for line in (out / "train" / "assignments.tsv").read_text().splitlines()[1:]]
    truth = {t["id"]: t["soc_code"] for t in paper_manifest["truth"]}
    assert len(rows) == len(truth)
    wrong = [r for r in rows if truth[r[0]] != r[1]]
    assert len(wrong) <= 0.02 * len(rows)


def test_percentage_columns_partition(paper_run):
    _, rep = paper_run
    for name in ("state_distribution", "remote_share", "degree_distribution", "experience_buckets",
                 "contract_share", "family_counts", "topic_shares", "title_coverage"):
        assert sum(rep[name].column(rep[name].percent_columns[0])) == pytest.approx(100.0, abs=0.1), name
    for row in rep["skill_share"].rows:
        assert sum(row[2:]) == pytest.approx(100.0, abs=0.1)


def test_stages_resume_from_artifacts(paper_dir, tmp_path):
    cfg = load_config(paper_dir / "config.json")
    out = tmp_path / "partial"
    for stage in ("ingest", "filter", "dedup"):
        run_stage(stage, cfg, out)
    assert stat(out, "dedup", "n_deduped") == 1128
    with pytest.raises(InputError):
        run_stage("centrality", cfg, out)
    assert (out / "FAILED").read_text().startswith("centrality")


def test_empty_corpus_fails_at_ingest(tmp_path):
    (tmp_path / "corpus.jsonl").write_text("")
    cfg = config_from_dict({}, tmp_path)
    with pytest.raises(StageError, match="empty corpus") as exc:
        run_stage("ingest", cfg, tmp_path / "out")
    assert exc.value.stage == "ingest"
    assert "ingest" in (tmp_path / "out" / "FAILED").read_text()


def test_cli_exit_codes(tmp_path, capsys):
    assert cli.main(["--config", str(tmp_path / "nope.json"), "ingest"]) == 1
    fx = tmp_path / "fx"
    assert cli.main(["fixture", "--kind", "paper", "--out", str(fx)]) == 0
    cfg = str(fx / "config.json")
    assert cli.main(["--config", cfg, "--out", str(tmp_path / "o"), "ingest"]) == 0
    assert cli.main(["filter", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    assert cli.main(["--config", cfg, "--out", str(tmp_path / "o"), "centrality"]) == 1
    (fx / "corpus.jsonl").write_text("")
    assert cli.main(["--config", cfg, "--out", str(tmp_path / "e"), "ingest"]) == 2
    assert "empty corpus" in capsys.readouterr().err


def test_cli_topics_on_context_file(tmp_path):
    fx = tmp_path / "two"
    assert cli.main(["fixture", "--kind", "two-topic", "--out", str(fx)]) == 0
    out = tmp_path / "o"
    assert cli.main(["--config", str(fx / "config.json"), "--out", str(out), "topics",
                     "--contexts", str(fx / "contexts.jsonl")]) == 0
    assert json.loads((out / "topics" / "stats.json").read_text())["K"] == 2
