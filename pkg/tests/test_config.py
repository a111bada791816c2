import json

import pytest

from jobskills.config import ConfigError, PipelineConfig, config_from_dict, load_config
from jobskills.fixtures import default_config


def test_defaults_are_valid():
    cfg = PipelineConfig()
    assert cfg.thresholds.dedup == 0.9 and cfg.lda.K == (5,)
    assert cfg.hours_per_year == 2080


@pytest.mark.parametrize("patch", [
    {"thresholds": {"dedup": 0.0}},
    {"thresholds": {"fuzzy_match": 1.5}},
    {"seed": "zero"},
    {"lda": {"K": []}},
    {"lda": {"K": [0]}},
    {"centrality_bounds": [0.5, 0.25, 0.75]},
    {"experience_edges": [5, 2]},
    {"formats": ["pdf"]},
    {"anchor_terms": []},
    {"nonsense": 1},
    {"lda": {"bogus": 1}},
])
def test_invalid_configs(patch):
    with pytest.raises(ConfigError):
        config_from_dict(patch)


def test_load_resolves_relative_paths(tmp_path):
    (tmp_path / "c.json").write_text(json.dumps(default_config()))
    cfg = load_config(tmp_path / "c.json")
    assert cfg.path("corpus") == tmp_path / "corpus.jsonl"
    assert cfg.lda.alpha == (1.0,) and cfg.lda.restarts == 4
    assert cfg.path("stopwords") is None


def test_load_errors(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "missing.json")
    (tmp_path / "bad.json").write_text("{")
    with pytest.raises(ConfigError, match="invalid JSON"):
        load_config(tmp_path / "bad.json")
    (tmp_path / "list.json").write_text("[]")
    with pytest.raises(ConfigError):
        load_config(tmp_path / "list.json")


def test_digest_and_replace():
    a = config_from_dict(default_config())
    b = config_from_dict(default_config(), base_dir="/elsewhere")
    assert a.digest() == b.digest()
    c = a.replace(seed=7)
    assert c.seed == 7 and c.digest() != a.digest()
    assert config_from_dict(a.to_dict()) == a
