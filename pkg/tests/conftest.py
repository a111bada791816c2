import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from jobskills.config import load_config  # noqa: E402
from jobskills.fixtures import write_fixture  # noqa: E402
from jobskills.pipeline import run_pipeline  # noqa: E402


@pytest.fixture(scope="session")
def paper_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("paper")
    write_fixture(d, seed=0, kind="paper")
    return d


@pytest.fixture(scope="session")
def paper_manifest(paper_dir):
    return json.loads((paper_dir / "manifest.json").read_text())


@pytest.fixture(scope="session")
def paper_run(paper_dir):
    """One full pipeline run over the full synthetic fixture; returns (out_dir, report)."""
    cfg = load_config(paper_dir / "config.json")
    out = paper_dir / "run1"
    report = run_pipeline(cfg, out)
    return out, report
