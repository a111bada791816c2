import dataclasses
import io
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jobskills.ingest import (FilterRule, FilterRuleSet, JobPosting, extract_attributes, filter_irrelevant,
                              parse_degree, parse_experience, parse_postings, parse_salary, parse_state)


def rec(i, **kw):
    d = {"id": f"p{i}", "title": "Data Analyst", "description": f"Posting number {i}."}
    d.update(kw)
    return json.dumps(d)


def test_parse_empty_stream():
    diags = []
    assert parse_postings(io.StringIO(""), diags) == []
    assert diags == []


def test_parse_three_valid_lines_in_order():
    out = parse_postings([rec(1), rec(2), rec(3)])
    assert [p.id for p in out] == ["p1", "p2", "p3"]


def test_missing_description_is_skipped_with_diagnostic():
    bad = json.dumps({"id": "p9", "title": "x"})
    diags = []
    out = parse_postings([rec(1), bad, rec(2)], diags)
    assert [p.id for p in out] == ["p1", "p2"]
    assert len(diags) == 1
    assert diags[0].field == "description" and "description" in diags[0].message
    assert diags[0].line == 2


def test_parse_rejects_bad_json_and_duplicate_ids():
    diags = []
    out = parse_postings(["{not json", rec(1), rec(1)], diags)
    assert len(out) == 1
    assert [d.kind for d in diags] == ["bad_json", "duplicate_id"]


def test_posting_invariants():
    with pytest.raises(ValueError):
        JobPosting("", "t", "d")
    with pytest.raises(ValueError):
        JobPosting("a", "t", "   ")
    with pytest.raises(ValueError):
        JobPosting("a", "t", "d", state="ZZ")
    with pytest.raises(ValueError):
        JobPosting("a", "t", "d", salary_min_usd_year=10, salary_max_usd_year=5)


def test_posting_record_round_trip():
    p = parse_postings([rec(1, posted_date="2023-06-01", state="ny", contract_type="Full-time")])[0]
    assert p.state == "NY" and p.contract_type == "full_time"
    assert JobPosting.from_record(p.to_record()) == p


P_FORBID = JobPosting("a", "Writer", "Please note: the use of ChatGPT is forbidden for applicants.")
P_WRITTEN = JobPosting("b", "Writer", "Fun fact: we used ChatGPT to write this job posting.")
P_DEMAND = JobPosting("c", "Writer", "Requires experience with ChatGPT for content creation.")


def test_filter_examples():
    kept, removed = filter_irrelevant([P_FORBID, P_WRITTEN, P_DEMAND])
    assert [p.id for p in kept] == ["c"]
    assert {p.id for p, _ in removed} == {"a", "b"}


def test_filter_with_empty_rule_set_keeps_everything():
    kept, removed = filter_irrelevant([P_FORBID, P_WRITTEN], FilterRuleSet(()))
    assert len(kept) == 2 and removed == []


def test_filter_partition_idempotence_and_evidence():
    posts = [P_FORBID, P_WRITTEN, P_DEMAND] * 1
    rules = FilterRuleSet()
    kept, removed = filter_irrelevant(posts, rules)
    assert len(kept) + len(removed) == len(posts)
    assert filter_irrelevant(kept, rules)[1] == []
    by_id = {r.rule_id: r for r in rules.rules}
    for p, rid in removed:
        assert by_id[rid].compiled().search(p.description)


def test_bad_user_rule_is_rejected():
    with pytest.raises(ValueError):
        FilterRuleSet((FilterRule("x", "(", ""),))
    rs = FilterRuleSet.from_config([{"id": "mine", "pattern": r"\bunicorn\b"}])
    assert rs.first_match("a unicorn role") == "mine"


def test_salary_examples():
    assert parse_salary("$80,000 - $100,000 a year") == [(80000, 100000)]
    assert parse_salary("$40/hour") == [(83200, 83200)]
    assert parse_salary("up to $120k") == [(120000, 120000)]
    assert parse_salary("$20 - $25 per hour", hours_per_year=2000) == [(40000, 50000)]


def test_degree_minimum_required_wins():
    assert parse_degree("Bachelor's degree required; Master's preferred") == "bachelor"
    assert parse_degree("PhD or Master's degree in statistics") == "master"
    assert parse_degree("Master's degree preferred.") == "master"
    assert parse_degree("No formal education needed.") is None


def test_experience_takes_lower_bound():
    assert parse_experience("5+ years of Python") == 5
    assert parse_experience("3-5 years experience") == 3
    assert parse_experience("at least 2 years") == 2
    assert parse_experience("no experience needed") is None


def test_state_parsing():
    assert parse_state("Austin, TX") == "TX"
    assert parse_state("Remote - California") == "CA"
    assert parse_state("Mars") is None


def test_extract_attributes_conflict_and_preservation():
    p = JobPosting("x", "Analyst", "Pay is $50,000 - $60,000 a year. Later: $70,000 - $80,000 a year. "
                   "Bachelor's degree required. 3+ years of experience. Fully remote.", location_raw="Boston, MA")
    diags = []
    q = extract_attributes(p, diagnostics=diags)
    assert (q.salary_min_usd_year, q.salary_max_usd_year) == (50000, 60000)
    assert [d.kind for d in diags] == ["salary_conflict"]
    assert q.degree_req == "bachelor" and q.experience_years_min == 3
    assert q.remote is True and q.state == "MA"
    assert q.description == p.description and q.title_raw == p.title_raw


def test_extract_keeps_existing_values():
    p = JobPosting("x", "Analyst", "Master's degree required. Remote.", degree_req="phd", remote=False)
    q = extract_attributes(p)
    assert q.degree_req == "phd" and q.remote is False


def test_no_remote_cue_means_on_site():
    assert extract_attributes(JobPosting("x", "Chef", "Cook meals in our kitchen.")).remote is False


@settings(max_examples=150, deadline=None)
@given(st.lists(st.sampled_from([
    "Bachelor's degree required.", "Master's preferred.", "$30/hour.", "$90,000 - $95,000 a year.",
    "5+ years of experience.", "Remote friendly.", "Based in Denver, CO.", "Contract role.", "We love tea.",
]), min_size=1, max_size=6))
def test_extract_idempotent(parts):
    p = JobPosting("h", "Role", " ".join(parts))
    once = extract_attributes(p)
    assert extract_attributes(once) == once
    assert dataclasses.replace(once, **{f.name: getattr(p, f.name) for f in dataclasses.fields(p)
                                        if f.name in ("description", "title_raw")}) == once
