import io

import pytest

from jobskills import fixtures
from jobskills.ingest import JobPosting
from jobskills.onet import (ClassifierRequired, ConsistencyError, OnetTaxonomy, Occupation, TaxonomyError,
                            TitleAssignment, TitleMatcher, assign_titles, audit_rows, family_counts,
                            family_rollup, load_taxonomy, match_cosine, match_fuzzy, match_stages, title_tokens)
from jobskills.text import partial_ratio

from oracles import partial_ratio_windows

HEADER = "soc_code\ttitle\tfamily_l1\tfamily_l2\tfamily_l3\n"


@pytest.fixture(scope="module")
def tax():
    return fixtures.taxonomy()


@pytest.fixture(scope="module")
def matcher(tax):
    return TitleMatcher(tax)


def test_load_taxonomy_examples():
    t = load_taxonomy(io.StringIO(HEADER + "15-1252\tSoftware Developers\tComputer\ta\tb\n"
                                           "15-2051\tData Scientists\tComputer\ta\tc\n"
                                           "35-1011\tChefs\tFood\td\te\n"))
    assert len(t) == 3
    with pytest.raises(TaxonomyError, match="family_l1"):
        load_taxonomy(io.StringIO("soc_code\ttitle\tfamily_l2\tfamily_l3\n1\tx\ty\tz\n"))
    with pytest.raises(TaxonomyError, match="15-1252"):
        load_taxonomy(io.StringIO(HEADER + "15-1252\tA\tF\t\t\n15-1252\tB\tF\t\t\n"))


def test_taxonomy_major_group_consistency():
    with pytest.raises(TaxonomyError):
        OnetTaxonomy([Occupation("15-1252.00", "A", "Computer"), Occupation("15-2051.00", "B", "Other")])


def test_taxonomy_tsv_round_trip(tax):
    assert load_taxonomy(io.StringIO(tax.to_tsv())).records == tax.records


def test_match_cosine_examples(matcher):
    a = match_cosine("Software Developers", matcher)
    assert a.soc_code == "15-1252.00" and a.score == pytest.approx(1.0)
    assert match_cosine("Underwater Basket Weaver", matcher) is None
    assert max(matcher.cosine_scores(title_tokens("Underwater Basket Weaver"))) < 0.95
    b = match_cosine("Sr. Software Developer", matcher)
    assert b is not None and b.soc_code == "15-1252.00"
    assert title_tokens("Sr. Software Developer") == title_tokens("Software Developers")


def test_match_fuzzy_examples(tax):
    m = TitleMatcher(tax)
    a = match_fuzzy("Marketing Manager - Growth Team", m)
    assert a is not None and a.soc_code == "11-2021.00" and a.score >= 0.95
    assert partial_ratio_windows("marketing manager growth team", "marketing manager") == 1.0
    assert partial_ratio("Software Developers", "Software Developers") == 1.0
    assert partial_ratio_windows("chef", "market research analyst") < 0.95
    chef_only = TitleMatcher(OnetTaxonomy([Occupation("13-1161", "Market Research Analysts", "Business")]))
    assert match_fuzzy("Chef", chef_only) is None


class Fixed:
    def __init__(self, code):
        self.code = code
        self.calls = 0

    def predict_text(self, text):
        self.calls += 1
        return self.code, 0.0


def test_assign_titles_stage_precedence(matcher):
    posts = [JobPosting("a", "Software Developers", "x"), JobPosting("b", "Zyx Qwv", "x")]
    clf = Fixed("15-2051.00")
    out, cov = assign_titles(posts, matcher, clf)
    assert [a.method for a in out] == ["cosine_exact", "classifier"]
    assert clf.calls == 1
    assert out[1].score == 0.5
    assert cov["total"] == 2 and cov["classifier"]["count"] == 1
    with pytest.raises(ClassifierRequired, match="classifier required"):
        assign_titles(posts, matcher, None)
    assert assign_titles([], matcher, None) == ([], {"cosine_exact": {"count": 0, "share": 0.0},
                                                     "fuzzy_partial": {"count": 0, "share": 0.0},
                                                     "classifier": {"count": 0, "share": 0.0}, "total": 0})
    with pytest.raises(ConsistencyError):
        assign_titles([posts[1]], matcher, Fixed("99-9999"))


def test_stage_coverage_on_title_fixture(matcher):
    fx = fixtures.title_fixture(n=300, fractions=(0.45, 0.45, 0.1), seed=2)
    staged = match_stages(fx.postings, matcher)
    for p, a in zip(fx.postings, staged):
        k = fx.kind[p.id]
        if k == "verbatim":
            assert a.method == "cosine_exact" and a.soc_code == fx.truth[p.id]
        elif k == "variant":
            assert a is not None and a.soc_code == fx.truth[p.id]
        else:
            assert a is None
    share = sum(a is not None for a in staged) / len(staged)
    assert share == pytest.approx(0.9)


def test_threshold_monotonicity(matcher):
    fx = fixtures.title_fixture(n=200, seed=5)
    prev = None
    for tau in (0.5, 0.7, 0.9, 0.95, 0.99, 1.0):
        n = sum(a is not None for a in match_stages(fx.postings, matcher, tau, tau))
        if prev is not None:
            assert n <= prev
        prev = n


def test_determinism(matcher):
    fx = fixtures.title_fixture(n=120, seed=9)
    assert match_stages(fx.postings, matcher) == match_stages(fx.postings, TitleMatcher(fixtures.taxonomy()))


def test_family_rollup_examples(tax):
    table = family_rollup([TitleAssignment("p", "15-1252.00", "cosine_exact", 1.0)], tax)
    assert table["p"][0] == "Computer and Mathematical"
    assert family_rollup([], tax) == {}
    assert len({r.family_l1 for r in tax.records}) == 9
    with pytest.raises(ConsistencyError):
        family_rollup([TitleAssignment("p", "00-0000", "classifier", 0.5)], tax)
    assert family_counts(table) == {"Computer and Mathematical": 1}


def test_audit_rows_sorted_lowest_first(tax):
    posts = [JobPosting("a", "Software Developers", "x"), JobPosting("b", "Chefs", "x")]
    rows = audit_rows([TitleAssignment("a", "15-1252.00", "cosine_exact", 1.0),
                       TitleAssignment("b", "15-1252.00", "classifier", 0.6)], posts, tax)
    assert [r["posting_id"] for r in rows] == ["b", "a"]
    assert rows[0]["onet_title"] == "Software Developers"
