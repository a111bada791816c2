import numpy as np
import pytest

from jobskills.dedup import ConsistencyError, DuplicateCluster, deduplicate, find_duplicates
from jobskills.fixtures import planted_duplicates
from jobskills.ingest import JobPosting
from jobskills.text import fit_tfidf, tokenize_normalize

from oracles import cosine_all_pairs, tfidf_dense


def model_for(posts):
    return fit_tfidf([tokenize_normalize(p.description) for p in posts])


def run(posts, threshold=0.9):
    clusters = find_duplicates(posts, model_for(posts), threshold)
    return clusters, deduplicate(posts, clusters)


def test_identical_descriptions_form_one_cluster():
    posts = [JobPosting("a", "t", "Write python code daily."), JobPosting("b", "t", "Write python code daily."),
             JobPosting("c", "t", "Bake bread at dawn.")]
    clusters, (kept, manifest) = run(posts)
    assert len(clusters) == 1
    c = clusters[0]
    assert set(c.member_ids) == {"a", "b"} and c.representative_id == "a"
    assert c.pairwise_scores[0][2] == pytest.approx(1.0)
    assert [p.id for p in kept] == ["a", "c"]


def test_empty_and_unrelated_corpora():
    assert find_duplicates([], model_for([JobPosting("a", "t", "hello world")])) == []
    posts = [JobPosting("a", "t", "alpha beta gamma"), JobPosting("b", "t", "alpha delta epsilon")]
    clusters, (kept, _) = run(posts)
    assert clusters == [] and kept == posts


def test_no_clusters_is_identity_and_cluster_of_three():
    posts = [JobPosting(f"p{i}", "t", f"doc {i}") for i in range(10)]
    assert deduplicate(posts, [])[0] == posts
    c = DuplicateCluster("p0", ("p0", "p4", "p7"), (("p0", "p4", 0.95), ("p4", "p7", 0.93)))
    kept, manifest = deduplicate(posts, [c])
    assert len(kept) == 8
    assert {m.removed_id for m in manifest} == {"p4", "p7"}


def test_unknown_cluster_id_is_fatal():
    posts = [JobPosting("a", "t", "x")]
    with pytest.raises(ConsistencyError):
        deduplicate(posts, [DuplicateCluster("a", ("a", "zz"), ())])


def test_representative_is_earliest_posted():
    import datetime as dt
    posts = [JobPosting("b", "t", "same text here", posted_date=dt.date(2023, 6, 2)),
             JobPosting("a", "t", "same text here"),
             JobPosting("c", "t", "same text here", posted_date=dt.date(2023, 6, 1))]
    clusters, _ = run(posts)
    assert clusters[0].representative_id == "c"


def test_planted_pair_sharing_95_percent_of_tokens():
    fx = planted_duplicates(n_distinct=5, n_pairs=1, doc_len=20, seed=3)
    # one swapped token in twenty; dense oracle gives the planted cosine
    _, X = tfidf_dense([tokenize_normalize(p.description) for p in fx.postings])
    ids = [p.id for p in fx.postings]
    a, b = fx.pairs[0]
    assert cosine_all_pairs(X)[ids.index(a), ids.index(b)] >= 0.9
    clusters, _ = run(fx.postings)
    assert [set(c.member_ids) for c in clusters] == [{a, b}]


def test_planted_fixture_removals_match_oracle():
    fx = planted_duplicates()
    docs = [tokenize_normalize(p.description) for p in fx.postings]
    _, X = tfidf_dense(docs)
    S = cosine_all_pairs(X)
    ids = [p.id for p in fx.postings]
    dup_ids = {d for _, d in fx.pairs}
    for o, d in fx.pairs:
        assert S[ids.index(o), ids.index(d)] >= 0.95
    distinct = [ids.index(i) for i in fx.distinct_ids]
    assert S[np.ix_(distinct, distinct)][~np.eye(len(distinct), dtype=bool)].max() < 0.5

    clusters, (kept, manifest) = run(fx.postings)
    assert {m.removed_id for m in manifest} == dup_ids
    assert set(fx.distinct_ids) <= {p.id for p in kept}
    # every removed member has edge evidence at or above the threshold
    for c in clusters:
        for m in c.member_ids:
            assert any(m in (x, y) and s >= 0.9 for x, y, s in c.pairwise_scores)
    # output ids are a subset and postings are untouched
    by_id = {p.id: p for p in fx.postings}
    assert all(by_id[p.id] is p for p in kept)
    again, (kept2, manifest2) = run(kept)
    assert again == [] and manifest2 == [] and kept2 == kept


def test_dedup_matches_bruteforce_components():
    rng = np.random.default_rng(7)
    words = [f"w{i}" for i in range(12)]
    posts = [JobPosting(f"p{i}", "t", " ".join(rng.choice(words, 6))) for i in range(40)]
    docs = [tokenize_normalize(p.description) for p in posts]
    _, X = tfidf_dense(docs)
    S = cosine_all_pairs(X)
    clusters, _ = run(posts, 0.8)
    got = {frozenset(c.member_ids) for c in clusters}
    # brute-force connected components
    parent = list(range(len(posts)))

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x
    for i in range(len(posts)):
        for j in range(i + 1, len(posts)):
            if S[i, j] >= 0.8 - 1e-12:
                parent[find(j)] = find(i)
    groups = {}
    for i in range(len(posts)):
        groups.setdefault(find(i), set()).add(posts[i].id)
    assert got == {frozenset(g) for g in groups.values() if len(g) > 1}
