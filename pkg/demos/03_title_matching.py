"""Match job titles to occupations: cosine, then fuzzy, then a linear SVM on descriptions."""
# %%
from collections import Counter

from jobskills.fixtures import taxonomy, title_fixture
from jobskills.onet import TitleMatcher, assign_titles, match_stages
from jobskills.svm import TextClassifier, train_svm
from jobskills.text import fit_tfidf, tokenize_normalize, vectorize

# %% [markdown]
# 70% verbatim titles, 20% light variants, 10% paraphrases no string matcher can catch.

# %%
fx = title_fixture(n=600, fractions=(0.7, 0.2, 0.1), seed=0)
matcher = TitleMatcher(taxonomy())
staged = match_stages(fx.postings, matcher)
print(Counter((fx.kind[p.id], a.method if a else "unmatched") for p, a in zip(fx.postings, staged)))

# %% [markdown]
# Postings matched by title become training data for the classifier.

# %%
train = [(p, a) for p, a in zip(fx.postings, staged) if a is not None]
tfidf = fit_tfidf([tokenize_normalize(p.description) for p, _ in train])
svm = train_svm([vectorize(tfidf, tokenize_normalize(p.description)) for p, _ in train],
                [a.soc_code for _, a in train])
final, coverage = assign_titles(fx.postings, matcher, TextClassifier(tfidf, svm), staged=staged)

# %%
for method, row in coverage.items():
    if method == "total":
        continue
    print(f"{method:15s} {row['count']:4d}  {100 * row['share']:.1f}%")
correct = sum(a.soc_code == fx.truth[a.posting_id] for a in final)
print(f"{correct}/{len(final)} assigned to the planted occupation")
