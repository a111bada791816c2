"""Recover planted skill sets and pick the number of topics from a grid."""
# %%
import numpy as np

from jobskills.fixtures import planted_topic_contexts, planted_two_topics, topic_vocabularies
from jobskills.lda import align_topics, fit_lda, grid_search

# %% [markdown]
# Five disjoint vocabularies, 1000 context windows, each dominated by one of them.

# %%
contexts, labels, _ = planted_topic_contexts(n_docs=1000, seed=0)
docs = [c.tokens for c in contexts]
print(len(docs), "documents,", len({w for d in docs for w in d}), "distinct words")

# %%
model = fit_lda(docs, K=5, alpha=1.0, iterations=500, burn_in=250, restarts=6, seed=0)
assignment, purity = align_topics(model, topic_vocabularies())
accuracy = np.mean(assignment[model.dominant_topics()] == labels)
print("per-topic purity:", np.round(purity, 3))
print("dominant-topic accuracy:", accuracy)

# %% [markdown]
# A corpus with exactly two topics. Coherence jumps from K=1 to K=2 and then stalls,
# so the smallest K inside the tolerance band wins.

# %%
docs2, _, _ = planted_two_topics(seed=0)
best, grid = grid_search(docs2, K_values=(1, 2, 4), alpha_values=(1.0,), iterations=300, burn_in=150)
for c in grid:
    print(f"K={c.K}  coherence={c.coherence:8.2f}  perplexity={c.perplexity:7.2f}")
print("selected K =", best.K)
