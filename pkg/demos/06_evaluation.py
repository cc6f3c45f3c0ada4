"""
Evaluation and cross-validation
===============================

Per-label precision, recall and F1, macro and support-weighted averages,
and k-fold cross-validation with micro-pooled confusion matrices.
"""

from cmlid import ModelSpec, compare_models, cross_validate, load_sample_corpus

corpus = load_sample_corpus()

result = cross_validate(corpus, ModelSpec("hmm"), k=3, seed=0)
print(result.pooled.format_table())
print(f"per-fold accuracy: mean {result.mean_accuracy:.4f}, sd {result.sd_accuracy:.4f}")

# Machine-readable records are plain tab-separated lines
print()
print("\n".join(result.pooled.records().splitlines()[:8]))

# All four backends under one protocol; the random forest is the slowest to train
table = compare_models(
    corpus,
    [ModelSpec("nb"), ModelSpec("rf", {"n_trees": 20}), ModelSpec("hmm"), ModelSpec("crf")],
    protocol="split",
    seed=0,
)
print()
print(table.format_table())
