"""
Reading a code-mixed corpus
===========================

Corpora are token-per-line text: ``surface<TAB>pos<TAB>label`` with a
blank line between sentences.  This walk-through parses a tiny corpus,
prints label statistics for the bundled sample, and makes a seeded
train/test split.
"""

from cmlid import load_sample_corpus, label_stats, parse_corpus, serialize_corpus, split
from cmlid.corpus import kfold

text = "John\tNNP\tNE\nnuvvu\tPRP\tTE\nclasslo\tNN\tTE\n\nhi\tUH\tEN\n:)\tE\tUNIV\n"
tiny = parse_corpus(text)
print("sentences:", len(tiny), "tokens per sentence:", [len(s) for s in tiny])
print("first sentence words:", tiny[0].words)
print("labels:", [y.value for y in tiny[0].labels])

# Serialization writes the same layout back, so parse(serialize(c)) == c
assert parse_corpus(serialize_corpus(tiny)) == tiny

# The bundled synthetic sample stands in for the original data set
sample = load_sample_corpus()
print()
print(label_stats(sample).format_table())

# Seeded splits are reproducible: the same seed always picks the same test sentences
train, test = split(sample, test_fraction=0.2, seed=7)
print()
print(f"split: {len(train)} train / {len(test)} test sentences")

# k-fold partitions cover every sentence exactly once
folds = kfold(sample, k=3, seed=0)
print("fold test sizes:", [len(test) for _, test in folds])
