"""
Token-level baselines
=====================

Naive Bayes over TF-IDF vectors and a random forest over count vectors.
Both label one token at a time and ignore the labels of its neighbours.
"""

from cmlid import load_sample_corpus, split
from cmlid.baselines import NBTagger, RFTagger, predict_nb
from cmlid.evaluation import evaluate_tagger

corpus = load_sample_corpus()
train, test = split(corpus, 0.2, seed=1)

nb = NBTagger.train(train, alpha=1.0)
sentence = test[0]
print("sentence:", " ".join(sentence.words))
print("NB tags :", " ".join(y.value for y in nb.tag(sentence)))

# Posteriors for one token
label, posterior = predict_nb(nb.model, nb.vectorizer.transform_token(sentence, 0))
print(f"posterior for {sentence[0].surface!r}:", {k.value: round(p, 3) for k, p in posterior.items()})
print(f"NB held-out accuracy: {evaluate_tagger(nb, test).accuracy:.4f}")

# The forest is deterministic for a fixed seed: each tree draws from its own seeded stream
rf = RFTagger.train(train, n_trees=20, seed=0)
print(f"RF held-out accuracy: {evaluate_tagger(rf, test).accuracy:.4f}")

# Mean decrease in impurity, normalized to sum to 1
imp = rf.model.importances
top = imp.argsort()[::-1][:10]
print()
print("most important count features:")
for fid in top:
    print(f"  {rf.model.index.name(int(fid)):<16} {imp[fid]:.4f}")
