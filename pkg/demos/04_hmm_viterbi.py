"""
HMM tagging with Viterbi
========================

A first-order HMM with add-k smoothing.  Viterbi decoding is checked
against brute-force enumeration of every label sequence.
"""

import numpy as np

from cmlid import load_sample_corpus, split
from cmlid.corpus import LABELS, Sentence
from cmlid.evaluation import evaluate_tagger
from cmlid.hmm import HMMTagger, exhaustive_decode, viterbi_with_score

corpus = load_sample_corpus()
train, test = split(corpus, 0.2, seed=1)
tagger = HMMTagger.train(train, k_trans=0.1, k_emit=0.1)
model = tagger.model

print("transition probabilities P(cur | prev):")
print("        " + "".join(f"{y.value:>7}" for y in LABELS))
for y, row in zip(LABELS, np.exp(model.trans)):
    print(f"{y.value:<8}" + "".join(f"{p:>7.3f}" for p in row))

s = Sentence.from_pairs([("naaku", None), ("exam", None), ("tomorrow", None), ("ra", None), (":)", None)])
path, score = viterbi_with_score(model, s)
best, best_score = exhaustive_decode(model, s)
print()
print("viterbi   :", [y.value for y in path], f"{score:.4f}")
print("exhaustive:", [y.value for y in best], f"{best_score:.4f}")
print("tagged    :", [y.value for y in tagger.tag(s)])
print(f"held-out accuracy: {evaluate_tagger(tagger, test).accuracy:.4f}")
