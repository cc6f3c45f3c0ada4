"""
Training a linear-chain CRF
===========================

The CRF scores label sequences with weights on template features and on
label bigrams.  Training minimizes the L2-regularized negative
log-likelihood by gradient descent.  The gradient is checked against
finite differences before training.
"""

import numpy as np

from cmlid import Corpus, load_sample_corpus, split
from cmlid.crf import CRFModel, CRFTagger, build_feature_index, build_lattice, forward_backward, nll_and_gradient
from cmlid.evaluation import evaluate_tagger
from cmlid.features import CrfFeatureConfig

corpus = load_sample_corpus()
train, test = split(corpus, 0.2, seed=1)

# Gradient check on a handful of sentences with random weights
few = list(train)[:3]
config = CrfFeatureConfig()
model = CRFModel.zeros(build_feature_index(Corpus(few), config), config, l2=0.1)
rng = np.random.default_rng(0)
w = rng.normal(0, 0.1, model.n_params)
_, grad = nll_and_gradient(model.with_flat(w), few)
worst = 0.0
for j in rng.choice(model.n_params, 30, replace=False):
    e = np.zeros_like(w)
    e[j] = 1e-5
    fd = (nll_and_gradient(model.with_flat(w + e), few)[0] - nll_and_gradient(model.with_flat(w - e), few)[0]) / 2e-5
    worst = max(worst, abs(fd - grad[j]) / max(abs(fd), 1e-3))
print(f"finite-difference check on 30 coordinates: worst relative error {worst:.2e}")

tagger = CRFTagger.train(train, l2=0.1, max_iters=200)
history = tagger.model.history
print(f"objective {history[0]:.2f} -> {history[-1]:.2f} in {len(history) - 1} iterations")

# Marginal label probabilities for one test sentence
s = test[0]
log_z, node, _ = forward_backward(build_lattice(tagger.model, s))
print()
print(f"log partition for {' '.join(s.words)!r}: {log_z:.3f}")
for token, probs, y in zip(s, node, tagger.tag(s)):
    print(f"  {token.surface:<14} {y.value:<5} " + " ".join(f"{p:.2f}" for p in probs))
print(f"held-out accuracy: {evaluate_tagger(tagger, test).accuracy:.4f}")
