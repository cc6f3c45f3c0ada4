"""First-order HMM language tagger.

Transitions P(tag_i | tag_{i-1}) and emissions P(word | tag) are relative
frequencies with add-k smoothing; each tag reserves one emission slot for
unknown words.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .baselines import _safe_log
from .corpus import LABELS, N_LABELS, LangLabel
from .decoding import path_score, viterbi_path
from .errors import EmptyCorpus, SentenceTooLong
from .features import is_univ_default

MAX_EXHAUSTIVE_LENGTH = 12


@dataclass(frozen=True)
class HMMModel:
    start: np.ndarray  # (labels,) log P(tag | START)
    trans: np.ndarray  # (labels, labels) log P(cur | prev)
    emit: np.ndarray  # (labels, vocab + 1) log P(word | tag); last column is UNK
    vocabulary: Tuple[str, ...]
    k_trans: float = 0.1
    k_emit: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "vocabulary", tuple(self.vocabulary))
        object.__setattr__(self, "_word_ids", {w: i for i, w in enumerate(self.vocabulary)})

    @property
    def unk_id(self):
        return len(self.vocabulary)

    def word_id(self, word):
        return self._word_ids.get(word, self.unk_id)

    def emission_scores(self, sentence):
        """(n, labels) emission log-probabilities for the sentence's words."""
        ids = [self.word_id(t.surface) for t in sentence]
        return self.emit[:, ids].T

    def score(self, sentence, labels):
        path = [LangLabel(y).index for y in labels]
        return path_score(self.start, self.trans, self.emission_scores(sentence), path)


def _normalize_rows(counts, k):
    """Add-k relative frequencies per row, in log space; an empty row with k=0 is uniform."""
    counts = np.asarray(counts, dtype=np.float64) + k
    totals = counts.sum(axis=1, keepdims=True)
    probs = np.divide(counts, totals, out=np.full_like(counts, 1.0 / counts.shape[1]), where=totals > 0)
    return _safe_log(probs)


def train_hmm(corpus, k_trans=0.1, k_emit=0.1):
    if len(corpus) == 0:
        raise EmptyCorpus()
    if k_trans < 0 or k_emit < 0:
        raise ValueError("smoothing constants must be >= 0")
    corpus.require_labeled()
    vocabulary = sorted({t.surface for t in corpus.tokens()})
    word_ids = {w: i for i, w in enumerate(vocabulary)}
    # row N_LABELS is START
    bigrams = np.zeros((N_LABELS + 1, N_LABELS))
    emissions = np.zeros((N_LABELS, len(vocabulary) + 1))
    for sentence in corpus:
        prev = N_LABELS
        for token in sentence:
            y = token.label.index
            bigrams[prev, y] += 1
            emissions[y, word_ids[token.surface]] += 1
            prev = y
    trans = _normalize_rows(bigrams, k_trans)
    emit = _normalize_rows(emissions, k_emit)
    return HMMModel(trans[N_LABELS], trans[:N_LABELS], emit, tuple(vocabulary), float(k_trans), float(k_emit))


def viterbi_with_score(model, sentence):
    path, score = viterbi_path(model.start, model.trans, model.emission_scores(sentence))
    return [LABELS[i] for i in path], score


def viterbi(model, sentence):
    return viterbi_with_score(model, sentence)[0]


def exhaustive_decode(model, sentence):
    """Score every one of the 4^n label sequences; testing oracle for ``viterbi``."""
    n = len(sentence)
    if n > MAX_EXHAUSTIVE_LENGTH:
        raise SentenceTooLong(f"exhaustive decoding is limited to {MAX_EXHAUSTIVE_LENGTH} tokens, got {n}")
    emit = model.emission_scores(sentence)
    best_path, best_score = None, -np.inf
    # np.ndindex walks label tuples in lexicographic order
    for path in np.ndindex(*([N_LABELS] * n)):
        s = path_score(model.start, model.trans, emit, path)
        if s > best_score:
            best_path, best_score = path, s
    return [LABELS[i] for i in best_path], best_score


def apply_univ_default(sentence, labels):
    return [LangLabel.UNIV if is_univ_default(t.surface) else y for t, y in zip(sentence, labels)]


def tag_sentence_hmm(model, sentence):
    return apply_univ_default(sentence, viterbi(model, sentence))


class HMMTagger:
    kind = "hmm"

    def __init__(self, model):
        self.model = model

    @classmethod
    def train(cls, corpus, k_trans=0.1, k_emit=0.1):
        return cls(train_hmm(corpus, k_trans, k_emit))

    def tag(self, sentence):
        return tag_sentence_hmm(self.model, sentence)
