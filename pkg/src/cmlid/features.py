"""Feature extraction shared by all four taggers.

Two flavours of character n-grams live here on purpose:

* ``char_trigrams`` -- sliding windows, ``^``/``$`` padded when the word is
  shorter than three characters; used by the TF-IDF and count vectorizers.
* ``char_ngrams`` -- prefix/suffix-anchored grams (``a, ak, akk`` and
  ``a, da, ada`` for "akkada"); used by the CRF templates.
"""

import math
import re
from collections import Counter
from dataclasses import dataclass, fields
from typing import Dict, List, NamedTuple, Tuple

import numpy as np

from .errors import EmptyCorpus, EmptyDocument, NotFitted

WORD_TRIGRAM = "word-trigram"
CHAR_TRIGRAM = "char-trigram"
TFIDF_MODES = (WORD_TRIGRAM, CHAR_TRIGRAM)

# Surfaces never contain whitespace, so a space cannot collide with a word.
TRIGRAM_SEPARATOR = " "
UNSEEN_TERM = "<unseen>"

SPECIAL_SYMBOLS = frozenset("!@#$%^&*()_+-=[]{};:'\",.<>/?\\|~`")

BOS = "<s>"
EOS = "</s>"
NULL = "NULL"


class FeatureIndex:
    """Bidirectional feature-name <-> dense id registry."""

    def __init__(self, names=()):
        self._ids: Dict[str, int] = {}
        self._names: List[str] = []
        self.frozen = False
        for name in names:
            self.add(name)

    def add(self, name):
        fid = self._ids.get(name)
        if fid is not None:
            return fid
        if self.frozen:
            raise KeyError(f"feature index is frozen; cannot add {name!r}")
        fid = len(self._names)
        self._ids[name] = fid
        self._names.append(name)
        return fid

    def lookup(self, name):
        """Id of ``name`` or ``None``; allocates only while unfrozen."""
        if self.frozen:
            return self._ids.get(name)
        return self.add(name)

    def get(self, name):
        return self._ids.get(name)

    def name(self, fid):
        return self._names[fid]

    def freeze(self):
        self.frozen = True
        return self

    @property
    def names(self):
        return tuple(self._names)

    def __len__(self):
        return len(self._names)

    def __contains__(self, name):
        return name in self._ids

    def __eq__(self, other):
        return isinstance(other, FeatureIndex) and self._names == other._names

    def __repr__(self):
        return f"FeatureIndex({len(self)} features, frozen={self.frozen})"


class SparseVector:
    """Immutable sparse vector: strictly increasing ids, no stored zeros."""

    __slots__ = ("ids", "weights")

    def __init__(self, ids=(), weights=()):
        ids = np.asarray(ids, dtype=np.int64)
        weights = np.asarray(weights, dtype=np.float64)
        if ids.shape != weights.shape or ids.ndim != 1:
            raise ValueError("ids and weights must be 1-d arrays of equal length")
        if ids.size and np.any(np.diff(ids) <= 0):
            raise ValueError("sparse vector ids must be strictly increasing")
        if np.any(weights == 0.0):
            raise ValueError("sparse vector must not store zero weights")
        ids.setflags(write=False)
        weights.setflags(write=False)
        self.ids = ids
        self.weights = weights

    @classmethod
    def from_dict(cls, mapping):
        items = sorted((k, v) for k, v in mapping.items() if v != 0.0)
        return cls([k for k, _ in items], [v for _, v in items])

    def to_dict(self):
        return dict(zip(self.ids.tolist(), self.weights.tolist()))

    def get(self, fid, default=0.0):
        pos = np.searchsorted(self.ids, fid)
        if pos < self.ids.size and self.ids[pos] == fid:
            return float(self.weights[pos])
        return default

    def __len__(self):
        return int(self.ids.size)

    def __eq__(self, other):
        return (
            isinstance(other, SparseVector)
            and np.array_equal(self.ids, other.ids)
            and np.array_equal(self.weights, other.weights)
        )

    def __repr__(self):
        return f"SparseVector({self.to_dict()!r})"


def to_csr(vectors, n_features):
    """Stack sparse vectors into a ``scipy.sparse.csr_matrix``; ids >= n_features are dropped."""
    from scipy import sparse

    indptr = [0]
    indices = []
    data = []
    for v in vectors:
        keep = v.ids < n_features
        indices.append(v.ids[keep])
        data.append(v.weights[keep])
        indptr.append(indptr[-1] + int(keep.sum()))
    indices = np.concatenate(indices) if indices else np.zeros(0, dtype=np.int64)
    data = np.concatenate(data) if data else np.zeros(0)
    return sparse.csr_matrix((data, indices, np.asarray(indptr)), shape=(len(vectors), n_features))


# ---------------------------------------------------------------------------
# character n-grams


def char_ngrams(word, n, direction="forward"):
    """Anchored grams of orders ``1..n``; orders beyond ``len(word)`` clamp to the word."""
    if not word:
        raise ValueError("word must be non-empty")
    if n < 1:
        raise ValueError("n must be >= 1")
    if direction == "forward":
        return [word[: min(k, len(word))] for k in range(1, n + 1)]
    if direction == "backward":
        return [word[-min(k, len(word)):] for k in range(1, n + 1)]
    raise ValueError(f"direction must be 'forward' or 'backward', got {direction!r}")


def char_trigrams(word):
    """Sliding character trigrams; short words are padded with ``^`` and ``$``."""
    if len(word) < 3:
        word = f"^{word}$"
    return [word[i:i + 3] for i in range(len(word) - 2)]


def word_trigrams(words):
    return [TRIGRAM_SEPARATOR.join(words[i:i + 3]) for i in range(len(words) - 2)]


# ---------------------------------------------------------------------------
# TF-IDF


def tf(term, document):
    if len(document) == 0:
        raise EmptyDocument("term frequency of an empty document is undefined")
    return sum(1 for t in document if t == term) / len(document)


def sentence_terms(words, mode):
    """All terms of one sentence-document, as a multiset (list)."""
    if mode == WORD_TRIGRAM:
        return list(words) + word_trigrams(words)
    if mode == CHAR_TRIGRAM:
        return [g for w in words for g in char_trigrams(w)]
    raise ValueError(f"unknown TF-IDF mode {mode!r}")


def token_terms(words, index, mode):
    """Terms of the sentence-document that belong to the token at ``index``.

    Word mode: the word plus every within-sentence word trigram covering it.
    Char mode: the word's character trigrams.
    """
    if mode == WORD_TRIGRAM:
        covering = [
            TRIGRAM_SEPARATOR.join(words[j:j + 3])
            for j in range(max(0, index - 2), min(index, len(words) - 3) + 1)
        ]
        return [words[index]] + covering
    if mode == CHAR_TRIGRAM:
        return char_trigrams(words[index])
    raise ValueError(f"unknown TF-IDF mode {mode!r}")


class TfIdfVectorizer:
    """Per-sentence document frequencies over word or character trigram terms.

    Feature id 0 is reserved for out-of-vocabulary terms, which are scored
    as if seen in a single document.
    """

    def __init__(self, mode, doc_freq=None, n_docs=0):
        if mode not in TFIDF_MODES:
            raise ValueError(f"unknown TF-IDF mode {mode!r}")
        self.mode = mode
        self.doc_freq: Dict[str, int] = dict(doc_freq or {})
        self.n_docs = int(n_docs)
        self.index = FeatureIndex([UNSEEN_TERM] + sorted(self.doc_freq)).freeze()
        for term, df in self.doc_freq.items():
            if not 1 <= df <= self.n_docs:
                raise ValueError(f"document frequency {df} of {term!r} outside [1, {self.n_docs}]")

    @property
    def fitted(self):
        return self.n_docs >= 1

    def idf(self, term):
        if not self.fitted:
            raise NotFitted("TF-IDF vectorizer has not been fitted")
        return math.log(self.n_docs / self.doc_freq.get(term, 1))

    def transform_token(self, sentence, index):
        if not self.fitted:
            raise NotFitted("TF-IDF vectorizer has not been fitted")
        if not 0 <= index < len(sentence):
            raise IndexError(f"token index {index} out of range for sentence of length {len(sentence)}")
        words = sentence.words
        document = sentence_terms(words, self.mode)
        counts = Counter(document)
        weights: Dict[int, float] = {}
        for term in dict.fromkeys(token_terms(words, index, self.mode)):
            weight = counts[term] / len(document) * self.idf(term)
            if weight == 0.0:
                continue
            fid = self.index.get(term)
            if fid is None:
                fid = 0
            weights[fid] = weights.get(fid, 0.0) + weight
        return SparseVector.from_dict(weights)

    def transform_sentence(self, sentence):
        return [self.transform_token(sentence, i) for i in range(len(sentence))]

    def transform(self, corpus):
        return [v for s in corpus for v in self.transform_sentence(s)]


def idf(term, vectorizer):
    return vectorizer.idf(term)


def fit_tfidf(corpus, mode):
    if len(corpus) == 0:
        raise EmptyCorpus()
    doc_freq: Counter = Counter()
    for sentence in corpus:
        doc_freq.update(set(sentence_terms(sentence.words, mode)))
    return TfIdfVectorizer(mode, doc_freq, len(corpus))


def transform_token(vectorizer, sentence, index):
    return vectorizer.transform_token(sentence, index)


# ---------------------------------------------------------------------------
# count vectors


def count_terms(word):
    return [f"w={word}"] + [f"c={g}" for g in dict.fromkeys(char_trigrams(word))]


class CountVectorizer:
    """Token identity plus character trigrams, weighted by training-corpus frequency."""

    def __init__(self, term_counts):
        self.term_counts: Dict[str, int] = dict(term_counts)
        self.index = FeatureIndex(sorted(self.term_counts)).freeze()

    @classmethod
    def fit(cls, corpus):
        if len(corpus) == 0:
            raise EmptyCorpus()
        counts: Counter = Counter()
        for token in corpus.tokens():
            counts[f"w={token.surface}"] += 1
            counts.update(f"c={g}" for g in char_trigrams(token.surface))
        return cls(counts)

    def transform_word(self, word):
        weights = {}
        for term in count_terms(word):
            fid = self.index.get(term)
            if fid is not None:
                weights[fid] = float(self.term_counts[term])
        return SparseVector.from_dict(weights)

    def transform(self, corpus):
        return [self.transform_word(t.surface) for t in corpus.tokens()]


def count_vectorize(corpus):
    vectorizer = CountVectorizer.fit(corpus)
    return vectorizer.index, vectorizer.transform(corpus)


# ---------------------------------------------------------------------------
# word-shape predicates and the UNIV default rule


class CharClass(NamedTuple):
    starts_with_digit: bool
    contains_digit: bool
    starts_with_special: bool
    starts_with_capital: bool
    contains_capital: bool


_DIGIT = re.compile(r"[0-9]")
_CAPITAL = re.compile(r"[A-Z]")


def char_class_predicates(word):
    if not word:
        raise ValueError("word must be non-empty")
    first = word[0]
    return CharClass(
        starts_with_digit="0" <= first <= "9",
        contains_digit=_DIGIT.search(word) is not None,
        starts_with_special=first in SPECIAL_SYMBOLS,
        starts_with_capital="A" <= first <= "Z",
        contains_capital=_CAPITAL.search(word) is not None,
    )


_SMILEY = re.compile(r"[:;=8xX\-^'oODpPC()\[\]{}<>3/\\*._]+")
_SMILEY_EYES = re.compile(r"[:;=8xX]")
_SMILEY_MOUTH = re.compile(r"[)(\]D\[pP3/\\]")


def is_smiley(word):
    return (
        _SMILEY.fullmatch(word) is not None
        and _SMILEY_EYES.search(word) is not None
        and _SMILEY_MOUTH.search(word) is not None
    )


def is_univ_default(word):
    """URL or smiley tokens, which are always tagged UNIV."""
    lowered = word.lower()
    if "http://" in lowered or "https://" in lowered or "www" in lowered:
        return True
    if lowered.endswith(".in"):
        return True
    return is_smiley(word)


# ---------------------------------------------------------------------------
# CRF templates


@dataclass(frozen=True)
class CrfFeatureConfig:
    current: bool = True
    next: bool = True
    previous: bool = True
    affixes: bool = True
    length: bool = True
    starts_with_digit: bool = True
    contains_digit: bool = True
    starts_with_special: bool = True
    starts_with_capital: bool = True
    contains_capital: bool = True
    previous_label: bool = True
    char_ngrams: bool = True
    affix_length: int = 3
    ngram_orders: Tuple[int, ...] = (1, 2, 3)

    def __post_init__(self):
        object.__setattr__(self, "ngram_orders", tuple(sorted(set(int(k) for k in self.ngram_orders))))
        if not any(getattr(self, name) for name in TEMPLATE_FAMILIES):
            raise ValueError("at least one CRF feature template family must be enabled")
        if self.affix_length < 1:
            raise ValueError("affix_length must be >= 1")
        if not self.ngram_orders or min(self.ngram_orders) < 1:
            raise ValueError("ngram_orders must be a non-empty set of positive integers")

    def to_dict(self):
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["ngram_orders"] = list(self.ngram_orders)
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if "ngram_orders" in d:
            d["ngram_orders"] = tuple(d["ngram_orders"])
        return cls(**d)


TEMPLATE_FAMILIES = (
    "current",
    "next",
    "previous",
    "affixes",
    "length",
    "starts_with_digit",
    "contains_digit",
    "starts_with_special",
    "starts_with_capital",
    "contains_capital",
    "previous_label",
    "char_ngrams",
)

_PREDICATE_FEATURES = (
    "starts_with_digit",
    "contains_digit",
    "starts_with_special",
    "starts_with_capital",
    "contains_capital",
)


def observation_features(sentence, index, config):
    """Every enabled template except the previous-label one."""
    n = len(sentence)
    if not 0 <= index < n:
        raise IndexError(f"token index {index} out of range for sentence of length {n}")
    token = sentence[index]
    word = token.surface
    feats = []
    if config.current:
        feats += [f"w0={word}", f"p0={token.pos}"]
    if config.next:
        if index + 1 < n:
            feats += [f"w+1={sentence[index + 1].surface}", f"p+1={sentence[index + 1].pos}"]
        else:
            feats += [f"w+1={EOS}", f"p+1={EOS}"]
    if config.previous:
        if index > 0:
            feats += [f"w-1={sentence[index - 1].surface}", f"p-1={sentence[index - 1].pos}"]
        else:
            feats += [f"w-1={BOS}", f"p-1={BOS}"]
    if config.affixes:
        for k in range(1, config.affix_length + 1):
            if len(word) >= k:
                feats += [f"pre{k}={word[:k]}", f"suf{k}={word[-k:]}"]
            else:
                feats += [f"pre{k}={NULL}", f"suf{k}={NULL}"]
    if config.length:
        feats.append(f"len={len(word)}")
    predicates = char_class_predicates(word)
    for name in _PREDICATE_FEATURES:
        if getattr(config, name) and getattr(predicates, name):
            feats.append(name)
    if config.char_ngrams:
        top = max(config.ngram_orders)
        forward = char_ngrams(word, top, "forward")
        backward = char_ngrams(word, top, "backward")
        for k in config.ngram_orders:
            feats += [f"fng{k}={forward[k - 1]}", f"bng{k}={backward[k - 1]}"]
    return feats


def crf_features(sentence, index, prev_label, config=None):
    config = config or CrfFeatureConfig()
    feats = set(observation_features(sentence, index, config))
    if config.previous_label:
        feats.add(f"y-1={BOS if prev_label is None else prev_label.value}")
    return frozenset(feats)
