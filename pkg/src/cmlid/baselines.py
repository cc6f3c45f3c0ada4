"""Token-level baselines: multinomial Naive Bayes and a random forest.

Both map one token's sparse vector to a label; neither looks at context
beyond what the vectorizer packed into the vector.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from scipy.special import logsumexp

from .corpus import LABELS, N_LABELS, LangLabel
from .errors import LengthMismatch, NonPositiveAlpha
from .features import (
    CHAR_TRIGRAM,
    CountVectorizer,
    FeatureIndex,
    fit_tfidf,
    is_univ_default,
    to_csr,
)

# Finite stand-in for log(0) so scores stay totally ordered.
LOG_ZERO = -1e12


def _safe_log(x):
    x = np.asarray(x, dtype=np.float64)
    with np.errstate(divide="ignore"):
        out = np.log(x)
    return np.where(x > 0, out, LOG_ZERO)


def _label_ids(labels):
    return np.array([LangLabel(y).index if not isinstance(y, LangLabel) else y.index for y in labels], dtype=np.int64)


# ---------------------------------------------------------------------------
# Naive Bayes


@dataclass(frozen=True)
class NBModel:
    log_prior: np.ndarray  # (labels,)
    log_likelihood: np.ndarray  # (labels, features)
    alpha: float
    index: Optional[FeatureIndex] = None

    @property
    def n_features(self):
        return self.log_likelihood.shape[1]

    def scores(self, vector):
        keep = vector.ids < self.n_features
        ids = vector.ids[keep]
        return self.log_prior + self.log_likelihood[:, ids] @ vector.weights[keep]


def train_nb(vectors, labels, alpha=1.0, n_features=None, index=None):
    """Multinomial NB with Lidstone smoothing; real-valued weights act as counts."""
    if len(vectors) != len(labels):
        raise LengthMismatch(f"{len(vectors)} vectors but {len(labels)} labels")
    if len(vectors) == 0:
        raise LengthMismatch("need at least one training example")
    if not alpha > 0:
        raise NonPositiveAlpha(f"alpha must be > 0, got {alpha}")
    if n_features is None:
        n_features = len(index) if index is not None else max((int(v.ids[-1]) + 1 for v in vectors if len(v)), default=1)
    y = _label_ids(labels)
    X = to_csr(vectors, n_features)
    onehot = np.zeros((len(y), N_LABELS))
    onehot[np.arange(len(y)), y] = 1.0
    class_counts = onehot.sum(axis=0)
    log_prior = _safe_log(class_counts / class_counts.sum())
    feature_mass = np.asarray((X.T @ onehot).T)  # (labels, features)
    smoothed = feature_mass + alpha
    log_likelihood = np.log(smoothed) - np.log(smoothed.sum(axis=1, keepdims=True))
    return NBModel(log_prior, log_likelihood, float(alpha), index)


def predict_nb(model, vector):
    scores = model.scores(vector)
    posterior = np.exp(scores - logsumexp(scores))
    return LABELS[int(np.argmax(scores))], dict(zip(LABELS, posterior.tolist()))


# ---------------------------------------------------------------------------
# random forest


@dataclass(frozen=True)
class DecisionTree:
    """Array-backed binary tree; ``feature[i] == -1`` marks a leaf.

    Samples with ``x[feature] <= threshold`` go left.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray  # (nodes, labels) class distribution
    impurity_decrease: np.ndarray  # weighted by node share of the bootstrap sample

    @property
    def n_nodes(self):
        return len(self.feature)

    def is_leaf(self, node):
        return self.feature[node] < 0

    def leaf_distribution(self, lookup):
        node = 0
        while self.feature[node] >= 0:
            x = lookup(int(self.feature[node]))
            node = self.left[node] if x <= self.threshold[node] else self.right[node]
        return self.value[node]

    def apply_dense(self, X):
        """Leaf id for each row of a dense matrix."""
        nodes = np.zeros(X.shape[0], dtype=np.int64)
        active = self.feature[nodes] >= 0
        while active.any():
            idx = np.flatnonzero(active)
            cur = nodes[idx]
            go_left = X[idx, self.feature[cur]] <= self.threshold[cur]
            nodes[idx] = np.where(go_left, self.left[cur], self.right[cur])
            active = self.feature[nodes] >= 0
        return nodes


def _gini(counts):
    total = counts.sum(axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        p = counts / total[..., None]
        g = 1.0 - np.sum(p * p, axis=-1)
    return np.where(total > 0, g, 0.0)


class _TreeBuilder:
    def __init__(self, X, y, rng, max_features):
        self.X = X  # csr, rows = bootstrap sample
        self.y = y
        self.rng = rng
        self.max_features = max_features
        self.n_total = X.shape[0]
        self.feature: List[int] = []
        self.threshold: List[float] = []
        self.left: List[int] = []
        self.right: List[int] = []
        self.value: List[np.ndarray] = []
        self.decrease: List[float] = []

    def _new_node(self, counts):
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(counts / counts.sum())
        self.decrease.append(0.0)
        return len(self.feature) - 1

    def _node_entries(self, rows):
        """(row position, feature id, value) triples of the node's nonzeros."""
        X = self.X
        starts, ends = X.indptr[rows], X.indptr[rows + 1]
        lengths = ends - starts
        total = int(lengths.sum())
        offsets = np.repeat(starts - np.cumsum(lengths) + lengths, lengths) + np.arange(total)
        return np.repeat(np.arange(len(rows)), lengths), X.indices[offsets], X.data[offsets]

    def _best_split(self, rows, counts):
        m = len(rows)
        pos, cols, vals = self._node_entries(rows)
        if cols.size == 0:
            return None
        feats, inverse, nnz = np.unique(cols, return_inverse=True, return_counts=True)
        vmax = np.full(feats.size, -np.inf)
        vmin = np.full(feats.size, np.inf)
        np.maximum.at(vmax, inverse, vals)
        np.minimum.at(vmin, inverse, vals)
        # a feature can split the node iff it takes at least two values here
        varying = (nnz < m) | (vmax > vmin)
        choosable = np.flatnonzero(varying)
        if choosable.size == 0:
            return None
        n_pick = min(self.max_features, choosable.size)
        slots = np.sort(self.rng.choice(choosable, size=n_pick, replace=False))
        candidates = feats[slots]
        slot_of = np.full(feats.size, -1)
        slot_of[slots] = np.arange(n_pick)
        keep = slot_of[inverse] >= 0
        e_slot, e_val, e_pos = slot_of[inverse[keep]], vals[keep], pos[keep]
        e_y = self.y[rows][e_pos]
        # implicit zeros form one extra value group per feature
        nonzero_counts = np.bincount(e_slot * N_LABELS + e_y, minlength=n_pick * N_LABELS)
        zero_counts = counts[None, :] - nonzero_counts.reshape(n_pick, N_LABELS)
        has_zero = zero_counts.sum(axis=1) > 0
        g_slot = np.concatenate([e_slot, np.flatnonzero(has_zero)])
        g_val = np.concatenate([e_val, np.zeros(int(has_zero.sum()))])
        g_y = np.concatenate([e_y, np.full(int(has_zero.sum()), -1)])
        order = np.lexsort((g_val, g_slot))
        g_slot, g_val, g_y = g_slot[order], g_val[order], g_y[order]
        new_group = np.ones(len(g_slot), dtype=bool)
        new_group[1:] = (g_slot[1:] != g_slot[:-1]) | (g_val[1:] != g_val[:-1])
        gid = np.cumsum(new_group) - 1
        n_g = int(gid[-1]) + 1
        group_counts = np.zeros((n_g, N_LABELS))
        real = g_y >= 0
        np.add.at(group_counts, (gid[real], g_y[real]), 1.0)
        first = np.flatnonzero(new_group)
        group_slot, group_value = g_slot[first], g_val[first]
        zero_group = gid[~real]
        group_counts[zero_group] += zero_counts[has_zero]
        # cumulative class counts within each feature's run of groups
        cum = np.cumsum(group_counts, axis=0)
        slot_start = np.ones(n_g, dtype=bool)
        slot_start[1:] = group_slot[1:] != group_slot[:-1]
        base = np.zeros_like(cum)
        base[1:] = cum[:-1]
        base = base[np.flatnonzero(slot_start)[np.cumsum(slot_start) - 1]]
        left = cum - base
        # a split sits after every group that is not the last of its feature
        split_after = np.flatnonzero(~np.append(slot_start[1:], True))
        if split_after.size == 0:
            return None
        left_counts = left[split_after]
        n_left = left_counts.sum(axis=1)
        child = (n_left * _gini(left_counts) + (m - n_left) * _gini(counts - left_counts)) / m
        best = int(np.argmin(child))  # lowest feature slot, then lowest threshold
        g = int(split_after[best])
        col = int(group_slot[g])
        # zero-gain splits are still taken so an impure node always splits (XOR-like data)
        decrease = max(float(_gini(counts) - child[best]), 0.0)
        threshold = 0.5 * (group_value[g] + group_value[g + 1])
        values = np.zeros(m)
        sel = e_slot == col
        values[e_pos[sel]] = e_val[sel]
        goes_left = values <= threshold
        return int(candidates[col]), float(threshold), float(decrease), goes_left

    def build(self):
        rows = np.arange(self.n_total)
        stack = [(rows, None, False)]
        while stack:
            rows, parent, is_right = stack.pop()
            counts = np.bincount(self.y[rows], minlength=N_LABELS).astype(np.float64)
            node = self._new_node(counts)
            if parent is not None:
                if is_right:
                    self.right[parent] = node
                else:
                    self.left[parent] = node
            if len(rows) < 2 or np.count_nonzero(counts) <= 1:
                continue
            found = self._best_split(rows, counts)
            if found is None:
                continue
            fid, threshold, decrease, goes_left = found
            self.feature[node] = fid
            self.threshold[node] = threshold
            self.decrease[node] = len(rows) / self.n_total * decrease
            # right pushed first so the left subtree is numbered first
            stack.append((rows[~goes_left], node, True))
            stack.append((rows[goes_left], node, False))
        return DecisionTree(
            np.array(self.feature, dtype=np.int64),
            np.array(self.threshold, dtype=np.float64),
            np.array(self.left, dtype=np.int64),
            np.array(self.right, dtype=np.int64),
            np.array(self.value, dtype=np.float64).reshape(-1, N_LABELS),
            np.array(self.decrease, dtype=np.float64),
        )


@dataclass(frozen=True)
class RFModel:
    trees: Sequence[DecisionTree]
    n_features: int
    seed: int
    max_features: str = "sqrt"
    index: Optional[FeatureIndex] = None
    importances: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "trees", tuple(self.trees))
        if self.importances is None:
            object.__setattr__(self, "importances", _mdi(self.trees, self.n_features))


def tree_rng(seed, tree_index):
    return np.random.default_rng([int(seed), int(tree_index)])


def _n_candidates(rule, d):
    if rule == "sqrt":
        return max(1, math.ceil(math.sqrt(d)))
    if rule in (None, "all"):
        return d
    if isinstance(rule, int) and rule >= 1:
        return min(rule, d)
    raise ValueError(f"unknown max_features rule {rule!r}")


def train_rf(
    vectors, labels, n_trees=50, max_features="sqrt", seed=0, n_features=None, index=None, bootstrap=True
):
    """Bagged Gini trees, one seeded stream per tree.

    Candidate features at each node are drawn from those that still vary
    among the node's samples.  ``bootstrap=False`` trains every tree on the
    full sample.
    """
    if len(vectors) != len(labels):
        raise LengthMismatch(f"{len(vectors)} vectors but {len(labels)} labels")
    if len(vectors) == 0:
        raise LengthMismatch("need at least one training example")
    if n_trees < 1:
        raise ValueError("n_trees must be >= 1")
    if n_features is None:
        n_features = len(index) if index is not None else max((int(v.ids[-1]) + 1 for v in vectors if len(v)), default=1)
    X = to_csr(vectors, n_features)
    y = _label_ids(labels)
    n = len(y)
    k = _n_candidates(max_features, n_features)
    trees = []
    for t in range(n_trees):
        rng = tree_rng(seed, t)
        boot = rng.integers(0, n, size=n) if bootstrap else np.arange(n)
        Xb = X[boot]
        Xb.sum_duplicates()
        Xb.sort_indices()
        trees.append(_TreeBuilder(Xb, y[boot], rng, k).build())
    return RFModel(tuple(trees), n_features, int(seed), max_features, index)


def _tree_votes(model, vector):
    lookup = dict(zip(vector.ids.tolist(), vector.weights.tolist()))
    get = lambda f: lookup.get(f, 0.0)
    return [tree.leaf_distribution(get) for tree in model.trees]


def _vote(dists):
    votes = np.zeros(N_LABELS, dtype=np.int64)
    for d in dists:
        votes[int(np.argmax(d))] += 1
    tied = np.flatnonzero(votes == votes.max())
    if len(tied) == 1:
        return LABELS[int(tied[0])]
    # fsum keeps the tie-break independent of tree order
    mass = [math.fsum(float(d[c]) for d in dists) for c in tied]
    return LABELS[int(tied[int(np.argmax(mass))])]


def predict_rf(model, vector):
    return _vote(_tree_votes(model, vector))


def predict_rf_batch(model, vectors):
    X = to_csr(vectors, model.n_features).toarray()
    dists = [tree.value[tree.apply_dense(X)] for tree in model.trees]
    return [_vote([d[i] for d in dists]) for i in range(len(vectors))]


def _mdi(trees, n_features):
    total = np.zeros(n_features)
    for tree in trees:
        split = tree.feature >= 0
        np.add.at(total, tree.feature[split], tree.impurity_decrease[split])
    total /= max(len(trees), 1)
    s = total.sum()
    return total / s if s > 0 else total


def feature_importance_mdi(model):
    return model.importances


# ---------------------------------------------------------------------------
# corpus-level taggers


class NBTagger:
    kind = "nb"

    def __init__(self, vectorizer, model):
        self.vectorizer = vectorizer
        self.model = model

    @classmethod
    def train(cls, corpus, alpha=1.0, mode=CHAR_TRIGRAM):
        corpus.require_labeled()
        vectorizer = fit_tfidf(corpus, mode)
        vectors = vectorizer.transform(corpus)
        labels = [t.label for t in corpus.tokens()]
        model = train_nb(vectors, labels, alpha, index=vectorizer.index)
        return cls(vectorizer, model)

    def tag(self, sentence):
        out = []
        for i, token in enumerate(sentence):
            label, _ = predict_nb(self.model, self.vectorizer.transform_token(sentence, i))
            out.append(LangLabel.UNIV if is_univ_default(token.surface) else label)
        return out


class RFTagger:
    kind = "rf"

    def __init__(self, vectorizer, model):
        self.vectorizer = vectorizer
        self.model = model

    @classmethod
    def train(cls, corpus, n_trees=50, seed=0, max_features="sqrt"):
        corpus.require_labeled()
        vectorizer = CountVectorizer.fit(corpus)
        vectors = vectorizer.transform(corpus)
        labels = [t.label for t in corpus.tokens()]
        model = train_rf(vectors, labels, n_trees, max_features, seed, index=vectorizer.index)
        return cls(vectorizer, model)

    def tag(self, sentence):
        vectors = [self.vectorizer.transform_word(t.surface) for t in sentence]
        labels = predict_rf_batch(self.model, vectors)
        return [
            LangLabel.UNIV if is_univ_default(t.surface) else y
            for t, y in zip(sentence, labels)
        ]
