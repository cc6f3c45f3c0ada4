"""Linear-chain CRF over the language-label lattice.

Parameters are one weight per (observation feature, label) pair, one start
weight per label (the ``y-1=<s>`` template) and one weight per label
bigram (the ``y-1=<label>`` template).  Everything runs in log space.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Tuple

import numpy as np
from scipy import sparse
from scipy.special import logsumexp

from .corpus import LABELS, N_LABELS, LangLabel
from .decoding import viterbi_path
from .errors import EmptyCorpus, NumericalError, UnlabeledToken
from .features import CrfFeatureConfig, FeatureIndex, is_univ_default, observation_features

L = N_LABELS


@dataclass(frozen=True)
class CRFModel:
    index: FeatureIndex
    state_weights: np.ndarray  # (features, labels)
    start: np.ndarray  # (labels,)
    trans: np.ndarray  # (labels, labels), [prev, cur]
    config: CrfFeatureConfig = field(default_factory=CrfFeatureConfig)
    l2: float = 0.1
    history: Tuple[float, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        if self.state_weights.shape != (len(self.index), L):
            raise ValueError("state weight table does not match the feature index")
        if not (np.all(np.isfinite(self.state_weights)) and np.all(np.isfinite(self.start))
                and np.all(np.isfinite(self.trans))):
            raise NumericalError("CRF weights must be finite")

    @classmethod
    def zeros(cls, index, config=None, l2=0.1):
        return cls(index, np.zeros((len(index), L)), np.zeros(L), np.zeros((L, L)), config or CrfFeatureConfig(), l2)

    @property
    def n_params(self):
        return self.state_weights.size + L + L * L

    def flat(self):
        return np.concatenate([self.state_weights.ravel(), self.start, self.trans.ravel()])

    def with_flat(self, w, history=()):
        a = self.state_weights.size
        return CRFModel(
            self.index,
            w[:a].reshape(-1, L).copy(),
            w[a:a + L].copy(),
            w[a + L:].reshape(L, L).copy(),
            self.config,
            self.l2,
            tuple(history),
        )

    def param_mask(self):
        """1 for trainable parameters; label-history weights are frozen when that template is off."""
        mask = np.ones(self.n_params)
        if not self.config.previous_label:
            mask[self.state_weights.size:] = 0.0
        return mask

    def feature_ids(self, sentence, i):
        ids = (self.index.get(f) for f in observation_features(sentence, i, self.config))
        return sorted({fid for fid in ids if fid is not None})


# ---------------------------------------------------------------------------
# lattice and forward-backward


@dataclass(frozen=True)
class Lattice:
    state: np.ndarray  # (n, labels)
    start: np.ndarray  # (labels,)
    trans: np.ndarray  # (labels, labels)

    def __len__(self):
        return self.state.shape[0]

    @cached_property
    def log_alpha(self):
        n = len(self)
        alpha = np.empty_like(self.state)
        alpha[0] = self.start + self.state[0]
        for t in range(1, n):
            alpha[t] = logsumexp(alpha[t - 1][:, None] + self.trans, axis=0) + self.state[t]
        return alpha

    @cached_property
    def log_beta(self):
        n = len(self)
        beta = np.zeros_like(self.state)
        for t in range(n - 2, -1, -1):
            beta[t] = logsumexp(self.trans + (self.state[t + 1] + beta[t + 1])[None, :], axis=1)
        return beta

    @property
    def log_z(self):
        return float(logsumexp(self.log_alpha[-1]))

    @property
    def log_z_backward(self):
        return float(logsumexp(self.start + self.state[0] + self.log_beta[0]))

    def path_score(self, labels):
        path = [y.index if isinstance(y, LangLabel) else int(y) for y in labels]
        s = self.start[path[0]] + self.state[0, path[0]]
        for t in range(1, len(path)):
            s += self.trans[path[t - 1], path[t]] + self.state[t, path[t]]
        return float(s)


def build_lattice(model, sentence):
    n = len(sentence)
    if n == 0:
        raise ValueError("cannot build a lattice for an empty sentence")
    state = np.zeros((n, L))
    for i in range(n):
        ids = model.feature_ids(sentence, i)
        if ids:
            state[i] = model.state_weights[ids].sum(axis=0)
    if model.config.previous_label:
        return Lattice(state, model.start.copy(), model.trans.copy())
    return Lattice(state, np.zeros(L), np.zeros((L, L)))


def forward_backward(lattice):
    """Log-partition, position marginals (n, L) and edge marginals (n-1, L, L)."""
    alpha, beta = lattice.log_alpha, lattice.log_beta
    log_z = lattice.log_z
    node = np.exp(alpha + beta - log_z)
    edge = np.exp(
        alpha[:-1, :, None]
        + lattice.trans[None, :, :]
        + (lattice.state[1:] + beta[1:])[:, None, :]
        - log_z
    )
    return log_z, node, edge


# ---------------------------------------------------------------------------
# batched objective


class _Batch:
    """Sentences flattened into one sparse design matrix plus padded index maps."""

    def __init__(self, model, sentences):
        rows, cols = [], []
        self.lengths = np.array([len(s) for s in sentences], dtype=np.int64)
        if len(sentences) == 0 or self.lengths.min() == 0:
            raise EmptyCorpus("batch must hold non-empty sentences")
        r = 0
        for sentence in sentences:
            for i in range(len(sentence)):
                ids = model.feature_ids(sentence, i)
                rows.extend([r] * len(ids))
                cols.extend(ids)
                r += 1
        self.n_tokens = r
        self.X = sparse.csr_matrix(
            (np.ones(len(rows)), (np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64))),
            shape=(r, len(model.index)),
        )
        self.XT = self.X.T.tocsr()
        B, T = len(sentences), int(self.lengths.max())
        self.mask = np.arange(T)[None, :] < self.lengths[:, None]  # (B, T)
        self.token_pos = np.flatnonzero(self.mask.ravel())  # flat padded slot of each token
        self.B, self.T = B, T
        self.first = np.concatenate([[0], np.cumsum(self.lengths)[:-1]])
        self.gold = None
        if all(s.is_labeled() for s in sentences):
            self.gold = np.array([t.label.index for s in sentences for t in s], dtype=np.int64)
            onehot = np.zeros((r, L))
            onehot[np.arange(r), self.gold] = 1.0
            self.emp_state = np.asarray(self.XT @ onehot)
            self.emp_start = np.bincount(self.gold[self.first], minlength=L).astype(np.float64)
            emp_trans = np.zeros((L, L))
            not_first = np.ones(r, dtype=bool)
            not_first[self.first] = False
            idx = np.flatnonzero(not_first)
            np.add.at(emp_trans, (self.gold[idx - 1], self.gold[idx]), 1.0)
            self.emp_trans = emp_trans

    def padded(self, token_values):
        out = np.zeros((self.B * self.T,) + token_values.shape[1:])
        out[self.token_pos] = token_values
        return out.reshape((self.B, self.T) + token_values.shape[1:])

    def forward(self, state, start, trans):
        alpha = np.empty((self.B, self.T, L))
        alpha[:, 0] = start + state[:, 0]
        for t in range(1, self.T):
            nxt = logsumexp(alpha[:, t - 1, :, None] + trans[None], axis=1) + state[:, t]
            alpha[:, t] = np.where(self.mask[:, t, None], nxt, alpha[:, t - 1])
        return alpha

    def backward(self, state, trans):
        beta = np.zeros((self.B, self.T, L))
        for t in range(self.T - 2, -1, -1):
            nxt = logsumexp(trans[None] + (state[:, t + 1] + beta[:, t + 1])[:, None, :], axis=2)
            beta[:, t] = np.where(self.mask[:, t + 1, None], nxt, 0.0)
        return beta


def _objective(model, batch, w, need_grad=True):
    n_state = model.state_weights.size
    W = w[:n_state].reshape(-1, L)
    start = w[n_state:n_state + L]
    trans = w[n_state + L:].reshape(L, L)
    token_state = batch.X @ W  # (tokens, L)
    state = batch.padded(token_state)
    alpha = batch.forward(state, start, trans)
    log_z = logsumexp(alpha[:, -1], axis=1)  # padded steps carry alpha forward
    gold = batch.gold
    gold_score = (
        token_state[np.arange(batch.n_tokens), gold].sum()
        + batch.emp_start @ start
        + np.sum(batch.emp_trans * trans)
    )
    nll = float(log_z.sum() - gold_score + 0.5 * model.l2 * (w @ w))
    if not np.isfinite(nll):
        raise NumericalError("CRF objective is not finite")
    if not need_grad:
        return nll, None
    beta = batch.backward(state, trans)
    node = np.exp(alpha + beta - log_z[:, None, None])  # (B, T, L)
    edge = np.exp(
        alpha[:, :-1, :, None]
        + trans[None, None]
        + (state[:, 1:] + beta[:, 1:])[:, :, None, :]
        - log_z[:, None, None, None]
    )
    edge = np.where(batch.mask[:, 1:, None, None], edge, 0.0)
    node_tokens = node.reshape(-1, L)[batch.token_pos]
    grad = np.concatenate([
        (np.asarray(batch.XT @ node_tokens) - batch.emp_state).ravel(),
        node[:, 0].sum(axis=0) - batch.emp_start,
        (edge.sum(axis=(0, 1)) - batch.emp_trans).ravel(),
    ])
    grad += model.l2 * w
    return nll, grad * model.param_mask()


def nll_and_gradient(model, batch):
    """Regularized negative log-likelihood of labeled sentences and its gradient.

    The gradient is laid out like ``model.flat()``.
    """
    sentences = list(batch)
    for s in sentences:
        if not s.is_labeled():
            raise UnlabeledToken("CRF training sentences must be fully labeled")
    return _objective(model, _Batch(model, sentences), model.flat())


# ---------------------------------------------------------------------------
# training and decoding


def build_feature_index(corpus, config, min_count=1):
    counts = {}
    for sentence in corpus:
        for i in range(len(sentence)):
            for name in sorted(set(observation_features(sentence, i, config))):
                counts[name] = counts.get(name, 0) + 1
    return FeatureIndex(name for name, c in counts.items() if c >= min_count).freeze()


def train_crf(corpus, config=None, l2=0.1, max_iters=200, tol=1e-6, min_count=1):
    """Full-batch gradient descent with a halving line search from step 1.0."""
    if len(corpus) == 0:
        raise EmptyCorpus()
    corpus.require_labeled()
    config = config or CrfFeatureConfig()
    if l2 < 0:
        raise ValueError("l2 must be >= 0")
    index = build_feature_index(corpus, config, min_count)
    model = CRFModel.zeros(index, config, l2)
    batch = _Batch(model, list(corpus))
    w = model.flat()
    nll, grad = _objective(model, batch, w)
    history = [nll]
    for _ in range(max_iters):
        step = 1.0
        accepted = False
        while step > 1e-16:
            w_try = w - step * grad
            nll_try, _ = _objective(model, batch, w_try, need_grad=False)
            if nll_try < nll:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        w = w_try
        delta = nll - nll_try
        nll, grad = _objective(model, batch, w)
        history.append(nll)
        if delta < tol:
            break
    return model.with_flat(w, history)


def decode_crf(model, sentence):
    lattice = build_lattice(model, sentence)
    path, _ = viterbi_path(lattice.start, lattice.trans, lattice.state)
    return [LangLabel.UNIV if is_univ_default(t.surface) else LABELS[y] for t, y in zip(sentence, path)]


class CRFTagger:
    kind = "crf"

    def __init__(self, model):
        self.model = model

    @classmethod
    def train(cls, corpus, l2=0.1, max_iters=200, tol=1e-6, config=None, min_count=1):
        return cls(train_crf(corpus, config, l2, max_iters, tol, min_count))

    def tag(self, sentence):
        return decode_crf(self.model, sentence)
