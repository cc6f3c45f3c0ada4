"""Max-sum decoding over first-order label lattices.

Path score, summed strictly left to right::

    start[y0] + emit[0, y0] + (trans[y0, y1] + emit[1, y1]) + ...

Among equal-scoring paths the lexicographically smallest label sequence
(compared from the left, in label order) wins.
"""

import itertools

import numpy as np


def path_score(start, trans, emit, path):
    score = start[path[0]] + emit[0, path[0]]
    for i in range(1, len(path)):
        score = score + trans[path[i - 1], path[i]]
        score = score + emit[i, path[i]]
    return float(score)


def viterbi_path(start, trans, emit):
    """Best path and its score.

    Alongside the usual backpointers, each state keeps the lexicographic rank
    of its best prefix so ties resolve exactly as a left-to-right enumeration
    would.
    """
    emit = np.asarray(emit, dtype=np.float64)
    n, n_labels = emit.shape
    if n == 0:
        raise ValueError("cannot decode an empty sequence")
    labels = np.arange(n_labels)
    delta = start + emit[0]
    rank = labels.copy()
    back = np.zeros((n, n_labels), dtype=np.int64)
    for t in range(1, n):
        cand = delta[:, None] + trans  # (prev, cur), same association as path_score
        best = cand.max(axis=0)
        tied = cand == best[None, :]
        # among tied predecessors pick the one with the smallest prefix rank
        prev = np.where(tied, rank[:, None], n_labels).argmin(axis=0)
        back[t] = prev
        delta = best + emit[t]
        rank = np.lexsort((labels, rank[prev])).argsort()
    final_best = delta.max()
    last = int(np.where(delta == final_best, rank, n_labels).argmin())
    path = [last]
    for t in range(n - 1, 0, -1):
        path.append(int(back[t, path[-1]]))
    path.reverse()
    return path, float(final_best)


def brute_force_path(start, trans, emit):
    """Enumerate every path; first maximum in lexicographic order wins."""
    n, n_labels = np.asarray(emit).shape
    best_path, best_score = None, -np.inf
    for path in itertools.product(range(n_labels), repeat=n):
        s = path_score(start, trans, emit, path)
        if s > best_score:
            best_path, best_score = list(path), s
    return best_path, best_score
