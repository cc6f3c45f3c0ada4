"""Token-per-line corpora of language-tagged code-mixed text.

One token per line, up to three tab-separated columns::

    surface [TAB pos [TAB label]]

Blank lines separate sentences.  Missing POS becomes ``"UNK"``; a missing
label leaves the token untagged.
"""

import enum
import math
import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import (
    EmptyCorpus,
    EmptySurface,
    FormatError,
    TooFewSentences,
    UnknownLabel,
    UnlabeledToken,
)

UNKNOWN_POS = "UNK"

_WHITESPACE = re.compile(r"\s")


class LangLabel(enum.Enum):
    # Declaration order is the tie-break order used by every decoder.
    TE = "TE"
    EN = "EN"
    NE = "NE"
    UNIV = "UNIV"

    def __str__(self):
        return self.value

    @property
    def index(self):
        return _LABEL_INDEX[self]

    @classmethod
    def parse(cls, text):
        try:
            return cls(text)
        except ValueError:
            raise ValueError(f"unknown language label {text!r}") from None


LABELS: Tuple[LangLabel, ...] = tuple(LangLabel)
_LABEL_INDEX = {label: i for i, label in enumerate(LABELS)}
N_LABELS = len(LABELS)


@dataclass(frozen=True)
class Token:
    surface: str
    pos: str = UNKNOWN_POS
    label: Optional[LangLabel] = None

    def __post_init__(self):
        if not self.surface:
            raise ValueError("token surface must be non-empty")
        if _WHITESPACE.search(self.surface):
            raise ValueError(f"token surface contains whitespace: {self.surface!r}")
        if not self.pos or _WHITESPACE.search(self.pos):
            raise ValueError(f"invalid POS tag: {self.pos!r}")


@dataclass(frozen=True)
class Sentence:
    tokens: Tuple[Token, ...]

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if not self.tokens:
            raise ValueError("sentence must contain at least one token")

    def __len__(self):
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def __getitem__(self, i):
        return self.tokens[i]

    @property
    def words(self):
        return [t.surface for t in self.tokens]

    @property
    def labels(self):
        return [t.label for t in self.tokens]

    def is_labeled(self):
        return all(t.label is not None for t in self.tokens)

    def relabel(self, labels):
        """Copy of the sentence carrying ``labels``."""
        if len(labels) != len(self.tokens):
            raise ValueError("label sequence length differs from sentence length")
        return Sentence(tuple(Token(t.surface, t.pos, y) for t, y in zip(self.tokens, labels)))

    @classmethod
    def from_pairs(cls, pairs):
        """Build from ``(word, label)`` or ``(word, pos, label)`` tuples; labels may be strings."""
        tokens = []
        for item in pairs:
            if len(item) == 2:
                word, label = item
                pos = UNKNOWN_POS
            else:
                word, pos, label = item
            if isinstance(label, str):
                label = LangLabel.parse(label)
            tokens.append(Token(word, pos, label))
        return cls(tuple(tokens))


@dataclass(frozen=True)
class Corpus:
    sentences: Tuple[Sentence, ...]

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))

    def __len__(self):
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    def __getitem__(self, i):
        return self.sentences[i]

    @property
    def token_count(self):
        return sum(len(s) for s in self.sentences)

    def tokens(self):
        for sentence in self.sentences:
            yield from sentence.tokens

    def is_labeled(self):
        return all(s.is_labeled() for s in self.sentences)

    def require_labeled(self):
        for i, sentence in enumerate(self.sentences):
            for j, token in enumerate(sentence.tokens):
                if token.label is None:
                    raise UnlabeledToken(
                        f"sentence {i + 1}, token {j + 1} ({token.surface!r}) has no label"
                    )


def token_count(corpus):
    return corpus.token_count


@dataclass(frozen=True)
class LabelStats:
    counts: Dict[LangLabel, int]
    total: int

    @classmethod
    def from_counts(cls, counts):
        full = {label: int(counts.get(label, 0)) for label in LABELS}
        return cls(full, sum(full.values()))

    @property
    def percentages(self):
        if self.total == 0:
            return {label: 0.0 for label in LABELS}
        return {label: 100.0 * n / self.total for label, n in self.counts.items()}

    def format_table(self):
        names = {
            LangLabel.TE: "Telugu",
            LangLabel.EN: "English",
            LangLabel.UNIV: "Universal",
            LangLabel.NE: "Named Entity",
        }
        pct = self.percentages
        lines = [f"{'Language':<14}{'Label':<7}{'Frequency':>10}{'Percentage':>12}"]
        for label in (LangLabel.TE, LangLabel.EN, LangLabel.UNIV, LangLabel.NE):
            lines.append(
                f"{names[label]:<14}{label.value:<7}{self.counts[label]:>10d}{pct[label]:>12.2f}"
            )
        lines.append(f"{'Total':<21}{self.total:>10d}{100.0 if self.total else 0.0:>12.2f}")
        return "\n".join(lines)


def label_stats(corpus):
    corpus.require_labeled()
    counts = {label: 0 for label in LABELS}
    for token in corpus.tokens():
        counts[token.label] += 1
    return LabelStats.from_counts(counts)


def parse_corpus(text, allow_empty=False):
    """Parse corpus text; ``text`` may be a string or an iterable of lines.

    Raises ``EmptyCorpus`` when nothing was parsed, unless ``allow_empty``.
    """
    lines = text.splitlines() if isinstance(text, str) else (l.rstrip("\n") for l in text)
    sentences = []
    current: List[Token] = []
    for line_no, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r")
        if not line.strip():
            if current:
                sentences.append(Sentence(tuple(current)))
                current = []
            continue
        fields = line.split("\t")
        if len(fields) > 3:
            raise FormatError(line_no, f"expected at most 3 tab-separated fields, got {len(fields)}")
        surface = fields[0]
        if not surface:
            raise EmptySurface(line_no)
        if _WHITESPACE.search(surface):
            raise FormatError(line_no, f"surface form contains whitespace: {surface!r}")
        pos = fields[1].strip() if len(fields) > 1 else ""
        pos = pos or UNKNOWN_POS
        if _WHITESPACE.search(pos):
            raise FormatError(line_no, f"POS tag contains whitespace: {pos!r}")
        label = None
        if len(fields) > 2 and fields[2].strip():
            try:
                label = LangLabel(fields[2].strip())
            except ValueError:
                raise UnknownLabel(line_no, fields[2].strip()) from None
        current.append(Token(surface, pos, label))
    if current:
        sentences.append(Sentence(tuple(current)))
    if not sentences and not allow_empty:
        raise EmptyCorpus()
    return Corpus(tuple(sentences))


def read_corpus(path, allow_empty=False):
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_corpus(fh.read(), allow_empty=allow_empty)


def serialize_corpus(corpus):
    out = []
    for sentence in corpus:
        for token in sentence:
            if token.label is None:
                out.append(f"{token.surface}\t{token.pos}\n")
            else:
                out.append(f"{token.surface}\t{token.pos}\t{token.label.value}\n")
        out.append("\n")
    return "".join(out)


def write_corpus(corpus, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_corpus(corpus))


def _shuffled(n, seed):
    return np.random.default_rng(seed).permutation(n)


def split(corpus, test_fraction, seed):
    """Seeded sentence-level train/test split.

    The test part gets ``ceil(test_fraction * n)`` sentences; both parts
    keep the original sentence order.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must lie in (0, 1), got {test_fraction}")
    n = len(corpus)
    n_test = math.ceil(test_fraction * n)
    if n < 2 or n_test >= n:
        raise TooFewSentences(
            f"cannot split {n} sentence(s) with test fraction {test_fraction}"
        )
    order = _shuffled(n, seed)
    test_idx = np.sort(order[:n_test])
    train_idx = np.sort(order[n_test:])
    return (
        Corpus(tuple(corpus[i] for i in train_idx)),
        Corpus(tuple(corpus[i] for i in test_idx)),
    )


def fold_assignment(n, k, seed):
    """Fold id per sentence; sizes differ by at most one, larger folds first."""
    order = _shuffled(n, seed)
    folds = np.empty(n, dtype=np.int64)
    for fold, chunk in enumerate(np.array_split(order, k)):
        folds[chunk] = fold
    return folds


def kfold(corpus, k, seed):
    if int(k) != k or k < 2:
        raise ValueError(f"k must be an integer >= 2, got {k}")
    n = len(corpus)
    if n < k:
        raise TooFewSentences(f"cannot make {k} folds from {n} sentence(s)")
    folds = fold_assignment(n, k, seed)
    pairs = []
    for fold in range(k):
        test = Corpus(tuple(s for s, f in zip(corpus, folds) if f == fold))
        train = Corpus(tuple(s for s, f in zip(corpus, folds) if f != fold))
        pairs.append((train, test))
    return pairs
