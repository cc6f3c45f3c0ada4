"""Scoring, cross-validation and model comparison."""

import statistics
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional

import numpy as np

from .corpus import LABELS, N_LABELS, LangLabel, kfold, split
from .errors import ShapeMismatch


@dataclass(frozen=True)
class ConfusionMatrix:
    counts: np.ndarray  # [gold, predicted]

    @classmethod
    def from_pairs(cls, gold, predicted):
        counts = np.zeros((N_LABELS, N_LABELS), dtype=np.int64)
        for g, p in zip(gold, predicted):
            counts[g.index, p.index] += 1
        return cls(counts)

    def __add__(self, other):
        return ConfusionMatrix(self.counts + other.counts)

    @property
    def total(self):
        return int(self.counts.sum())

    @property
    def accuracy(self):
        return float(np.trace(self.counts) / self.total) if self.total else 0.0


@dataclass(frozen=True)
class LabelScores:
    precision: float
    recall: float
    f1: float
    support: int
    precision_defined: bool
    recall_defined: bool

    @property
    def f1_defined(self):
        return self.precision_defined or self.recall_defined


@dataclass(frozen=True)
class Averages:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class EvalReport:
    confusion: ConfusionMatrix
    per_label: Dict[LangLabel, LabelScores]
    macro: Averages
    weighted: Averages
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def accuracy(self):
        return self.confusion.accuracy

    @property
    def total(self):
        return self.confusion.total

    def with_metadata(self, **extra):
        return report_from_confusion(self.confusion, {**self.metadata, **extra})

    def format_table(self):
        lines = []
        if self.metadata:
            lines.append("  ".join(f"{k}={v}" for k, v in self.metadata.items()))
        lines.append(f"{'Label':<10}{'Precision':>10}{'Recall':>10}{'F1-Score':>10}{'Support':>9}")
        for label in LABELS:
            s = self.per_label[label]
            p = f"{s.precision:.4f}" if s.precision_defined else "undef"
            r = f"{s.recall:.4f}" if s.recall_defined else "undef"
            f = f"{s.f1:.4f}" if s.f1_defined else "undef"
            lines.append(f"{label.value:<10}{p:>10}{r:>10}{f:>10}{s.support:>9d}")
        for name, avg in (("macro", self.macro), ("weighted", self.weighted)):
            lines.append(f"{name:<10}{avg.precision:>10.4f}{avg.recall:>10.4f}{avg.f1:>10.4f}{self.total:>9d}")
        lines.append(f"accuracy  {self.accuracy:.4f}  ({int(np.trace(self.confusion.counts))}/{self.total})")
        lines.append("confusion (rows gold, columns predicted):")
        lines.append(" " * 6 + "".join(f"{y.value:>7}" for y in LABELS))
        for y, row in zip(LABELS, self.confusion.counts):
            lines.append(f"{y.value:<6}" + "".join(f"{int(c):>7d}" for c in row))
        return "\n".join(lines)

    def records(self):
        """Machine-readable ``metric<TAB>label<TAB>value`` lines."""
        out = [f"{k}\tmeta\t{v}" for k, v in self.metadata.items()]
        out.append(f"tokens\tALL\t{self.total}")
        out.append(f"accuracy\tALL\t{self.accuracy:.6f}")
        for label in LABELS:
            s = self.per_label[label]
            for metric, value, defined in (
                ("precision", s.precision, s.precision_defined),
                ("recall", s.recall, s.recall_defined),
                ("f1", s.f1, s.f1_defined),
            ):
                out.append(f"{metric}\t{label.value}\t{value:.6f}")
                if not defined:
                    out.append(f"undefined\t{label.value}\t{metric}")
            out.append(f"support\t{label.value}\t{s.support}")
        for name, avg in (("macro", self.macro), ("weighted", self.weighted)):
            out.append(f"precision\t{name}\t{avg.precision:.6f}")
            out.append(f"recall\t{name}\t{avg.recall:.6f}")
            out.append(f"f1\t{name}\t{avg.f1:.6f}")
        for g in LABELS:
            for p in LABELS:
                out.append(f"confusion\t{g.value}>{p.value}\t{int(self.confusion.counts[g.index, p.index])}")
        return "\n".join(out)


def _mean_defined(values):
    return float(np.mean(values)) if values else 0.0


def report_from_confusion(confusion, metadata=None):
    c = confusion.counts
    tp = np.diag(c).astype(np.float64)
    predicted = c.sum(axis=0)
    support = c.sum(axis=1)
    per_label = {}
    for i, label in enumerate(LABELS):
        p_def = predicted[i] > 0
        r_def = support[i] > 0
        p = tp[i] / predicted[i] if p_def else 0.0
        r = tp[i] / support[i] if r_def else 0.0
        f = 2 * p * r / (p + r) if p + r > 0 else 0.0
        per_label[label] = LabelScores(float(p), float(r), float(f), int(support[i]), bool(p_def), bool(r_def))
    scores = list(per_label.values())
    macro = Averages(
        _mean_defined([s.precision for s in scores if s.precision_defined]),
        _mean_defined([s.recall for s in scores if s.recall_defined]),
        _mean_defined([s.f1 for s in scores if s.f1_defined]),
    )
    n = support.sum()
    w = support / n if n else np.zeros(N_LABELS)
    weighted = Averages(
        float(sum(wi * s.precision for wi, s in zip(w, scores))),
        float(sum(wi * s.recall for wi, s in zip(w, scores))),
        float(sum(wi * s.f1 for wi, s in zip(w, scores))),
    )
    return EvalReport(confusion, per_label, macro, weighted, dict(metadata or {}))


def score(gold, predicted, metadata=None):
    """Score predicted label sequences against a labeled corpus, token for token."""
    predicted = list(predicted)
    if len(predicted) != len(gold):
        raise ShapeMismatch(f"{len(gold)} gold sentences but {len(predicted)} predicted sequences")
    gold.require_labeled()
    pairs_gold, pairs_pred = [], []
    for i, (sentence, labels) in enumerate(zip(gold, predicted)):
        if len(labels) != len(sentence):
            raise ShapeMismatch(
                f"sentence {i + 1}: {len(sentence)} gold tokens but {len(labels)} predicted labels"
            )
        pairs_gold.extend(sentence.labels)
        pairs_pred.extend(LangLabel(y) for y in labels)
    return report_from_confusion(ConfusionMatrix.from_pairs(pairs_gold, pairs_pred), metadata)


# ---------------------------------------------------------------------------
# experiment harness


@dataclass(frozen=True)
class ModelSpec:
    """A backend name (``nb``, ``rf``, ``hmm``, ``crf``) or any object with
    ``train(corpus, **params)`` returning a tagger, plus its hyperparameters."""

    backend: Any
    params: Mapping[str, Any] = field(default_factory=dict)
    name: Optional[str] = None

    @property
    def label(self):
        if self.name:
            return self.name
        return self.backend if isinstance(self.backend, str) else getattr(self.backend, "kind", type(self.backend).__name__)


def backend_class(kind):
    from .baselines import NBTagger, RFTagger
    from .crf import CRFTagger
    from .hmm import HMMTagger

    table = {"nb": NBTagger, "rf": RFTagger, "hmm": HMMTagger, "crf": CRFTagger}
    try:
        return table[kind]
    except KeyError:
        raise ValueError(f"unknown backend {kind!r}; expected one of {sorted(table)}") from None


def train_backend(spec, corpus):
    trainer = backend_class(spec.backend) if isinstance(spec.backend, str) else spec.backend
    return trainer.train(corpus, **dict(spec.params))


def tag_corpus(tagger, corpus):
    return [tagger.tag(sentence) for sentence in corpus]


def evaluate_tagger(tagger, corpus, metadata=None):
    return score(corpus, tag_corpus(tagger, corpus), metadata)


@dataclass(frozen=True)
class CVResult:
    folds: List[EvalReport]
    pooled: EvalReport
    mean_accuracy: float
    sd_accuracy: float

    def format(self):
        parts = []
        for i, report in enumerate(self.folds, start=1):
            parts.append(f"== fold {i}/{len(self.folds)} ==\n{report.format_table()}")
        parts.append(f"== pooled ==\n{self.pooled.format_table()}")
        parts.append(f"per-fold accuracy: mean {self.mean_accuracy:.4f} sd {self.sd_accuracy:.4f}")
        return "\n\n".join(parts)

    def records(self):
        lines = []
        for i, report in enumerate(self.folds, start=1):
            lines += [f"fold{i}:{r}" for r in report.records().splitlines()]
        lines += [f"pooled:{r}" for r in self.pooled.records().splitlines()]
        lines.append(f"pooled:accuracy_mean\tALL\t{self.mean_accuracy:.6f}")
        lines.append(f"pooled:accuracy_sd\tALL\t{self.sd_accuracy:.6f}")
        return "\n".join(lines)


def cross_validate(corpus, spec, k=3, seed=0):
    corpus.require_labeled()
    meta = {"model": spec.label, "protocol": f"{k}-fold-cv", "seed": seed}
    folds = []
    for i, (train, test) in enumerate(kfold(corpus, k, seed), start=1):
        tagger = train_backend(spec, train)
        folds.append(evaluate_tagger(tagger, test, {**meta, "fold": i}))
    pooled_cm = folds[0].confusion
    for report in folds[1:]:
        pooled_cm = pooled_cm + report.confusion
    accs = [r.accuracy for r in folds]
    sd = statistics.stdev(accs) if len(accs) > 1 else 0.0
    return CVResult(folds, report_from_confusion(pooled_cm, {**meta, "fold": "pooled"}), statistics.fmean(accs), sd)


@dataclass(frozen=True)
class ComparisonRow:
    model: str
    accuracy: float
    protocol: str


@dataclass(frozen=True)
class ComparisonTable:
    rows: List[ComparisonRow]

    def format_table(self):
        width = max([len("Model")] + [len(r.model) for r in self.rows])
        lines = [f"{'Model':<{width}}  {'Accuracy(%)':>11}  Protocol"]
        for r in self.rows:
            lines.append(f"{r.model:<{width}}  {100 * r.accuracy:>11.2f}  {r.protocol}")
        return "\n".join(lines)


def compare_models(corpus, specs, protocol="cv", seed=0, k=3, test_fraction=0.2):
    """Accuracy of every spec under one shared protocol, in spec order.

    ``protocol`` is ``"cv"`` (pooled k-fold accuracy) or ``"split"`` (one
    seeded held-out split).
    """
    specs = list(specs)
    if not specs:
        raise ValueError("need at least one model spec")
    rows = []
    if protocol == "cv":
        for spec in specs:
            result = cross_validate(corpus, spec, k, seed)
            rows.append(ComparisonRow(spec.label, result.pooled.accuracy, f"{k}-fold-cv seed={seed}"))
    elif protocol == "split":
        train, test = split(corpus, test_fraction, seed)
        for spec in specs:
            report = evaluate_tagger(train_backend(spec, train), test)
            rows.append(ComparisonRow(spec.label, report.accuracy, f"split test={test_fraction} seed={seed}"))
    else:
        raise ValueError(f"protocol must be 'cv' or 'split', got {protocol!r}")
    return ComparisonTable(rows)
