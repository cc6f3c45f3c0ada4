"""Word-level language identification for romanized English-Telugu code-mixed text."""

from importlib import resources

from .corpus import (
    LABELS,
    Corpus,
    LabelStats,
    LangLabel,
    Sentence,
    Token,
    kfold,
    label_stats,
    parse_corpus,
    read_corpus,
    serialize_corpus,
    split,
)
from .evaluation import ModelSpec, compare_models, cross_validate, score

__version__ = "0.1.0"

__all__ = [
    "LABELS",
    "Corpus",
    "LabelStats",
    "LangLabel",
    "ModelSpec",
    "Sentence",
    "Token",
    "compare_models",
    "cross_validate",
    "kfold",
    "label_stats",
    "load_sample_corpus",
    "parse_corpus",
    "read_corpus",
    "sample_corpus_path",
    "score",
    "serialize_corpus",
    "split",
]


def sample_corpus_path():
    """Path of the bundled synthetic sample corpus."""
    return str(resources.files(__package__) / "data" / "sample_corpus.tsv")


def load_sample_corpus():
    return read_corpus(sample_corpus_path())
