"""``cmlid`` command line: stats, train, tag, eval, cv, compare.

Exit codes: 0 success, 2 usage/config error, 3 data/format error,
4 model-file error, 5 internal numerical failure.
"""

import argparse
import sys
from dataclasses import dataclass, replace
from typing import Tuple

from . import modelio
from .corpus import parse_corpus, read_corpus, serialize_corpus, label_stats
from .errors import CmlidError, ConfigError, DataError, ModelFileError
from .evaluation import ModelSpec, compare_models, cross_validate, evaluate_tagger, score, train_backend
from .features import CHAR_TRIGRAM, TFIDF_MODES, CrfFeatureConfig

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_MODEL = 4
EXIT_NUMERIC = 5

BACKENDS = ("nb", "rf", "hmm", "crf")


@dataclass(frozen=True)
class RunConfig:
    backend: str = "crf"
    alpha: float = 1.0
    nb_mode: str = CHAR_TRIGRAM
    n_trees: int = 50
    seed: int = 0
    k_trans: float = 0.1
    k_emit: float = 0.1
    l2: float = 0.1
    max_iters: int = 200
    tol: float = 1e-6
    ngram_orders: Tuple[int, ...] = (1, 2, 3)
    affix_length: int = 3
    folds: int = 3
    test_fraction: float = 0.2

    def validate(self):
        def bad(msg):
            raise ConfigError(msg)

        if self.backend not in BACKENDS:
            bad(f"backend must be one of {', '.join(BACKENDS)}, got {self.backend!r}")
        if not self.alpha > 0:
            bad(f"alpha must be > 0, got {self.alpha}")
        if self.nb_mode not in TFIDF_MODES:
            bad(f"nb-mode must be one of {', '.join(TFIDF_MODES)}, got {self.nb_mode!r}")
        if self.n_trees < 1:
            bad(f"n-trees must be >= 1, got {self.n_trees}")
        if self.k_trans < 0 or self.k_emit < 0:
            bad("k-trans and k-emit must be >= 0")
        if self.l2 < 0:
            bad(f"l2 must be >= 0, got {self.l2}")
        if self.max_iters < 0:
            bad(f"max-iters must be >= 0, got {self.max_iters}")
        if not self.tol >= 0:
            bad(f"tol must be >= 0, got {self.tol}")
        if not self.ngram_orders or min(self.ngram_orders) < 1:
            bad("ngram-orders must be positive integers")
        if self.affix_length < 1:
            bad(f"affix-length must be >= 1, got {self.affix_length}")
        if self.folds < 2:
            bad(f"folds must be >= 2, got {self.folds}")
        if not 0 < self.test_fraction < 1:
            bad(f"test-fraction must lie in (0, 1), got {self.test_fraction}")
        return self

    def hyperparameters(self):
        if self.backend == "nb":
            return {"alpha": self.alpha, "mode": self.nb_mode}
        if self.backend == "rf":
            return {"n_trees": self.n_trees, "seed": self.seed}
        if self.backend == "hmm":
            return {"k_trans": self.k_trans, "k_emit": self.k_emit}
        config = CrfFeatureConfig(affix_length=self.affix_length, ngram_orders=self.ngram_orders)
        return {"l2": self.l2, "max_iters": self.max_iters, "tol": self.tol, "config": config}

    def model_spec(self):
        return ModelSpec(self.backend, self.hyperparameters())

    def file_record(self):
        """JSON-safe hyperparameters for the model file header."""
        params = dict(self.hyperparameters())
        if "config" in params:
            params["config"] = params["config"].to_dict()
        return {"backend": self.backend, **params}


_FIELD_TYPES = {
    "backend": str, "alpha": float, "nb_mode": str, "n_trees": int, "seed": int,
    "k_trans": float, "k_emit": float, "l2": float, "max_iters": int, "tol": float,
    "ngram_orders": lambda s: tuple(int(x) for x in str(s).split(",") if x.strip()),
    "affix_length": int, "folds": int, "test_fraction": float,
}
_ALIASES = {"lambda": "l2", "k": "folds", "n_folds": "folds"}


def _coerce(key, value):
    key = key.strip().replace("-", "_")
    key = _ALIASES.get(key, key)
    if key not in _FIELD_TYPES:
        raise ConfigError(f"unknown configuration key {key!r}")
    try:
        return key, _FIELD_TYPES[key](value)
    except ValueError:
        raise ConfigError(f"invalid value for {key}: {value!r}") from None


def read_config_file(path):
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    for n, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key=value")
        key, value = line.split("=", 1)
        k, v = _coerce(key, value.strip())
        values[k] = v
    return values


def build_config(args):
    """Defaults, then the config file, then explicit flags."""
    values = {}
    if getattr(args, "config", None):
        values.update(read_config_file(args.config))
    for key in _FIELD_TYPES:
        flag = getattr(args, key, None)
        if flag is None:
            continue
        if key == "ngram_orders":
            flag = _coerce(key, flag)[1]
        values[key] = flag
    return replace(RunConfig(), **values).validate()


def _add_config_flags(p):
    p.add_argument("--config", help="key=value configuration file (flags win on conflict)")
    p.add_argument("--backend", choices=BACKENDS)
    p.add_argument("--alpha", type=float, help="NB smoothing (default 1.0)")
    p.add_argument("--nb-mode", dest="nb_mode", choices=TFIDF_MODES, help="NB TF-IDF terms (default char-trigram)")
    p.add_argument("--n-trees", dest="n_trees", type=int, help="RF trees (default 50)")
    p.add_argument("--seed", type=int, help="RF and split seed (default 0)")
    p.add_argument("--k-trans", dest="k_trans", type=float, help="HMM transition add-k (default 0.1)")
    p.add_argument("--k-emit", dest="k_emit", type=float, help="HMM emission add-k (default 0.1)")
    p.add_argument("--lambda", "--l2", dest="l2", type=float, help="CRF L2 coefficient (default 0.1)")
    p.add_argument("--max-iters", dest="max_iters", type=int, help="CRF iterations (default 200)")
    p.add_argument("--tol", type=float, help="CRF objective tolerance (default 1e-6)")
    p.add_argument("--ngram-orders", dest="ngram_orders", help="CRF char n-gram orders, e.g. 1,2,3")
    p.add_argument("--affix-length", dest="affix_length", type=int, help="CRF prefix/suffix length (default 3)")


def _open_out(path, out):
    if path in (None, "-"):
        return out, False
    try:
        return open(path, "w", encoding="utf-8", newline="\n"), True
    except OSError as exc:
        raise DataError(f"cannot open output {path}: {exc.strerror}") from None


def _read_corpus(path):
    try:
        return read_corpus(path)
    except FileNotFoundError:
        raise DataError(f"corpus file not found: {path}") from None
    except OSError as exc:
        raise DataError(f"cannot read corpus {path}: {exc.strerror}") from None


def cmd_stats(args, out):
    stats = label_stats(_read_corpus(args.corpus))
    print(stats.format_table(), file=out)
    return EXIT_OK


def cmd_train(args, out):
    config = build_config(args)
    corpus = _read_corpus(args.corpus)
    corpus.require_labeled()
    tagger = train_backend(config.model_spec(), corpus)
    try:
        modelio.save(tagger, args.model, config.file_record())
    except OSError as exc:
        raise ModelFileError(f"cannot write model {args.model}: {exc.strerror}") from None
    print(f"backend: {config.backend}", file=out)
    print(f"sentences: {len(corpus)}  tokens: {corpus.token_count}", file=out)
    history = getattr(getattr(tagger, "model", None), "history", ())
    if history:
        print(f"iterations: {len(history) - 1}  final objective: {history[-1]:.6f}", file=out)
    print(f"model written to {args.model}", file=out)
    return EXIT_OK


def cmd_tag(args, out):
    tagger, _ = modelio.load(args.model)
    if args.input in (None, "-"):
        text = sys.stdin.read()
    else:
        try:
            with open(args.input, encoding="utf-8", newline="") as fh:
                text = fh.read()
        except OSError as exc:
            raise DataError(f"cannot read input {args.input}: {exc.strerror}") from None
    corpus = parse_corpus(text, allow_empty=True)
    tagged = type(corpus)(tuple(s.relabel(tagger.tag(s)) for s in corpus))
    fh, close = _open_out(args.output, out)
    try:
        fh.write(serialize_corpus(tagged))
    finally:
        if close:
            fh.close()
    return EXIT_OK


def _print_report(report, out):
    print(report.format_table(), file=out)
    print("", file=out)
    print("# records: metric<TAB>label<TAB>value", file=out)
    print(report.records(), file=out)


def cmd_eval(args, out):
    gold = _read_corpus(args.corpus)
    gold.require_labeled()
    if args.predictions:
        predicted = _read_corpus(args.predictions)
        predicted.require_labeled()
        report = score(gold, [s.labels for s in predicted], {"model": "predictions", "protocol": "external"})
    else:
        if not args.model:
            raise ConfigError("eval needs --model or --predictions")
        tagger, _ = modelio.load(args.model)
        report = evaluate_tagger(tagger, gold, {"model": tagger.kind, "protocol": "given-corpus"})
    _print_report(report, out)
    return EXIT_OK


def cmd_cv(args, out):
    config = build_config(args)
    corpus = _read_corpus(args.corpus)
    result = cross_validate(corpus, config.model_spec(), config.folds, config.seed)
    print(result.format(), file=out)
    print(f"pooled tokens: {result.pooled.total}  corpus tokens: {corpus.token_count}", file=out)
    print("", file=out)
    print("# records: metric<TAB>label<TAB>value", file=out)
    print(result.records(), file=out)
    return EXIT_OK


def cmd_compare(args, out):
    config = build_config(args)
    corpus = _read_corpus(args.corpus)
    specs = [replace(config, backend=b).validate().model_spec() for b in args.backends.split(",")]
    table = compare_models(corpus, specs, args.protocol, config.seed, config.folds, config.test_fraction)
    print(table.format_table(), file=out)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="cmlid", description="Word-level language identification for English-Telugu code-mixed text.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="label frequency table of a labeled corpus")
    p.add_argument("corpus")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("train", help="train a model and write a model file")
    p.add_argument("corpus")
    p.add_argument("model", help="output model path")
    _add_config_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("tag", help="label tokens with a trained model")
    p.add_argument("model")
    p.add_argument("input", nargs="?", help="corpus file (default: standard input)")
    p.add_argument("-o", "--output", help="output file (default: standard output)")
    p.set_defaults(func=cmd_tag)

    p = sub.add_parser("eval", help="score a model (or a predictions file) on a labeled corpus")
    p.add_argument("corpus")
    p.add_argument("--model")
    p.add_argument("--predictions", help="tagged corpus to score instead of running a model")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("cv", help="k-fold cross-validation")
    p.add_argument("corpus")
    p.add_argument("-k", "--folds", type=int)
    _add_config_flags(p)
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("compare", help="accuracy table for several backends under one protocol")
    p.add_argument("corpus")
    p.add_argument("--backends", default="nb,rf,hmm,crf")
    p.add_argument("--protocol", choices=("cv", "split"), default="cv")
    p.add_argument("--test-fraction", dest="test_fraction", type=float)
    p.add_argument("-k", "--folds", type=int)
    _add_config_flags(p)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except CmlidError as exc:
        print(f"cmlid {args.command}: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, KeyError) as exc:
        # precondition violations surfacing from library calls
        print(f"cmlid {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ArithmeticError, FloatingPointError) as exc:
        print(f"cmlid {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main_entry():
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
