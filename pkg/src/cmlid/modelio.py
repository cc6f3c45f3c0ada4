"""Versioned binary model files.

Layout (integers big-endian)::

    b"CMLID"  u16 version  u8+bytes backend kind
    u32+bytes hyperparameters (JSON, sorted keys)
    u32 n + n * (u32+bytes)  feature index names
    payload records (length-prefixed strings, shaped raw float64/int64 arrays)
    32-byte SHA-256 of every preceding byte

Floats are stored as raw IEEE-754 bits, so save/load is exact.
"""

import hashlib
import json
import os
import struct
import tempfile

import numpy as np

from .baselines import DecisionTree, NBModel, NBTagger, RFModel, RFTagger
from .crf import CRFModel, CRFTagger
from .errors import ModelFileError
from .features import UNSEEN_TERM, CountVectorizer, CrfFeatureConfig, FeatureIndex, TfIdfVectorizer
from .hmm import HMMModel, HMMTagger

MAGIC = b"CMLID"
VERSION = 1
KINDS = ("nb", "rf", "hmm", "crf")
_DIGEST = 32


class _Writer:
    def __init__(self):
        self.parts = []

    def raw(self, b):
        self.parts.append(b)

    def u8(self, v):
        self.raw(struct.pack(">B", v))

    def u16(self, v):
        self.raw(struct.pack(">H", v))

    def u32(self, v):
        self.raw(struct.pack(">I", v))

    def i64(self, v):
        self.raw(struct.pack(">q", v))

    def f64(self, v):
        self.raw(struct.pack(">d", v))

    def text(self, s):
        b = s.encode("utf-8")
        self.u32(len(b))
        self.raw(b)

    def texts(self, items):
        items = list(items)
        self.u32(len(items))
        for s in items:
            self.text(s)

    def array(self, a, dtype):
        a = np.ascontiguousarray(a, dtype=dtype)
        self.u8(a.ndim)
        for d in a.shape:
            self.raw(struct.pack(">Q", d))
        self.raw(a.astype(np.dtype(dtype).newbyteorder(">")).tobytes())

    def f64s(self, a):
        self.array(a, np.float64)

    def i64s(self, a):
        self.array(a, np.int64)

    def getvalue(self):
        return b"".join(self.parts)


class _Reader:
    def __init__(self, data):
        self.data = data
        self.pos = 0

    def raw(self, n):
        if self.pos + n > len(self.data):
            raise ModelFileError("model file is truncated")
        b = self.data[self.pos:self.pos + n]
        self.pos += n
        return b

    def _unpack(self, fmt):
        return struct.unpack(fmt, self.raw(struct.calcsize(fmt)))[0]

    def u8(self):
        return self._unpack(">B")

    def u16(self):
        return self._unpack(">H")

    def u32(self):
        return self._unpack(">I")

    def i64(self):
        return self._unpack(">q")

    def f64(self):
        return self._unpack(">d")

    def text(self):
        try:
            return self.raw(self.u32()).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ModelFileError(f"corrupt string in model file: {exc}") from None

    def texts(self):
        return [self.text() for _ in range(self.u32())]

    def array(self, dtype):
        ndim = self.u8()
        shape = tuple(self._unpack(">Q") for _ in range(ndim))
        dt = np.dtype(dtype).newbyteorder(">")
        n = int(np.prod(shape)) if shape else 1
        return np.frombuffer(self.raw(n * dt.itemsize), dtype=dt).astype(dtype).reshape(shape)

    def f64s(self):
        return self.array(np.float64)

    def i64s(self):
        return self.array(np.int64)


# ---------------------------------------------------------------------------
# per-backend payloads


def _write_nb(w, tagger):
    vec, model = tagger.vectorizer, tagger.model
    w.text(vec.mode)
    w.i64(vec.n_docs)
    w.i64s([vec.doc_freq[t] for t in vec.index.names[1:]])
    w.f64(model.alpha)
    w.f64s(model.log_prior)
    w.f64s(model.log_likelihood)


def _read_nb(r, index, hyper):
    mode = r.text()
    n_docs = r.i64()
    df = r.i64s()
    terms = index.names[1:]
    if index.names[:1] != (UNSEEN_TERM,) or len(df) != len(terms):
        raise ModelFileError("NB vocabulary does not match its document frequencies")
    vec = TfIdfVectorizer(mode, dict(zip(terms, df.tolist())), n_docs)
    alpha = r.f64()
    model = NBModel(r.f64s(), r.f64s(), alpha, vec.index)
    return NBTagger(vec, model)


def _write_rf(w, tagger):
    vec, model = tagger.vectorizer, tagger.model
    w.i64s([vec.term_counts[t] for t in vec.index.names])
    w.i64(model.seed)
    w.i64(model.n_features)
    w.text(json.dumps(model.max_features))
    w.u32(len(model.trees))
    for tree in model.trees:
        w.i64s(tree.feature)
        w.f64s(tree.threshold)
        w.i64s(tree.left)
        w.i64s(tree.right)
        w.f64s(tree.value)
        w.f64s(tree.impurity_decrease)
    w.f64s(model.importances)


def _read_rf(r, index, hyper):
    counts = r.i64s()
    if len(counts) != len(index):
        raise ModelFileError("RF term counts do not match the feature index")
    vec = CountVectorizer(dict(zip(index.names, counts.tolist())))
    seed = r.i64()
    n_features = r.i64()
    max_features = json.loads(r.text())
    trees = []
    for _ in range(r.u32()):
        trees.append(DecisionTree(r.i64s(), r.f64s(), r.i64s(), r.i64s(), r.f64s(), r.f64s()))
    importances = r.f64s()
    return RFTagger(vec, RFModel(tuple(trees), n_features, seed, max_features, vec.index, importances))


def _write_hmm(w, tagger):
    m = tagger.model
    w.f64(m.k_trans)
    w.f64(m.k_emit)
    w.f64s(m.start)
    w.f64s(m.trans)
    w.f64s(m.emit)


def _read_hmm(r, index, hyper):
    k_trans, k_emit = r.f64(), r.f64()
    start, trans, emit = r.f64s(), r.f64s(), r.f64s()
    if emit.shape[1] != len(index) + 1:
        raise ModelFileError("HMM emission table does not match the vocabulary")
    return HMMTagger(HMMModel(start, trans, emit, index.names, k_trans, k_emit))


def _write_crf(w, tagger):
    m = tagger.model
    w.text(json.dumps(m.config.to_dict(), sort_keys=True))
    w.f64(m.l2)
    w.f64s(m.state_weights)
    w.f64s(m.start)
    w.f64s(m.trans)


def _read_crf(r, index, hyper):
    config = CrfFeatureConfig.from_dict(json.loads(r.text()))
    l2 = r.f64()
    state, start, trans = r.f64s(), r.f64s(), r.f64s()
    return CRFTagger(CRFModel(index, state, start, trans, config, l2))


def _index_names(tagger):
    if tagger.kind in ("nb", "rf"):
        return tagger.vectorizer.index.names
    if tagger.kind == "hmm":
        return tagger.model.vocabulary
    return tagger.model.index.names


_WRITERS = {"nb": _write_nb, "rf": _write_rf, "hmm": _write_hmm, "crf": _write_crf}
_READERS = {"nb": _read_nb, "rf": _read_rf, "hmm": _read_hmm, "crf": _read_crf}


# ---------------------------------------------------------------------------


def dumps(tagger, hyperparameters=None):
    kind = tagger.kind
    if kind not in KINDS:
        raise ValueError(f"cannot serialize backend {kind!r}")
    w = _Writer()
    w.raw(MAGIC)
    w.u16(VERSION)
    w.u8(len(kind))
    w.raw(kind.encode("ascii"))
    w.text(json.dumps(hyperparameters or {}, sort_keys=True))
    w.texts(_index_names(tagger))
    _WRITERS[kind](w, tagger)
    body = w.getvalue()
    return body + hashlib.sha256(body).digest()


def loads(data):
    """Tagger from model-file bytes; returns ``(tagger, hyperparameters)``."""
    if len(data) < len(MAGIC) + 2 or data[:len(MAGIC)] != MAGIC:
        raise ModelFileError("not a model file (bad magic)")
    version = struct.unpack(">H", data[len(MAGIC):len(MAGIC) + 2])[0]
    if version != VERSION:
        raise ModelFileError(f"unsupported model file version {version} (expected {VERSION})")
    if len(data) < len(MAGIC) + 2 + _DIGEST:
        raise ModelFileError("model file is truncated")
    body, digest = data[:-_DIGEST], data[-_DIGEST:]
    if hashlib.sha256(body).digest() != digest:
        raise ModelFileError("model file checksum mismatch (file is corrupt)")
    r = _Reader(body)
    r.raw(len(MAGIC) + 2)
    kind = r.raw(r.u8()).decode("ascii", errors="replace")
    if kind not in KINDS:
        raise ModelFileError(f"unknown backend kind {kind!r}")
    try:
        hyper = json.loads(r.text())
        index = FeatureIndex(r.texts()).freeze()
        tagger = _READERS[kind](r, index, hyper)
    except ModelFileError:
        raise
    except (ValueError, KeyError, TypeError, struct.error) as exc:
        raise ModelFileError(f"malformed {kind} model payload: {exc}") from None
    if r.pos != len(body):
        raise ModelFileError("trailing bytes after model payload")
    return tagger, hyper


def save(tagger, path, hyperparameters=None):
    """Write atomically: temp file in the target directory, then rename."""
    data = dumps(tagger, hyperparameters)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".cmlid-", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load(path):
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise ModelFileError(f"cannot read model file {path}: {exc.strerror}") from None
    return loads(data)
