import os

import pytest

from cmlid import modelio
from cmlid.baselines import RFTagger
from cmlid.corpus import Corpus
from cmlid.errors import ModelFileError
from cmlid.evaluation import tag_corpus

KINDS = ["nb", "rf", "hmm", "crf"]


@pytest.mark.parametrize("kind", KINDS)
def test_round_trip_preserves_predictions(kind, small_taggers, sample_corpus, tmp_path):
    tagger = small_taggers[kind]
    path = tmp_path / f"{kind}.model"
    modelio.save(tagger, path, {"backend": kind})
    loaded, hyper = modelio.load(path)
    assert hyper == {"backend": kind}
    assert loaded.kind == kind
    held_out = Corpus(list(sample_corpus)[150:])
    assert tag_corpus(loaded, held_out) == tag_corpus(tagger, held_out)
    # a second save of the loaded model is byte-identical
    assert modelio.dumps(loaded, hyper) == path.read_bytes()


def test_crf_weights_exact(small_taggers):
    model = small_taggers["crf"].model
    loaded = modelio.loads(modelio.dumps(small_taggers["crf"]))[0].model
    assert loaded.flat().tobytes() == model.flat().tobytes()
    assert loaded.config == model.config


def test_flipped_byte_is_detected(small_taggers):
    data = bytearray(modelio.dumps(small_taggers["hmm"]))
    for pos in (20, len(data) // 2, len(data) - 1):
        bad = bytearray(data)
        bad[pos] ^= 0x01
        with pytest.raises(ModelFileError):
            modelio.loads(bytes(bad))


def test_bad_magic_version_and_truncation(small_taggers):
    data = modelio.dumps(small_taggers["nb"])
    with pytest.raises(ModelFileError, match="magic"):
        modelio.loads(b"XXXXX" + data[5:])
    with pytest.raises(ModelFileError, match="version"):
        modelio.loads(data[:5] + b"\x00\x02" + data[7:])
    with pytest.raises(ModelFileError):
        modelio.loads(data[:40])
    with pytest.raises(ModelFileError):
        modelio.loads(b"")


def test_same_seed_gives_identical_files(small_corpus):
    a = RFTagger.train(small_corpus, n_trees=3, seed=11)
    b = RFTagger.train(small_corpus, n_trees=3, seed=11)
    assert modelio.dumps(a, {"seed": 11}) == modelio.dumps(b, {"seed": 11})


def test_missing_file(tmp_path):
    with pytest.raises(ModelFileError):
        modelio.load(tmp_path / "absent.model")


def test_atomic_write_leaves_no_partial_file(small_taggers, tmp_path, monkeypatch):
    target = tmp_path / "m.model"
    modelio.save(small_taggers["hmm"], target)
    before = target.read_bytes()

    def fail(*args, **kwargs):
        raise OSError("disk full")

    monkeypatch.setattr(os, "replace", fail)
    with pytest.raises(OSError):
        modelio.save(small_taggers["crf"], target)
    assert target.read_bytes() == before
    assert sorted(p.name for p in tmp_path.iterdir()) == ["m.model"]


def test_unknown_backend_rejected():
    class Fake:
        kind = "svm"

    with pytest.raises(ValueError):
        modelio.dumps(Fake())
