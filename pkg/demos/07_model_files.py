"""
Saving and loading models
=========================

Model files are versioned binary records with a trailing SHA-256
checksum.  Floats are stored bit for bit, so a loaded model predicts
exactly what the saved one did.
"""

import os
import tempfile

from cmlid import load_sample_corpus
from cmlid import modelio
from cmlid.errors import ModelFileError
from cmlid.evaluation import tag_corpus
from cmlid.hmm import HMMTagger

corpus = load_sample_corpus()
tagger = HMMTagger.train(corpus)

with tempfile.TemporaryDirectory() as tmp:
    path = os.path.join(tmp, "hmm.model")
    modelio.save(tagger, path, {"k_trans": 0.1, "k_emit": 0.1})
    print(f"wrote {os.path.getsize(path)} bytes")
    loaded, hyper = modelio.load(path)
    print("hyperparameters:", hyper)
    print("predictions identical:", tag_corpus(loaded, corpus) == tag_corpus(tagger, corpus))

    # Any flipped bit is caught by the checksum
    data = bytearray(open(path, "rb").read())
    data[100] ^= 0x10
    try:
        modelio.loads(bytes(data))
    except ModelFileError as exc:
        print("corrupt file rejected:", exc)
