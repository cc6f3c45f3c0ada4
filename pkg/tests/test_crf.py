import itertools
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from cmlid.corpus import Corpus, LangLabel, Sentence
from cmlid.crf import (
    CRFModel,
    CRFTagger,
    Lattice,
    build_lattice,
    decode_crf,
    forward_backward,
    nll_and_gradient,
    train_crf,
)
from cmlid.decoding import brute_force_path
from cmlid.errors import EmptyCorpus, NumericalError, UnlabeledToken
from cmlid.features import CrfFeatureConfig, FeatureIndex

TE, EN, NE, UNIV = LangLabel.TE, LangLabel.EN, LangLabel.NE, LangLabel.UNIV
OFF = dict.fromkeys(
    ["current", "next", "previous", "affixes", "length", "starts_with_digit", "contains_digit",
     "starts_with_special", "starts_with_capital", "contains_capital", "previous_label", "char_ngrams"],
    False,
)
WORD_AND_HISTORY = CrfFeatureConfig(**{**OFF, "current": True, "previous_label": True})


def sent(*pairs):
    return Sentence.from_pairs(pairs)


def brute_log_z(lattice):
    n, k = lattice.state.shape
    scores = [lattice.path_score(p) for p in itertools.product(range(k), repeat=n)]
    return float(np.logaddexp.reduce(scores))


def random_lattice(rng, n, scale=2.0):
    return Lattice(rng.normal(0, scale, (n, 4)), rng.normal(0, scale, 4), rng.normal(0, scale, (4, 4)))


# -- lattice -------------------------------------------------------------------------


def test_zero_lattice_partition():
    log_z, node, edge = forward_backward(Lattice(np.zeros((1, 4)), np.zeros(4), np.zeros((4, 4))))
    assert log_z == pytest.approx(math.log(4))
    assert_allclose(node, 0.25)
    log_z, node, edge = forward_backward(Lattice(np.zeros((2, 4)), np.zeros(4), np.zeros((4, 4))))
    assert log_z == pytest.approx(math.log(16))
    assert_allclose(node, 0.25)
    assert_allclose(edge, 1 / 16)


def test_partition_matches_enumeration():
    rng = np.random.default_rng(0)
    for n in range(1, 6):
        for _ in range(5):
            lat = random_lattice(rng, n)
            assert lat.log_z == pytest.approx(brute_log_z(lat), rel=1e-12, abs=1e-12)


def test_forward_backward_consistency():
    rng = np.random.default_rng(1)
    for n in range(1, 8):
        lat = random_lattice(rng, n, scale=5.0)
        log_z, node, edge = forward_backward(lat)
        assert lat.log_z_backward == pytest.approx(log_z, rel=1e-12)
        assert_allclose(node.sum(axis=1), 1.0, rtol=1e-10)
        if n > 1:
            assert_allclose(edge.sum(axis=(1, 2)), 1.0, rtol=1e-10)
            assert_allclose(edge.sum(axis=2), node[:-1], rtol=1e-9, atol=1e-12)
            assert_allclose(edge.sum(axis=1), node[1:], rtol=1e-9, atol=1e-12)


def test_marginals_match_enumeration():
    rng = np.random.default_rng(2)
    lat = random_lattice(rng, 3)
    _, node, _ = forward_backward(lat)
    weights = np.zeros((3, 4))
    for p in itertools.product(range(4), repeat=3):
        w = math.exp(lat.path_score(p) - lat.log_z)
        for t, y in enumerate(p):
            weights[t, y] += w
    assert_allclose(node, weights, rtol=1e-10)


def test_large_scores_stay_finite():
    lat = Lattice(np.full((30, 4), 700.0), np.zeros(4), np.full((4, 4), 300.0))
    log_z, node, edge = forward_backward(lat)
    assert np.isfinite(log_z) and np.all(np.isfinite(node)) and np.all(np.isfinite(edge))


def test_viterbi_over_lattice_matches_enumeration():
    rng = np.random.default_rng(3)
    from cmlid.decoding import viterbi_path

    for n in range(1, 6):
        lat = random_lattice(rng, n)
        assert viterbi_path(lat.start, lat.trans, lat.state) == brute_force_path(lat.start, lat.trans, lat.state)


# -- objective ---------------------------------------------------------------------


def zero_model(sentences, config=WORD_AND_HISTORY, l2=0.0):
    from cmlid.crf import build_feature_index

    return CRFModel.zeros(build_feature_index(Corpus(sentences), config), config, l2)


def test_zero_weight_gradient_by_hand():
    s = sent(("nenu", "TE"), ("exams", "EN"))
    model = zero_model([s])
    nll, grad = nll_and_gradient(model, [s])
    assert nll == pytest.approx(math.log(16))
    g = model.with_flat(grad)
    # each observation fires at one position with marginal 1/4
    w_nenu = g.state_weights[model.index.get("w0=nenu")]
    assert_allclose(w_nenu, [0.25 - 1, 0.25, 0.25, 0.25])
    assert_allclose(g.start, [0.25 - 1, 0.25, 0.25, 0.25])
    expected_trans = np.full((4, 4), 1 / 16)
    expected_trans[TE.index, EN.index] -= 1
    assert_allclose(g.trans, expected_trans)


def test_finite_difference_gradient(sample_corpus):
    sentences = list(sample_corpus)[:6]
    config = CrfFeatureConfig()
    model = zero_model(sentences, config, l2=0.5)
    rng = np.random.default_rng(4)
    w = rng.normal(0, 0.3, model.n_params)
    model = model.with_flat(w)
    _, grad = nll_and_gradient(model, sentences)
    h = 1e-5
    for j in rng.choice(model.n_params, 25, replace=False).tolist() + list(range(model.n_params - 20, model.n_params)):
        wp, wm = w.copy(), w.copy()
        wp[j] += h
        wm[j] -= h
        fd = (nll_and_gradient(model.with_flat(wp), sentences)[0] - nll_and_gradient(model.with_flat(wm), sentences)[0]) / (2 * h)
        assert abs(fd - grad[j]) <= 1e-4 * max(1.0, abs(fd), abs(grad[j])), j


def test_gradient_ignores_history_when_template_off():
    config = CrfFeatureConfig(**{**OFF, "current": True})
    s = sent(("a", "TE"), ("b", "EN"))
    model = zero_model([s], config)
    _, grad = nll_and_gradient(model, [s])
    assert_allclose(grad[model.state_weights.size:], 0.0)


def test_objective_requires_labels():
    s = sent(("a", None))
    with pytest.raises(UnlabeledToken):
        nll_and_gradient(zero_model([s]), [s])


# -- training ------------------------------------------------------------------------------


TOY = [
    sent(("nenu", "TE"), ("ninna", "TE"), ("movie", "EN"), ("chusa", "TE")),
    sent(("Ravi", "NE"), ("college", "EN"), ("ki", "TE"), ("vellaadu", "TE")),
    sent(("super", "EN"), ("ga", "TE"), ("undi", "TE"), (":)", "UNIV")),
    sent(("exam", "EN"), ("ayyaka", "TE"), ("call", "EN"), ("chey", "TE")),
]


def test_training_history_is_monotone():
    model = train_crf(Corpus(TOY), max_iters=30)
    h = np.array(model.history)
    assert len(h) >= 2
    assert np.all(np.diff(h) < 0)


def test_weakly_regularized_toy_is_fit_exactly():
    tagger = CRFTagger.train(Corpus(TOY), l2=1e-3)
    for s in TOY:
        assert tagger.tag(s) == s.labels


def test_heavy_regularization_shrinks_weights():
    model = train_crf(Corpus(TOY), l2=1e6, max_iters=50)
    assert np.linalg.norm(model.flat()) < 1e-2


def test_zero_model_decodes_first_label_and_univ():
    model = zero_model(TOY)
    s = sent(("ela", "TE"), ("http://t.co", "TE"), ("unnav", "TE"))
    assert decode_crf(model, s) == [TE, UNIV, TE]


def test_decode_is_argmax_over_paths():
    model = train_crf(Corpus(TOY), max_iters=20)
    for s in TOY:
        lat = build_lattice(model, s)
        best, _ = brute_force_path(lat.start, lat.trans, lat.state)
        decoded = decode_crf(model, s)
        expected = [UNIV if s[i].surface == ":)" else list(LangLabel)[y] for i, y in enumerate(best)]
        assert decoded == expected


def test_unknown_features_are_ignored():
    model = train_crf(Corpus(TOY), max_iters=10)
    assert len(decode_crf(model, sent(("zzzqqq", None), ("wwwxx", None)))) == 2


def test_training_errors():
    with pytest.raises(EmptyCorpus):
        train_crf(Corpus([]))
    with pytest.raises(ValueError):
        train_crf(Corpus(TOY), l2=-1)


def test_model_rejects_nonfinite_weights():
    index = FeatureIndex(["w0=a"]).freeze()
    with pytest.raises(NumericalError):
        CRFModel(index, np.array([[np.nan, 0, 0, 0]]), np.zeros(4), np.zeros((4, 4)))
