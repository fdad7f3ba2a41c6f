import json
import random
import warnings

import numpy as np
import pytest

from compatqa.answer_classify import (FORMAT_VERSION, AnswerClassifier, DistantTrainingSet, FeatureSpace,
                                      LinearHyperparams, ModelFormatError, PUParams, SparseVector,
                                      build_distant_training_set, classify_answer, detect_explicit_polarity,
                                      dumps_classifier, feature_strings, featurize, loads_classifier,
                                      train_answer_classifier, train_binary_yesno, train_linear, train_pu)
from compatqa.labels import CompatLabel, Polarity

from pu_fixture import pu_answers


@pytest.mark.parametrize("answer, expected", [
    ("Yes, it works.", Polarity.YES),
    ("It works.", None),
    ("Yesterday I tried it", None),
    ("NO!!", Polarity.NO),
    ("", None),
    ("   ...  ", None),
])
def test_detect_explicit(answer, expected):
    assert detect_explicit_polarity(answer) == expected


def test_polarity_label_bijection():
    assert {p.label for p in Polarity} == set(CompatLabel)
    assert all(p.label.polarity is p for p in Polarity)


def test_bigrams_with_boundaries():
    assert set(feature_strings("it works well")) == {"<s> it", "it works", "works well", "well </s>"}
    assert feature_strings("") == []
    assert set(feature_strings("it works", unigrams=True)) >= {"it", "works"}


def test_strip_flag_matches_plain_answer():
    space = FeatureSpace()
    a = featurize("Yes, it works.", space, strip_leading_polarity=True)
    b = featurize("It works.", space)
    assert a == b and len(a) == 3


def test_frozen_space_drops_unknown():
    space = FeatureSpace()
    featurize("it works", space)
    space.freeze()
    n = len(space)
    x = featurize("it works fine", space)
    assert len(space) == n and len(x) == 2
    assert space.add("brand new") is None


def test_sparse_vector_invariants():
    with pytest.raises(ValueError, match="increasing"):
        SparseVector((2, 1), (1.0, 1.0))
    with pytest.raises(ValueError, match="finite"):
        SparseVector((1,), (float("nan"),))


def test_distant_set_three_answers():
    ts = build_distant_training_set(["Yes, it works.", "It works.", "I am not sure."], FeatureSpace())
    assert [p for _, p in ts.positives] == [Polarity.YES]
    assert len(ts.unlabeled) == 2


def test_distant_set_sizes_6000():
    answers = ["Yes, it fits."] * 3000 + ["No, it does not."] * 3000 + ["Hard to say."] * 6000
    ts = build_distant_training_set(answers, FeatureSpace())
    assert (len(ts.positives), len(ts.unlabeled)) == (6000, 6000)
    empty = build_distant_training_set([], FeatureSpace())
    assert empty.positives == [] and empty.unlabeled == []


def test_two_separable_points():
    m = train_linear([(SparseVector((0,), (1.0,)), 1), (SparseVector((1,), (1.0,)), -1)], 2)
    assert m.score(SparseVector((0,), (1.0,))) > 0 > m.score(SparseVector((1,), (1.0,)))


def test_single_class_is_an_error():
    with pytest.raises(ValueError, match="both classes"):
        train_linear([(SparseVector((0,), (1.0,)), 1)], 1)
    with pytest.raises(ValueError, match=r"\+1 or -1"):
        train_linear([(SparseVector((0,), (1.0,)), 2)], 1)


def separable_set(seed, n=200, n_features=40):
    """Each point carries one marker feature (0 for +1, 1 for -1) plus noise
    features drawn from a shared pool, so w = (1, -1, 0, ...) separates it."""
    rng = random.Random(seed)
    out = []
    for k in range(n):
        y = 1 if k % 2 == 0 else -1
        noise = rng.sample(range(2, n_features), 3)
        out.append((SparseVector(tuple(sorted([0 if y == 1 else 1] + noise)), (1.0,) * 4), y))
    return out


def test_separable_set_training_accuracy():
    data = separable_set(0)
    w = np.zeros(40)
    w[0], w[1] = 1.0, -1.0
    assert all(y * sum(w[i] for i in x.indices) > 0 for x, y in data)  # the set is separable
    m = train_linear(data, 40)
    assert all((m.score(x) > 0) == (y == 1) for x, y in data)


def test_training_is_bitwise_deterministic():
    data = separable_set(1)
    a, b = train_linear(data, 40), train_linear(data, 40)
    assert a.weights.tobytes() == b.weights.tobytes() and a.bias == b.bias
    c = train_linear(data, 40, LinearHyperparams(seed=9))
    assert c.weights.tobytes() != a.weights.tobytes()


def test_averaging_matches_dense_reference():
    data = separable_set(2, n=60, n_features=12)
    hp = LinearHyperparams(epochs=4, regularization=0.3, seed=5)
    m = train_linear(data, 12, hp)
    n = len(data)
    n_pos = sum(y == 1 for _, y in data)
    cw = {1: n / (2 * n_pos), -1: n / (2 * (n - n_pos))}
    w, b, t = np.zeros(12), 0.0, 0
    total, bias_total, count = np.zeros(12), 0.0, 0
    rng = np.random.default_rng(5)
    for _ in range(4):
        for k in rng.permutation(n).tolist():
            x, y = data[k]
            eta = hp.learning_rate / (1 + hp.learning_rate * hp.regularization * t)
            t += 1
            dense = np.zeros(12)
            dense[list(x.indices)] = 1.0
            margin = y * (w @ dense + b)
            w *= 1 - eta * hp.regularization
            if margin < 1:
                w += eta * y * cw[y] * dense
                b += eta * y * cw[y]
            if t > n:
                total += w
                bias_total += b
                count += 1
    assert np.allclose(m.weights, total / count, atol=1e-12)
    assert m.bias == pytest.approx(bias_total / count, abs=1e-12)


def _pu_data(seed):
    answers, kinds = pu_answers(seed)
    space = FeatureSpace()
    ts = build_distant_training_set(answers, space)
    space.freeze()
    unlabeled_kinds = [k for k in kinds if k != "explicit"]
    return ts, space, unlabeled_kinds


@pytest.mark.parametrize("seed", range(10))
def test_pu_fixture_exact_separation(seed):
    ts, space, kinds = _pu_data(seed)
    pu = train_pu(ts, len(space), PUParams(seed=seed, linear=LinearHyperparams(seed=seed)))
    reliable = pu.diagnostics["reliable_negatives"]
    assert reliable and all(kinds[j] == "neutral" for j in reliable)
    for x, kind in zip(ts.unlabeled, kinds):
        assert pu.is_polar(x) == (kind == "polar")


def test_pu_negative_history_monotone_and_deterministic():
    ts, space, _ = _pu_data(0)
    a = train_pu(ts, len(space))
    b = train_pu(ts, len(space))
    hist = a.diagnostics["negative_history"]
    assert all(set(p) <= set(q) for p, q in zip(hist, hist[1:]))
    assert a.diagnostics == b.diagnostics
    assert a.model.weights.tobytes() == b.model.weights.tobytes()


def test_pu_preconditions():
    ts, space, _ = _pu_data(0)
    with pytest.raises(ValueError, match="spy_fraction"):
        train_pu(ts, len(space), PUParams(spy_fraction=0.0))
    small = DistantTrainingSet(ts.positives[:19], ts.unlabeled)
    with pytest.raises(ValueError, match="at least 20"):
        train_pu(small, len(space))


def test_pu_degenerate_warns():
    # unlabeled answers share nothing with the positives, and there are no
    # other unlabeled answers, so step 2 turns every unlabeled item negative
    answers = ["Yes, it works great."] * 30 + ["No, it does not."] * 30 + ["Not sure."] * 25
    space = FeatureSpace()
    ts = build_distant_training_set(answers, space)
    space.freeze()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        pu = train_pu(ts, len(space))
    assert pu.diagnostics["degenerate"]
    assert any(issubclass(w.category, RuntimeWarning) for w in caught)


def test_binary_yesno():
    ts, space, _ = _pu_data(3)
    m = train_binary_yesno(ts, len(space))
    assert m.score(featurize("It works.", space)) > 0
    assert m.score(featurize("It does not work.", space)) < 0
    only_yes = DistantTrainingSet([p for p in ts.positives if p[1] is Polarity.YES], ts.unlabeled)
    with pytest.raises(ValueError, match="both yes and no"):
        train_binary_yesno(only_yes, len(space))


@pytest.fixture(scope="module")
def fixture_classifier():
    answers, _ = pu_answers(4)
    return train_answer_classifier(answers)


def test_cascade_examples(fixture_classifier):
    clf = fixture_classifier
    assert clf.classify("No.") is Polarity.NO
    assert clf.classify("Not sure.") is Polarity.NEUTRAL
    assert clf.classify("It works.") is Polarity.YES
    assert clf.classify("It does not work.") is Polarity.NO
    assert clf.classify("zzz qqq") is Polarity.NEUTRAL  # no known bigram


def test_cascade_needs_frozen_space(fixture_classifier):
    clf = fixture_classifier
    with pytest.raises(ValueError, match="frozen"):
        classify_answer("It works.", clf.pu, clf.binary, FeatureSpace())


def test_model_round_trip(fixture_classifier):
    text = dumps_classifier(fixture_classifier)
    back = loads_classifier(text)
    assert dumps_classifier(back) == text
    assert back.pu.model.weights.tobytes() == fixture_classifier.pu.model.weights.tobytes()
    for a in ["It works great.", "Hard to say maybe.", "Yes", "It fits."]:
        assert back.classify(a) is fixture_classifier.classify(a)


def test_model_version_mismatch(fixture_classifier):
    doc = json.loads(dumps_classifier(fixture_classifier))
    doc["version"] = FORMAT_VERSION + 1
    with pytest.raises(ModelFormatError, match="version"):
        loads_classifier(json.dumps(doc))
    with pytest.raises(ModelFormatError, match="not valid JSON"):
        loads_classifier("{")
    doc["version"] = FORMAT_VERSION
    doc["binary"]["weights"] = doc["binary"]["weights"][:-1]
    with pytest.raises(ModelFormatError, match="entries"):
        loads_classifier(json.dumps(doc))
