"""Answer polarity: distant labels, bigram features, a seeded linear SVM,
spy-based PU learning and the explicit/PU/binary cascade.

Answers starting with a literal "yes"/"no" are positives for PU learning
(and labelled examples for the yes/no classifier); the first word is
removed from their features. Everything else is unlabeled.
"""

from __future__ import annotations

import json
import math
import re
import warnings
from dataclasses import asdict, dataclass, field, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from .labels import Polarity

FORMAT_VERSION = 1
BOS, EOS = "<s>", "</s>"
EXPLICIT_WORDS: Mapping[str, Polarity] = {"yes": Polarity.YES, "no": Polarity.NO}

_EDGE_PUNCT = re.compile(r"^\W+|\W+$")


class ModelFormatError(ValueError):
    pass


def tokenize(text: str) -> list[str]:
    tokens = []
    for raw in text.split():
        tok = _EDGE_PUNCT.sub("", raw).casefold()
        if tok:
            tokens.append(tok)
    return tokens


def detect_explicit_polarity(answer: str, words: Mapping[str, Polarity] = EXPLICIT_WORDS) -> Polarity | None:
    tokens = tokenize(answer)
    if not tokens:
        return None
    return words.get(tokens[0])


class FeatureSpace:
    """Feature string -> dense id. A frozen space ignores unseen features."""

    def __init__(self, features: Iterable[str] = ()):
        self._ids: dict[str, int] = {}
        self.frozen = False
        for f in features:
            self.add(f)

    def add(self, feature: str) -> int | None:
        fid = self._ids.get(feature)
        if fid is None:
            if self.frozen:
                return None
            fid = self._ids[feature] = len(self._ids)
        return fid

    def get(self, feature: str) -> int | None:
        return self._ids.get(feature)

    def freeze(self) -> "FeatureSpace":
        self.frozen = True
        return self

    def features(self) -> list[str]:
        return list(self._ids)

    def __len__(self):
        return len(self._ids)

    def __contains__(self, feature):
        return feature in self._ids


@dataclass(frozen=True)
class SparseVector:
    indices: tuple[int, ...] = ()
    values: tuple[float, ...] = ()

    def __post_init__(self):
        if len(self.indices) != len(self.values):
            raise ValueError("indices and values differ in length")
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise ValueError("feature ids must be strictly increasing")
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError("weights must be finite")

    def __len__(self):
        return len(self.indices)


def feature_strings(answer: str, strip_leading_polarity: bool = False, unigrams: bool = False,
                    words: Mapping[str, Polarity] = EXPLICIT_WORDS) -> list[str]:
    tokens = tokenize(answer)
    if strip_leading_polarity and tokens and tokens[0] in words:
        tokens = tokens[1:]
    if not tokens:
        return []
    padded = [BOS] + tokens + [EOS]
    feats = [f"{a} {b}" for a, b in zip(padded, padded[1:])]
    if unigrams:
        feats += tokens
    return feats


def featurize(answer: str, space: FeatureSpace, strip_leading_polarity: bool = False,
              unigrams: bool = False, words: Mapping[str, Polarity] = EXPLICIT_WORDS) -> SparseVector:
    """Binary bigram features with sentence boundary markers.

    An unfrozen ``space`` grows; a frozen one drops unknown features.
    """
    ids = set()
    for f in feature_strings(answer, strip_leading_polarity, unigrams, words):
        fid = space.add(f)
        if fid is not None:
            ids.add(fid)
    indices = tuple(sorted(ids))
    return SparseVector(indices, (1.0,) * len(indices))


@dataclass
class DistantTrainingSet:
    positives: list[tuple[SparseVector, Polarity]] = field(default_factory=list)
    unlabeled: list[SparseVector] = field(default_factory=list)


def build_distant_training_set(answers: Iterable[str], space: FeatureSpace, unigrams: bool = False,
                               words: Mapping[str, Polarity] = EXPLICIT_WORDS) -> DistantTrainingSet:
    ts = DistantTrainingSet()
    for answer in answers:
        polarity = detect_explicit_polarity(answer, words)
        if polarity is None:
            ts.unlabeled.append(featurize(answer, space, False, unigrams, words))
        else:
            ts.positives.append((featurize(answer, space, True, unigrams, words), polarity))
    return ts


# ---------------------------------------------------------------- linear SVM

@dataclass(frozen=True)
class LinearHyperparams:
    epochs: int = 20
    learning_rate: float = 0.1
    regularization: float = 1e-4
    seed: int = 0
    balanced: bool = True  # reweight hinge terms so both classes weigh the same
    average: bool = True  # return the mean iterate after the first epoch


@dataclass
class LinearModel:
    weights: np.ndarray
    bias: float
    hyperparams: LinearHyperparams = field(default_factory=LinearHyperparams)
    objective: float = float("nan")

    def score(self, x: SparseVector) -> float:
        w = self.weights
        s = self.bias
        for i, v in zip(x.indices, x.values):
            s += w[i] * v
        return float(s)


def train_linear(examples: Sequence[tuple[SparseVector, int]], n_features: int,
                 hp: LinearHyperparams = LinearHyperparams()) -> LinearModel:
    """Hinge-loss linear classifier by seeded stochastic subgradient descent.

    Labels are +1/-1. Identical inputs and ``hp`` give bitwise-identical
    weights: the visiting order comes from ``hp.seed`` alone.
    """
    labels = {y for _, y in examples}
    if not labels <= {1, -1}:
        raise ValueError("labels must be +1 or -1")
    if len(labels) < 2:
        raise ValueError("training needs both classes")
    n = len(examples)
    n_pos = sum(1 for _, y in examples if y == 1)
    if hp.balanced:
        class_weight = {1: n / (2 * n_pos), -1: n / (2 * (n - n_pos))}
    else:
        class_weight = {1: 1.0, -1: 1.0}
    lam, lr = hp.regularization, hp.learning_rate
    xs = [(x.indices, x.values) for x, _ in examples]
    ys = [y for _, y in examples]

    # weights are scale * v so the L2 shrinkage costs O(1) per step. With
    # averaging, acc[i] + v[i] * (cum - mark[i]) is the running sum of w[i]
    # over the averaged steps, where cum is the running sum of scale.
    v = [0.0] * n_features
    acc = [0.0] * n_features
    mark = [0.0] * n_features
    cum = 0.0
    scale = 1.0
    bias = bias_sum = 0.0
    n_avg = 0
    avg_from = n if hp.average and hp.epochs > 1 else 0

    def flush(i):
        acc[i] += v[i] * (cum - mark[i])
        mark[i] = cum

    rng = np.random.default_rng(hp.seed)
    t = 0
    for _ in range(hp.epochs):
        for k in rng.permutation(n).tolist():
            idx, vals = xs[k]
            y = ys[k]
            eta = lr / (1.0 + lr * lam * t)
            t += 1
            dot = 0.0
            for i, val in zip(idx, vals):
                dot += v[i] * val
            margin = y * (scale * dot + bias)
            scale *= 1.0 - eta * lam
            if margin < 1.0:
                step = eta * y * class_weight[y]
                for i, val in zip(idx, vals):
                    flush(i)
                    v[i] += step * val / scale
                bias += step
            if scale < 1e-9:
                for i in range(n_features):
                    flush(i)
                    mark[i] = 0.0
                v = [vi * scale for vi in v]
                cum, scale = 0.0, 1.0
            if hp.average and t > avg_from:
                cum += scale
                bias_sum += bias
                n_avg += 1
    if hp.average and n_avg:
        for i in range(n_features):
            flush(i)
        weights = np.array([a / n_avg for a in acc], dtype=np.float64)
        bias = bias_sum / n_avg
    else:
        weights = np.array([vi * scale for vi in v], dtype=np.float64)
    model = LinearModel(weights, float(bias), hp)
    hinge = sum(class_weight[y] * max(0.0, 1.0 - y * model.score(x)) for x, y in examples) / n
    model.objective = float(0.5 * lam * float(weights @ weights) + hinge)
    return model


# ---------------------------------------------------------------- PU learning

@dataclass(frozen=True)
class PUParams:
    spy_fraction: float = 0.15
    noise_percentile: float = 5.0
    max_step2_iters: int = 10
    seed: int = 0
    linear: LinearHyperparams = field(default_factory=LinearHyperparams)


@dataclass
class PUModel:
    """Implicit yes/no (positive score) vs neutral (negative score)."""

    model: LinearModel
    threshold: float
    diagnostics: dict = field(default_factory=dict)

    def is_polar(self, x: SparseVector) -> bool:
        return self.model.score(x) >= 0.0


def _sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def train_pu(ts: DistantTrainingSet, n_features: int, params: PUParams = PUParams()) -> PUModel:
    """Two-step PU learning with the spy technique.

    Step 1 hides a seeded sample of positives (spies) among the unlabeled
    answers and trains positives against that mixture. The threshold is the
    ``noise_percentile``-th percentile of the spies' logistic scores;
    unlabeled answers below it are reliable negatives. Step 2 repeatedly
    trains the non-spy positives against the negatives and moves unlabeled
    answers scored negative into the negative set, until none move. The
    returned classifier is the last iterate that still recalls at least
    ``1 - noise_percentile/100`` of the held-out spies, else the first.
    """
    positives = [x for x, _ in ts.positives]
    unlabeled = list(ts.unlabeled)
    if len(positives) < 20 or len(unlabeled) < 20:
        raise ValueError("PU learning needs at least 20 positive and 20 unlabeled examples")
    if not 0.0 < params.spy_fraction < 1.0:
        raise ValueError("spy_fraction must lie strictly between 0 and 1")
    if not 0.0 <= params.noise_percentile < 100.0:
        raise ValueError("noise_percentile must lie in [0, 100)")
    if params.max_step2_iters < 1:
        raise ValueError("max_step2_iters must be >= 1")

    rng = np.random.default_rng(params.seed)
    n_spies = min(len(positives) - 1, max(1, round(params.spy_fraction * len(positives))))
    spies = sorted(rng.choice(len(positives), n_spies, replace=False).tolist())
    spy_set = set(spies)
    kept = [x for i, x in enumerate(positives) if i not in spy_set]
    spy_vecs = [positives[i] for i in spies]

    step1 = ([(x, 1) for x in kept] + [(x, -1) for x in spy_vecs] + [(x, -1) for x in unlabeled])
    hp1 = replace(params.linear, seed=params.linear.seed + 1)
    m1 = train_linear(step1, n_features, hp1)
    spy_probs = [_sigmoid(m1.score(x)) for x in spy_vecs]
    # "lower" picks an actual spy score, so at most noise_percentile% of the
    # spies fall strictly below the threshold (interpolation can exceed it)
    threshold = float(np.percentile(spy_probs, params.noise_percentile, method="lower"))
    negatives = {j for j, x in enumerate(unlabeled) if _sigmoid(m1.score(x)) < threshold}
    if not negatives:
        raise ValueError("step 1 found no reliable negatives; the unlabeled set looks all positive")
    reliable = sorted(negatives)

    remaining = set(range(len(unlabeled))) - negatives
    history = [sorted(negatives)]
    iterates = []
    hp2 = replace(params.linear, seed=params.linear.seed + 2)
    for _ in range(params.max_step2_iters):
        examples = [(x, 1) for x in kept] + [(unlabeled[j], -1) for j in sorted(negatives)]
        model = train_linear(examples, n_features, hp2)
        iterates.append(model)
        moved = {j for j in remaining if model.score(unlabeled[j]) < 0.0}
        if not moved:
            break
        negatives |= moved
        remaining -= moved
        history.append(sorted(negatives))

    spy_recall = [sum(m.score(x) >= 0.0 for x in spy_vecs) / len(spy_vecs) for m in iterates]
    target = 1.0 - params.noise_percentile / 100.0
    chosen = next((k for k in range(len(iterates) - 1, -1, -1) if spy_recall[k] >= target), 0)
    degenerate = len(negatives) == len(unlabeled)
    if degenerate:
        warnings.warn("PU learning labelled every unlabeled answer negative", RuntimeWarning)
    diagnostics = {
        "spies": spies,
        "reliable_negatives": reliable,
        "negative_history": history,
        "spy_recall": spy_recall,
        "chosen_iterate": chosen,
        "degenerate": degenerate,
        "step1_objective": m1.objective,
    }
    return PUModel(iterates[chosen], threshold, diagnostics)


def train_binary_yesno(ts: DistantTrainingSet, n_features: int,
                       hp: LinearHyperparams = LinearHyperparams()) -> LinearModel:
    labels = {p for _, p in ts.positives}
    if labels != {Polarity.YES, Polarity.NO}:
        raise ValueError("yes/no classifier needs both yes and no examples")
    examples = [(x, 1 if p is Polarity.YES else -1) for x, p in ts.positives]
    return train_linear(examples, n_features, hp)


def classify_answer(answer: str, pu: PUModel, binary: LinearModel, space: FeatureSpace,
                    unigrams: bool = False, words: Mapping[str, Polarity] = EXPLICIT_WORDS) -> Polarity:
    explicit = detect_explicit_polarity(answer, words)
    if explicit is not None:
        return explicit
    if not space.frozen:
        raise ValueError("classification needs a frozen feature space")
    x = featurize(answer, space, False, unigrams, words)
    if not len(x) or not pu.is_polar(x):
        return Polarity.NEUTRAL
    return Polarity.YES if binary.score(x) >= 0.0 else Polarity.NO


# ---------------------------------------------------------------- bundle + file format

@dataclass
class AnswerClassifier:
    space: FeatureSpace
    pu: PUModel
    binary: LinearModel
    unigrams: bool = False
    words: Mapping[str, Polarity] = field(default_factory=lambda: dict(EXPLICIT_WORDS))
    header: dict = field(default_factory=dict)

    def classify(self, answer: str) -> Polarity:
        return classify_answer(answer, self.pu, self.binary, self.space, self.unigrams, self.words)


def train_answer_classifier(answers: Iterable[str], pu_params: PUParams = PUParams(),
                            binary_hp: LinearHyperparams = LinearHyperparams(),
                            unigrams: bool = False,
                            words: Mapping[str, Polarity] = EXPLICIT_WORDS) -> AnswerClassifier:
    space = FeatureSpace()
    ts = build_distant_training_set(answers, space, unigrams, words)
    space.freeze()
    pu = train_pu(ts, len(space), pu_params)
    binary = train_binary_yesno(ts, len(space), binary_hp)
    header = {
        "n_positive": len(ts.positives),
        "n_unlabeled": len(ts.unlabeled),
        "pu_params": asdict(pu_params),
        "binary_hyperparams": asdict(binary_hp),
    }
    return AnswerClassifier(space, pu, binary, unigrams, dict(words), header)


def _model_to_dict(m: LinearModel) -> dict:
    return {"bias": m.bias, "objective": m.objective, "hyperparams": asdict(m.hyperparams),
            "weights": m.weights.tolist()}


def _model_from_dict(d: dict, n: int) -> LinearModel:
    weights = np.array(d["weights"], dtype=np.float64)
    if weights.shape != (n,):
        raise ModelFormatError(f"weight vector has {weights.shape[0]} entries, feature space has {n}")
    return LinearModel(weights, float(d["bias"]), LinearHyperparams(**d["hyperparams"]), float(d["objective"]))


def dumps_classifier(clf: AnswerClassifier) -> str:
    doc = {
        "format": "compatqa-answer-model",
        "version": FORMAT_VERSION,
        "header": clf.header,
        "flags": {"unigrams": clf.unigrams,
                  "explicit_words": {w: p.value for w, p in sorted(clf.words.items())}},
        "features": clf.space.features(),
        "pu": {"threshold": clf.pu.threshold, "diagnostics": clf.pu.diagnostics,
               "model": _model_to_dict(clf.pu.model)},
        "binary": _model_to_dict(clf.binary),
    }
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def loads_classifier(text: str) -> AnswerClassifier:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"model file is not valid JSON: {exc.msg}") from None
    if doc.get("format") != "compatqa-answer-model":
        raise ModelFormatError("not an answer model file")
    if doc.get("version") != FORMAT_VERSION:
        raise ModelFormatError(f"model format version {doc.get('version')} != {FORMAT_VERSION}")
    space = FeatureSpace(doc["features"]).freeze()
    n = len(space)
    pu = PUModel(_model_from_dict(doc["pu"]["model"], n), float(doc["pu"]["threshold"]),
                 doc["pu"]["diagnostics"])
    binary = _model_from_dict(doc["binary"], n)
    flags = doc["flags"]
    words = {w: Polarity(p) for w, p in flags["explicit_words"].items()}
    return AnswerClassifier(space, pu, binary, bool(flags["unigrams"]), words, doc["header"])
