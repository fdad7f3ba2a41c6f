"""Evaluation protocols and the two in-scope baselines.

CER is scored per question. A prediction equal to the gold set (after
case-folding and whitespace normalisation) is a true positive. Any other
non-empty prediction is a false positive, and a gold-bearing question that
is not a true positive is a false negative, so a wrong non-empty prediction
on a gold-bearing question counts as both.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .answer_classify import AnswerClassifier, detect_explicit_polarity
from .cer import VerbLexicon, extract_from_question, normalize_surface
from .corpus_io import Gold, QAPair, _render_table
from .dep_pattern import DepPattern, all_noun_phrases
from .labels import Polarity
from .pipeline import CompatibilityRecord, run_pipeline, select_polarity


def _ratio(num: int, den: int) -> Fraction:
    return Fraction(num, den) if den else Fraction(0)


@dataclass(frozen=True)
class PRF:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    @property
    def precision(self) -> Fraction:
        return _ratio(self.tp, self.tp + self.fp)

    @property
    def recall(self) -> Fraction:
        return _ratio(self.tp, self.tp + self.fn)

    @property
    def f1(self) -> Fraction:
        return harmonic_f1(self.precision, self.recall)

    def __add__(self, other: "PRF") -> "PRF":
        return PRF(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)

    def to_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn,
                **{k: _fraction_dict(getattr(self, k)) for k in ("precision", "recall", "f1")}}


def harmonic_f1(precision, recall):
    if precision + recall == 0:
        return type(precision + recall)(0)
    return 2 * precision * recall / (precision + recall)


def _fraction_dict(x: Fraction) -> dict:
    return {"exact": f"{x.numerator}/{x.denominator}", "rounded": round(float(x), 3)}


def _norm_set(items: Iterable[str]) -> frozenset[str]:
    return frozenset(normalize_surface(s) for s in items)


def _check_keys(predictions: Mapping, gold: Mapping):
    if set(predictions) != set(gold):
        missing = sorted(set(gold) - set(predictions))
        extra = sorted(set(predictions) - set(gold))
        raise ValueError(f"qa_id mismatch: missing predictions for {missing[:5]}, unknown ids {extra[:5]}")


def eval_cer(predictions: Mapping[str, Iterable[str]], gold: Mapping[str, Iterable[str]]) -> PRF:
    _check_keys(predictions, gold)
    tp = fp = fn = 0
    for qa_id in gold:
        pred, ref = _norm_set(predictions[qa_id]), _norm_set(gold[qa_id])
        if ref and pred == ref:
            tp += 1
            continue
        if pred and pred != ref:
            fp += 1
        if ref:
            fn += 1
    return PRF(tp, fp, fn)


def _gold_bearing(gold: Mapping[str, Gold]) -> list[str]:
    return [qa_id for qa_id, g in gold.items() if g.entities]


def eval_answers(predictions: Mapping[str, Polarity], gold: Mapping[str, Gold]) -> Fraction:
    """3-class accuracy over questions that have gold entities."""
    ids = _gold_bearing(gold)
    if not ids:
        raise ValueError("no questions with gold entities to evaluate")
    missing = [i for i in ids if i not in predictions]
    if missing:
        raise ValueError(f"no answer prediction for {missing[:5]}")
    return Fraction(sum(predictions[i] == gold[i].polarity for i in ids), len(ids))


def eval_overall(records: Iterable[CompatibilityRecord], gold: Mapping[str, Gold]) -> Fraction:
    """A question is correct when both its entity set and its label are right."""
    ids = _gold_bearing(gold)
    if not ids:
        raise ValueError("no questions with gold entities to evaluate")
    entities: dict[str, set[str]] = defaultdict(set)
    polarities: dict[str, set[Polarity]] = defaultdict(set)
    for r in records:
        entities[r.evidence.qa_id].add(normalize_surface(r.entity_surface))
        polarities[r.evidence.qa_id].add(r.evidence.polarity)
    correct = 0
    for i in ids:
        if entities.get(i) == set(_norm_set(gold[i].entities)) and polarities[i] == {gold[i].polarity}:
            correct += 1
    return Fraction(correct, len(ids))


def baseline_np_chunker(corpus: Sequence[QAPair]) -> dict[str, set[str]]:
    """Every maximal noun phrase in every question sentence."""
    out = {}
    for qa in corpus:
        found: dict[str, str] = {}
        for g in qa.question_sentences:
            for m in all_noun_phrases(g):
                found.setdefault(normalize_surface(m.surface), m.surface)
        out[qa.qa_id] = set(found.values())
    return out


def baseline_yesno(corpus: Sequence[QAPair], answer_policy: str = "first") -> dict[str, Polarity]:
    def rule(answer):
        return detect_explicit_polarity(answer) or Polarity.NEUTRAL

    return {qa.qa_id: select_polarity(qa.answers, rule, answer_policy)[0] for qa in corpus}


def cascade_answers(corpus: Sequence[QAPair], classifier: AnswerClassifier,
                    answer_policy: str = "first") -> dict[str, Polarity]:
    return {qa.qa_id: select_polarity(qa.answers, classifier.classify, answer_policy)[0] for qa in corpus}


def gold_of(corpus: Sequence[QAPair]) -> dict[str, Gold]:
    missing = [qa.qa_id for qa in corpus if qa.gold is None]
    if missing:
        raise ValueError(f"missing gold annotation for {missing[:5]}")
    return {qa.qa_id: qa.gold for qa in corpus}


@dataclass
class ProductEval:
    cer: PRF
    np_chunker: PRF
    answer_accuracy: Fraction
    yesno_accuracy: Fraction
    overall_accuracy: Fraction


@dataclass
class EvalReport:
    products: dict[str, ProductEval]
    config: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "products": {
                pid: {
                    "cer": e.cer.to_dict(),
                    "np_chunker": e.np_chunker.to_dict(),
                    "answer_accuracy": _fraction_dict(e.answer_accuracy),
                    "yesno_accuracy": _fraction_dict(e.yesno_accuracy),
                    "overall_accuracy": _fraction_dict(e.overall_accuracy),
                }
                for pid, e in sorted(self.products.items())
            },
            "config": self.config,
            "notes": self.notes,
        }

    def cer_table(self) -> str:
        header = ["Product", "NP P", "NP R", "NP F1", "CER P", "CER R", "CER F1"]
        body = [[pid] + [f"{float(v):.3f}" for v in (e.np_chunker.precision, e.np_chunker.recall, e.np_chunker.f1,
                                                     e.cer.precision, e.cer.recall, e.cer.f1)]
                for pid, e in sorted(self.products.items())]
        return _render_table(header, body)

    def answer_table(self) -> str:
        header = ["Product", "Yes/No", "PU SVM", "Overall Results"]
        body = [[pid] + [f"{float(v):.3f}" for v in (e.yesno_accuracy, e.answer_accuracy, e.overall_accuracy)]
                for pid, e in sorted(self.products.items())]
        return _render_table(header, body)


def evaluate_corpus(corpus: Sequence[QAPair], verbs: VerbLexicon, patterns: list[DepPattern],
                    classifier: AnswerClassifier, answer_policy: str = "first",
                    config: dict | None = None) -> EvalReport:
    by_product: dict[str, list[QAPair]] = defaultdict(list)
    for qa in corpus:
        by_product[qa.product_id].append(qa)
    products = {}
    for pid, qas in sorted(by_product.items()):
        gold = gold_of(qas)
        gold_entities = {i: g.entities for i, g in gold.items()}
        predictions = {qa.qa_id: extract_from_question(qa, verbs, patterns).mentions for qa in qas}
        records = run_pipeline(qas, verbs, patterns, classifier, answer_policy)
        products[pid] = ProductEval(
            cer=eval_cer(predictions, gold_entities),
            np_chunker=eval_cer(baseline_np_chunker(qas), gold_entities),
            answer_accuracy=eval_answers(cascade_answers(qas, classifier, answer_policy), gold),
            yesno_accuracy=eval_answers(baseline_yesno(qas, answer_policy), gold),
            overall_accuracy=eval_overall(records, gold),
        )
    notes = ["overall accuracy counts a question correct only if both its entity set and its label are right",
             "a wrong non-empty entity prediction on a question with gold entities is both a false positive "
             "and a false negative"]
    return EvalReport(products, dict(config or {}), notes)
