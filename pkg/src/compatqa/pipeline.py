"""Two-stage pipeline: entity recognition on questions, then answer polarity
for questions that produced at least one entity."""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Collection, Sequence

from .answer_classify import AnswerClassifier
from .cer import QuestionExtraction, VerbLexicon, extract_from_question
from .corpus_io import QAPair
from .dep_pattern import DepPattern
from .labels import CompatLabel, Polarity

ANSWER_POLICIES = ("first", "vote")


@dataclass(frozen=True)
class Evidence:
    qa_id: str
    answer_index: int | None
    polarity: Polarity
    pattern_ids: tuple[str, ...] = ()


@dataclass(frozen=True)
class CompatibilityRecord:
    product_id: str
    entity_surface: str
    label: CompatLabel
    evidence: Evidence

    def __post_init__(self):
        if self.label is not self.evidence.polarity.label:
            raise ValueError(f"label {self.label.value} does not match polarity {self.evidence.polarity.value}")

    def to_dict(self) -> dict:
        return {
            "product_id": self.product_id,
            "entity": self.entity_surface,
            "label": self.label.value,
            "evidence": {
                "qa_id": self.evidence.qa_id,
                "answer_index": self.evidence.answer_index,
                "polarity": self.evidence.polarity.value,
                "pattern_ids": list(self.evidence.pattern_ids),
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CompatibilityRecord":
        ev = d["evidence"]
        return cls(d["product_id"], d["entity"], CompatLabel(d["label"]),
                   Evidence(ev["qa_id"], ev["answer_index"], Polarity(ev["polarity"]), tuple(ev["pattern_ids"])))


def select_polarity(answers: Sequence[str], classify: Callable[[str], Polarity],
                    policy: str = "first") -> tuple[Polarity, int | None]:
    """Polarity of a question's answers and the index of the deciding answer.

    ``first`` classifies only the first answer. ``vote`` takes the majority
    over all answers; a tie yields neutral with no deciding answer.
    """
    if policy == "first":
        return classify(answers[0]), 0
    if policy != "vote":
        raise ValueError(f"unknown answer policy {policy!r}")
    labels = [classify(a) for a in answers]
    ranked = Counter(labels).most_common()
    if len(ranked) > 1 and ranked[0][1] == ranked[1][1]:
        return Polarity.NEUTRAL, None
    winner = ranked[0][0]
    return winner, labels.index(winner)


def _records_for(qa: QAPair, extraction: QuestionExtraction, classifier: AnswerClassifier,
                 policy: str) -> list[CompatibilityRecord]:
    if not extraction.mentions:
        return []
    polarity, index = select_polarity(qa.answers, classifier.classify, policy)
    return [CompatibilityRecord(qa.product_id, surface, polarity.label,
                                Evidence(qa.qa_id, index, polarity, extraction.pattern_ids.get(surface, ())))
            for surface in extraction.mentions]


def run_pipeline(corpus: Sequence[QAPair], verbs: VerbLexicon | Collection[str], patterns: list[DepPattern],
                 classifier: AnswerClassifier, answer_policy: str = "first",
                 jobs: int = 1) -> list[CompatibilityRecord]:
    """One record per extracted entity, in corpus order."""
    if answer_policy not in ANSWER_POLICIES:
        raise ValueError(f"unknown answer policy {answer_policy!r}")

    def one(qa):
        return _records_for(qa, extract_from_question(qa, verbs, patterns), classifier, answer_policy)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(one, corpus))
    else:
        chunks = [one(qa) for qa in corpus]
    return [r for chunk in chunks for r in chunk]
