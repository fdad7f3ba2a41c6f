"""Complementary entity recognition.

Verb and entity lexicons are bootstrapped from unlabeled review sentences,
starting from seed verbs; questions are then matched with the extraction
tier of patterns anchored on the verb lexicon.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Collection, Iterable, Mapping

from .corpus_io import DependencyGraph, QAPair, ReviewSentence
from .dep_pattern import (ANY, EXTRACTION, HIGH_PRECISION, NOMINAL, DepPattern,
                          EntityMention, chunk_noun_phrase, match_pattern, resolve_overlaps)

logger = logging.getLogger(__name__)

VERBS = "VERBS"
ENTITIES = "ENTITIES"
SEED = "seed"
LEARNED = "learned"
DEFAULT_SEEDS = ("work", "fit")
DEFAULT_STOP_VERBS = frozenset({"be", "have", "do", "get", "use"})


def normalize_surface(text: str) -> str:
    return " ".join(text.split()).casefold()


@dataclass
class LexiconEntry:
    support_count: int
    origin: str
    iteration_added: int


@dataclass
class _Lexicon:
    entries: dict[str, LexiconEntry] = field(default_factory=dict)

    def __contains__(self, key):
        return key in self.entries

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def keys(self) -> frozenset[str]:
        return frozenset(self.entries)

    def dumps(self) -> str:
        rows = sorted(self.entries.items(), key=lambda kv: (kv[1].iteration_added, kv[0]))
        return "".join(f"{k}\t{e.support_count}\t{e.origin}\t{e.iteration_added}\n" for k, e in rows)

    @classmethod
    def loads(cls, text: str):
        entries = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            cols = line.split("\t")
            if len(cols) != 4:
                raise ValueError(f"lexicon line {lineno}: expected 4 tab-separated columns")
            key, support, origin, iteration = cols
            entries[key] = LexiconEntry(int(support), origin, int(iteration))
        return cls(entries)


class VerbLexicon(_Lexicon):
    """Verb lemma -> support, origin (seed/learned) and the iteration it was added."""

    @property
    def lemmas(self) -> frozenset[str]:
        return self.keys

    @property
    def learned(self) -> frozenset[str]:
        return frozenset(k for k, e in self.entries.items() if e.origin == LEARNED)


class CandidateEntityLexicon(_Lexicon):
    """Case-folded entity surface -> support."""


@dataclass(frozen=True)
class BootstrapParams:
    max_iterations: int = 5
    min_entity_support: int = 3
    min_verb_support: int = 3
    stop_verbs: frozenset[str] = DEFAULT_STOP_VERBS

    def __post_init__(self):
        for name in ("max_iterations", "min_entity_support", "min_verb_support"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")


def _captured_mention(m) -> EntityMention | None:
    if m.graph.token(m.captured_head_index).coarse_pos not in NOMINAL:
        return None
    return chunk_noun_phrase(m.graph, m.captured_head_index)


def count_entities(graphs: Iterable[DependencyGraph], patterns: list[DepPattern],
                   verbs: Collection[str], entities: Collection[str] = ()) -> Counter:
    """Number of sentences in which each entity surface is captured."""
    counts: Counter = Counter()
    lexicons = {VERBS: verbs, ENTITIES: entities}
    for g in graphs:
        found = set()
        for p in patterns:
            for m in match_pattern(p, g, lexicons):
                mention = _captured_mention(m)
                if mention is not None:
                    found.add(normalize_surface(mention.surface))
        counts.update(found)
    return counts


def count_verbs(graphs: Iterable[DependencyGraph], patterns: list[DepPattern],
                entities: Collection[str], stop_verbs: Collection[str] = DEFAULT_STOP_VERBS) -> Counter:
    """Number of sentences in which each verb lemma anchors a path to a known entity."""
    counts: Counter = Counter()
    lexicons = {VERBS: ANY, ENTITIES: entities}
    for g in graphs:
        found = set()
        for p in patterns:
            for m in match_pattern(p, g, lexicons):
                anchor = g.token(m.anchor_token_index)
                lemma = anchor.lemma.casefold()
                if anchor.coarse_pos != "VERB" or lemma in stop_verbs:
                    continue
                mention = _captured_mention(m)
                if mention is not None and normalize_surface(mention.surface) in entities:
                    found.add(lemma)
        counts.update(found)
    return counts


def bootstrap(reviews: list[ReviewSentence], seeds: Iterable[str], patterns: list[DepPattern],
              params: BootstrapParams | None = None) -> tuple[VerbLexicon, CandidateEntityLexicon]:
    """Alternately grow the entity and verb lexicons until nothing new is added.

    Each iteration first harvests entities captured by high-precision patterns
    anchored on the current verbs, then learns verbs that anchor any pattern
    whose capture is a known entity. Support is counted in distinct sentences.
    """
    params = params or BootstrapParams()
    seeds = sorted({s.casefold() for s in seeds})
    if not seeds:
        raise ValueError("bootstrap needs at least one seed verb")
    hp = [p for p in patterns if p.tier == HIGH_PRECISION]
    if not hp:
        raise ValueError("bootstrap needs at least one high-precision pattern")

    verbs = VerbLexicon({s: LexiconEntry(0, SEED, 0) for s in seeds})
    entities = CandidateEntityLexicon()
    graphs = [r.graph for r in reviews]

    for iteration in range(1, params.max_iterations + 1):
        added = 0
        entity_counts = count_entities(graphs, hp, verbs.lemmas, entities.keys)
        for surface, n in sorted(entity_counts.items()):
            if surface in entities:
                entities.entries[surface].support_count = max(entities.entries[surface].support_count, n)
            elif n >= params.min_entity_support:
                entities.entries[surface] = LexiconEntry(n, LEARNED, iteration)
                added += 1

        verb_counts = count_verbs(graphs, patterns, entities.keys, params.stop_verbs)
        for lemma, n in sorted(verb_counts.items()):
            if lemma in verbs:
                verbs.entries[lemma].support_count = max(verbs.entries[lemma].support_count, n)
            elif n >= params.min_verb_support:
                verbs.entries[lemma] = LexiconEntry(n, LEARNED, iteration)
                added += 1
        logger.info("bootstrap iteration %d: %d verbs, %d entities", iteration, len(verbs), len(entities))
        if not added:
            break
    return verbs, entities


@dataclass(frozen=True)
class QuestionExtraction:
    qa_id: str
    mentions: tuple[str, ...]
    pattern_ids: Mapping[str, tuple[str, ...]] = field(default_factory=dict, compare=False)


def extract_from_question(qa: QAPair, verbs: VerbLexicon | Collection[str],
                          patterns: list[DepPattern],
                          extra_lexicons: Mapping[str, Collection[str]] | None = None) -> QuestionExtraction:
    """Apply extraction-tier patterns to every question sentence and merge
    the chunked captures into one deduplicated prediction."""
    lemmas = verbs.lemmas if isinstance(verbs, VerbLexicon) else frozenset(verbs)
    lexicons = {VERBS: lemmas, **(extra_lexicons or {})}
    extraction = [p for p in patterns if p.tier == EXTRACTION]
    surfaces: dict[str, str] = {}
    sources: dict[str, set[str]] = {}
    for g in qa.question_sentences:
        found: dict[tuple[int, int], tuple[EntityMention, set[str]]] = {}
        for p in extraction:
            for m in match_pattern(p, g, lexicons):
                mention = _captured_mention(m)
                if mention is None:
                    continue
                entry = found.setdefault(mention.span, (mention, set()))
                entry[1].add(p.pattern_id)
        kept = resolve_overlaps([mention for mention, _ in found.values()])
        for mention in kept:
            key = normalize_surface(mention.surface)
            surfaces.setdefault(key, mention.surface)
            sources.setdefault(key, set()).update(found[mention.span][1])
    return QuestionExtraction(qa.qa_id, tuple(surfaces.values()),
                              {surfaces[k]: tuple(sorted(v)) for k, v in sources.items()})
