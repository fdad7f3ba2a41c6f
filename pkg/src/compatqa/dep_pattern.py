"""Dependency-path patterns: a small line-oriented DSL, its matcher, and the
POS-regex noun-phrase chunker used to expand captured heads into mentions.

Pattern syntax, one pattern per line (``#`` starts a comment)::

    <id> <tier>: <anchor> (<edge> <node>)+

``tier`` is ``hp``/``high_precision`` or ``ex``/``extraction``. A node is
``POS[lemmas]`` where ``POS`` is ``*`` or ``A|B`` and the optional bracket
holds ``|``-separated lemmas or ``$NAME`` lexicon references. Exactly one
node is wrapped in ``CAPTURE(...)``. An edge is ``>rel`` (to a dependent)
or ``<rel`` (to the head); ``rel`` is ``*``, a label, a ``|``-separated
label set, or a prefix wildcard such as ``nmod:*``. An edge prefixed with
``&`` is a side condition: it must be satisfiable from the current token
but the walk does not move. Example::

    H1 hp: VERB[$VERBS] &>nsubj|dobj *[it|this] >nmod:with CAPTURE(NOUN|PROPN)
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from typing import Collection, Mapping

from .corpus_io import DependencyGraph

HIGH_PRECISION = "high_precision"
EXTRACTION = "extraction"
_TIERS = {"hp": HIGH_PRECISION, HIGH_PRECISION: HIGH_PRECISION,
          "ex": EXTRACTION, EXTRACTION: EXTRACTION}

NOMINAL = frozenset({"NOUN", "PROPN"})


class PatternError(ValueError):
    pass


class _Anything:
    """A lexicon that contains every lemma."""

    def __contains__(self, item):
        return True

    def __repr__(self):
        return "ANY"


ANY = _Anything()


@dataclass(frozen=True)
class TokenConstraint:
    pos: frozenset[str] | None = None
    lemmas: frozenset[str] = frozenset()
    lexicons: tuple[str, ...] = ()

    @property
    def is_wildcard(self) -> bool:
        return self.pos is None and not self.lemmas and not self.lexicons

    def accepts(self, token, lexicons: Mapping[str, Collection[str]]) -> bool:
        if self.pos is not None and token.coarse_pos not in self.pos:
            return False
        if not self.lemmas and not self.lexicons:
            return True
        lemma = token.lemma.casefold()
        return lemma in self.lemmas or any(lemma in lexicons[name] for name in self.lexicons)


@dataclass(frozen=True)
class PatternStep:
    direction: str  # "down" (to a dependent) or "up" (to the head)
    deprels: tuple[str, ...] | None
    node: TokenConstraint
    capture: bool = False
    branch: bool = False

    def deprel_ok(self, label: str) -> bool:
        return self.deprels is None or any(_label_matches(p, label) for p in self.deprels)


def _label_matches(pattern: str, label: str) -> bool:
    if pattern.endswith(":*"):
        base = pattern[:-2]
        return label == base or label.startswith(base + ":")
    return pattern == label


@dataclass(frozen=True)
class DepPattern:
    pattern_id: str
    tier: str
    anchor: TokenConstraint
    steps: tuple[PatternStep, ...]
    capture_index: int

    def lexicon_names(self) -> set[str]:
        names = set(self.anchor.lexicons)
        for s in self.steps:
            names.update(s.node.lexicons)
        return names


@dataclass(frozen=True)
class PatternMatch:
    pattern_id: str
    anchor_token_index: int
    captured_head_index: int
    path: tuple[int, ...]
    graph: DependencyGraph


@dataclass(frozen=True)
class EntityMention:
    head_index: int
    span: tuple[int, int]  # inclusive token indices
    surface: str

    def __len__(self):
        return self.span[1] - self.span[0] + 1


# ---------------------------------------------------------------- parsing

_LINE_RE = re.compile(r"^\s*(\S+)\s+(\S+?)\s*:(.*)$")
_EDGE_RE = re.compile(r"^(&?)([<>])(\S+)$")
_NODE_RE = re.compile(r"^([A-Za-z_*|]*)(?:\[([^\]]*)\])?$")


def _parse_node(text: str, lineno: int, col: int) -> tuple[TokenConstraint, bool]:
    capture = False
    if text.startswith("CAPTURE(") and text.endswith(")"):
        capture = True
        text = text[len("CAPTURE("):-1]
    elif text.startswith("CAPTURE"):
        raise PatternError(f"line {lineno}, column {col}: malformed CAPTURE(...)")
    m = _NODE_RE.match(text)
    if not m:
        raise PatternError(f"line {lineno}, column {col}: bad token constraint {text!r}")
    pos_part, lemma_part = m.group(1), m.group(2)
    pos = None
    if pos_part and pos_part != "*":
        items = pos_part.split("|")
        if not all(items):
            raise PatternError(f"line {lineno}, column {col}: empty POS alternative")
        pos = frozenset(items)
    lemmas, lexicons = set(), []
    if lemma_part is not None:
        for item in lemma_part.split("|"):
            if not item:
                raise PatternError(f"line {lineno}, column {col}: empty lemma alternative")
            if item.startswith("$"):
                if len(item) == 1:
                    raise PatternError(f"line {lineno}, column {col}: empty lexicon name")
                lexicons.append(item[1:])
            else:
                lemmas.add(item.casefold())
    return TokenConstraint(pos, frozenset(lemmas), tuple(lexicons)), capture


def parse_pattern_file(text: str) -> list[DepPattern]:
    patterns = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        m = _LINE_RE.match(line)
        if not m:
            raise PatternError(f"line {lineno}, column 1: expected '<id> <tier>: ...'")
        pid, tier_name, body = m.groups()
        if tier_name not in _TIERS:
            raise PatternError(f"line {lineno}, column {m.start(2) + 1}: unknown tier {tier_name!r}")
        if pid in seen:
            raise PatternError(f"line {lineno}, column 1: duplicate pattern id {pid!r}")
        parts = [(t.group(), m.start(3) + t.start() + 1) for t in re.finditer(r"\S+", body)]
        if not parts:
            raise PatternError(f"line {lineno}, column {len(line)}: missing anchor")
        anchor, anchor_capture = _parse_node(parts[0][0], lineno, parts[0][1])
        if anchor_capture:
            raise PatternError(f"line {lineno}, column {parts[0][1]}: the anchor cannot be captured")
        rest = parts[1:]
        if not rest:
            raise PatternError(f"line {lineno}, column {len(line)}: pattern needs at least one step")
        if len(rest) % 2:
            raise PatternError(f"line {lineno}, column {rest[-1][1]}: edge without a token constraint")
        steps = []
        capture_index = None
        for (edge, ecol), (node, ncol) in zip(rest[::2], rest[1::2]):
            em = _EDGE_RE.match(edge)
            if not em:
                raise PatternError(f"line {lineno}, column {ecol}: bad edge {edge!r}")
            branch, arrow, rels = em.groups()
            deprels = None if rels == "*" else tuple(rels.split("|"))
            constraint, capture = _parse_node(node, lineno, ncol)
            if capture:
                if capture_index is not None:
                    raise PatternError(f"line {lineno}, column {ncol}: more than one CAPTURE")
                if branch:
                    raise PatternError(f"line {lineno}, column {ncol}: a side condition cannot capture")
                capture_index = len(steps)
            elif deprels is None and constraint.is_wildcard:
                raise PatternError(f"line {lineno}, column {ecol}: step has no constraint")
            steps.append(PatternStep("down" if arrow == ">" else "up", deprels, constraint,
                                     capture, bool(branch)))
        if capture_index is None:
            raise PatternError(f"line {lineno}, column {len(line)}: invalid capture index (no CAPTURE step)")
        seen.add(pid)
        patterns.append(DepPattern(pid, _TIERS[tier_name], anchor, tuple(steps), capture_index))
    return patterns


def default_pattern_text() -> str:
    return resources.files("compatqa").joinpath("data/default.pat").read_text(encoding="utf-8")


def default_patterns() -> list[DepPattern]:
    return parse_pattern_file(default_pattern_text())


# ---------------------------------------------------------------- matching

def _neighbours(step: PatternStep, graph: DependencyGraph, index: int) -> list[int]:
    if step.direction == "down":
        return [t.index for t in graph.tokens if t.head == index and step.deprel_ok(t.deprel)]
    tok = graph.token(index)
    if tok.head == 0 or not step.deprel_ok(tok.deprel):
        return []
    return [tok.head]


def match_pattern(pattern: DepPattern, graph: DependencyGraph,
                  lexicons: Mapping[str, Collection[str]]) -> list[PatternMatch]:
    """All matches of ``pattern`` in ``graph``, one per (anchor, capture) pair.

    When several paths reach the same pair, the lexicographically smallest
    path is reported.
    """
    missing = pattern.lexicon_names() - set(lexicons)
    if missing:
        raise PatternError(f"pattern {pattern.pattern_id}: undefined lexicon ${sorted(missing)[0]}")
    steps = pattern.steps
    best: dict[tuple[int, int], tuple[int, ...]] = {}

    def walk(k: int, current: int, path: tuple[int, ...]):
        if k == len(steps):
            key = (path[0], path[1 + pattern.capture_index])
            if key not in best or path < best[key]:
                best[key] = path
            return
        step = steps[k]
        for nxt in _neighbours(step, graph, current):
            if step.node.accepts(graph.token(nxt), lexicons):
                walk(k + 1, current if step.branch else nxt, path + (nxt,))

    for tok in graph.tokens:
        if pattern.anchor.accepts(tok, lexicons):
            walk(0, tok.index, (tok.index,))
    return [PatternMatch(pattern.pattern_id, a, c, best[(a, c)], graph) for a, c in sorted(best)]


# ---------------------------------------------------------------- chunking

_TAG_CODES = {"DET": "D", "ADJ": "A", "NOUN": "N", "PROPN": "P", "NUM": "C"}
_NP_RE = re.compile(r"D?[ANPC]*[NP]C*")


def _tag_string(graph: DependencyGraph) -> str:
    return "".join(_TAG_CODES.get(t.coarse_pos, "x") for t in graph.tokens)


def chunk_noun_phrase(graph: DependencyGraph, head_index: int) -> EntityMention:
    """Expand a nominal head to the longest NP-regex span around it.

    The chunk regex over coarse tags is ``DET? (ADJ|NOUN|PROPN|NUM)*
    (NOUN|PROPN) NUM*``; a leading determiner is dropped from the mention.
    """
    head = graph.token(head_index)
    if head.coarse_pos not in NOMINAL:
        raise PatternError(f"token {head_index} ({head.form!r}) is not nominal")
    tags = _tag_string(graph)
    h = head_index - 1
    best = None
    for i in range(h, -1, -1):
        for j in range(len(tags), h, -1):
            if best is not None and j - i <= best[1] - best[0]:
                break
            if _NP_RE.fullmatch(tags, i, j):
                best = (i, j)
                break
    i, j = best
    if tags[i] == "D":
        i += 1
    surface = " ".join(t.form for t in graph.tokens[i:j])
    return EntityMention(head_index, (i + 1, j), surface)


def all_noun_phrases(graph: DependencyGraph) -> list[EntityMention]:
    """Every maximal NP chunk in the sentence, left to right."""
    mentions = []
    covered = set()
    for tok in graph.tokens:
        if tok.coarse_pos in NOMINAL and tok.index not in covered:
            m = chunk_noun_phrase(graph, tok.index)
            covered.update(range(m.span[0], m.span[1] + 1))
            mentions.append(m)
    return mentions


def resolve_overlaps(mentions: list[EntityMention]) -> list[EntityMention]:
    """Drop mentions overlapping a longer one (equal length: leftmost wins)."""
    kept: list[EntityMention] = []
    for m in sorted(mentions, key=lambda m: (-len(m), m.span[0])):
        if all(m.span[1] < k.span[0] or m.span[0] > k.span[1] for k in kept):
            kept.append(m)
    return sorted(kept, key=lambda m: m.span[0])
