"""Reading CoNLL-U parses and QA/review corpora, and corpus statistics.

Parses are produced by an external dependency parser and consumed here as
CoNLL-U. Question sentences are keyed by ``# sent_id = <qa_id>:<ordinal>``
and review sentences by ``# review_id = <id>:<ordinal>`` (ordinals 1-based).
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .labels import Polarity

logger = logging.getLogger(__name__)

# PTB tag -> UPOS, used only when a parser leaves UPOS empty.
_PTB_TO_UPOS = {
    "NN": "NOUN", "NNS": "NOUN", "NNP": "PROPN", "NNPS": "PROPN",
    "CD": "NUM", "DT": "DET", "PDT": "DET", "WDT": "DET",
    "JJ": "ADJ", "JJR": "ADJ", "JJS": "ADJ",
    "VB": "VERB", "VBD": "VERB", "VBG": "VERB", "VBN": "VERB", "VBP": "VERB", "VBZ": "VERB",
    "MD": "AUX", "PRP": "PRON", "PRP$": "PRON", "WP": "PRON", "WP$": "PRON",
    "RB": "ADV", "RBR": "ADV", "RBS": "ADV", "WRB": "ADV",
    "IN": "ADP", "TO": "PART", "RP": "ADP", "CC": "CCONJ", "UH": "INTJ",
    ".": "PUNCT", ",": "PUNCT", ":": "PUNCT", "``": "PUNCT", "''": "PUNCT",
}


class ConlluError(ValueError):
    """A malformed CoNLL-U sentence; ``line`` is 1-based in the input text."""

    def __init__(self, message: str, line: int):
        super().__init__(f"{message} at line {line}")
        self.line = line


class CorpusError(ValueError):
    """A bad record in a QA JSONL corpus."""

    def __init__(self, message: str, line: int | None = None, qa_id: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if qa_id is not None:
            where.append(f"qa_id {qa_id!r}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.line = line
        self.qa_id = qa_id


@dataclass(frozen=True)
class Token:
    index: int
    form: str
    lemma: str
    pos: str
    head: int
    deprel: str
    xpos: str = "_"

    @property
    def coarse_pos(self) -> str:
        if self.pos not in ("", "_"):
            return self.pos
        return _PTB_TO_UPOS.get(self.xpos, "X")


@dataclass(frozen=True)
class DependencyGraph:
    tokens: tuple[Token, ...]
    sentence_text: str = ""
    metadata: Mapping[str, str] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        errors = tree_errors([t.head for t in self.tokens])
        if errors:
            raise ValueError(errors[0][1])

    def __len__(self):
        return len(self.tokens)

    def token(self, index: int) -> Token:
        return self.tokens[index - 1]

    @property
    def root(self) -> int:
        return next(t.index for t in self.tokens if t.head == 0)

    def children(self, index: int) -> list[Token]:
        return [t for t in self.tokens if t.head == index]

    @property
    def sent_id(self) -> str | None:
        return self.metadata.get("sent_id")


def tree_errors(heads: list[int]) -> list[tuple[int, str]]:
    """Return ``(token_index, message)`` for every tree-invariant violation.

    ``heads[i]`` is the head of token ``i + 1``. An empty list is a valid
    (empty) graph only in the sense of having no tokens to check.
    """
    n = len(heads)
    errors = []
    for i, h in enumerate(heads, start=1):
        if h == i:
            errors.append((i, "self-loop"))
        elif h < 0 or h > n:
            errors.append((i, f"head {h} out of range"))
    if errors:
        return errors
    roots = [i for i, h in enumerate(heads, start=1) if h == 0]
    if n and len(roots) != 1:
        return [(roots[1] if roots else 1, f"expected exactly one root, found {len(roots)}")]
    for i in range(1, n + 1):
        seen = set()
        j = i
        while j != 0:
            if j in seen:
                return [(i, "cycle")]
            seen.add(j)
            j = heads[j - 1]
    return []


def _parse_block(lines: list[tuple[int, str]]) -> DependencyGraph:
    metadata: dict[str, str] = {}
    tokens = []
    token_lines = []
    for lineno, line in lines:
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, value = body.split("=", 1)
                metadata[key.strip()] = value.strip()
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise ConlluError(f"expected 10 columns, found {len(cols)}", lineno)
        if "-" in cols[0] or "." in cols[0]:
            continue  # multiword token or empty node
        try:
            index = int(cols[0])
        except ValueError:
            raise ConlluError(f"non-integer id {cols[0]!r}", lineno) from None
        if index != len(tokens) + 1:
            raise ConlluError(f"token id {index} out of sequence", lineno)
        try:
            head = int(cols[6])
        except ValueError:
            raise ConlluError(f"non-integer head {cols[6]!r}", lineno) from None
        tokens.append(Token(index, cols[1], cols[2], cols[3], head, cols[7], cols[4]))
        token_lines.append(lineno)
    if not tokens:
        raise ConlluError("sentence without tokens", lines[0][0])
    problems = tree_errors([t.head for t in tokens])
    if problems:
        index, message = problems[0]
        raise ConlluError(message, token_lines[index - 1])
    text = metadata.get("text") or " ".join(t.form for t in tokens)
    return DependencyGraph(tuple(tokens), text, metadata)


def parse_conllu(text: str, strict: bool = True, errors: list | None = None) -> list[DependencyGraph]:
    """Parse CoNLL-U text into one graph per sentence block.

    In lenient mode (``strict=False``) malformed sentences are skipped; each
    skip is logged and, if ``errors`` is given, the exception appended to it.
    """
    graphs = []
    block: list[tuple[int, str]] = []
    for lineno, line in enumerate(text.splitlines() + [""], start=1):
        line = line.rstrip("\r\n")
        if line.strip():
            block.append((lineno, line))
            continue
        if not block:
            continue
        if all(l.startswith("#") for _, l in block):
            block = []
            continue
        try:
            graphs.append(_parse_block(block))
        except ConlluError as exc:
            if strict:
                raise
            logger.warning("skipping sentence: %s", exc)
            if errors is not None:
                errors.append(exc)
        block = []
    return graphs


def serialize_conllu(graphs: Iterable[DependencyGraph]) -> str:
    out = []
    for g in graphs:
        for key, value in g.metadata.items():
            if key != "text":
                out.append(f"# {key} = {value}")
        out.append(f"# text = {g.sentence_text}")
        for t in g.tokens:
            out.append("\t".join([str(t.index), t.form, t.lemma, t.pos, t.xpos, "_",
                                  str(t.head), t.deprel, "_", "_"]))
        out.append("")
    return "\n".join(out) + ("\n" if out else "")


def index_parses(graphs: Iterable[DependencyGraph], key: str = "sent_id") -> dict[str, DependencyGraph]:
    """Map each graph's ``key`` comment (e.g. ``"q17:1"``) to the graph."""
    index = {}
    for g in graphs:
        k = g.metadata.get(key)
        if k is None:
            continue
        if k in index:
            raise CorpusError(f"duplicate {key} {k!r}")
        index[k] = g
    return index


@dataclass(frozen=True)
class Gold:
    entities: tuple[str, ...]
    polarity: Polarity


@dataclass(frozen=True)
class QAPair:
    qa_id: str
    product_id: str
    category: str
    question_sentences: tuple[DependencyGraph, ...]
    answers: tuple[str, ...]
    gold: Gold | None = None
    question: str = ""


@dataclass(frozen=True)
class ReviewSentence:
    review_id: str
    product_category: str
    graph: DependencyGraph


_REQUIRED_QA_KEYS = ("qa_id", "product_id", "category", "n_question_sentences", "answers")


def _qa_from_record(rec: dict, parses: Mapping[str, DependencyGraph], lineno: int) -> QAPair:
    for key in _REQUIRED_QA_KEYS:
        if key not in rec:
            raise CorpusError(f"missing required key {key!r}", lineno)
    qa_id = str(rec["qa_id"])
    answers = rec["answers"]
    if not isinstance(answers, list) or not answers:
        raise CorpusError("no answers", lineno, qa_id)
    n = int(rec["n_question_sentences"])
    if n < 1:
        raise CorpusError("no question sentences", lineno, qa_id)
    sentences = []
    for ordinal in range(1, n + 1):
        key = f"{qa_id}:{ordinal}"
        if key not in parses:
            raise CorpusError(f"no parse for sentence {key!r}", lineno, qa_id)
        sentences.append(parses[key])
    gold = None
    if rec.get("gold") is not None:
        g = rec["gold"]
        try:
            gold = Gold(tuple(g["entities"]), Polarity(g["polarity"]))
        except (KeyError, ValueError, TypeError) as exc:
            raise CorpusError(f"bad gold annotation: {exc}", lineno, qa_id) from None
    return QAPair(qa_id, str(rec["product_id"]), str(rec["category"]), tuple(sentences),
                  tuple(str(a) for a in answers), gold, str(rec.get("question", "")))


def load_qa_corpus(stream: Iterable[str], parses: Mapping[str, DependencyGraph],
                   strict: bool = True, errors: list | None = None) -> list[QAPair]:
    """Read QA JSONL, resolving question parses from ``parses`` by ``qa_id:ordinal``."""
    corpus = []
    for lineno, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"invalid JSON: {exc.msg}", lineno) from None
            corpus.append(_qa_from_record(rec, parses, lineno))
        except CorpusError as exc:
            if strict:
                raise
            logger.warning("skipping QA record: %s", exc)
            if errors is not None:
                errors.append(exc)
    return corpus


def read_answers(stream: Iterable[str]) -> list[str]:
    """All answer strings of a QA JSONL file, in order; parses are not needed."""
    answers = []
    for lineno, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        rec = json.loads(line)
        if "answers" not in rec:
            raise CorpusError("missing required key 'answers'", lineno)
        answers.extend(str(a) for a in rec["answers"])
    return answers


def load_review_corpus(stream, category: str = "", strict: bool = True,
                       errors: list | None = None) -> list[ReviewSentence]:
    text = stream if isinstance(stream, str) else stream.read()
    skipped: list = [] if errors is None else errors
    graphs = parse_conllu(text, strict=strict, errors=skipped)
    reviews = []
    for g in graphs:
        rid = g.metadata.get("review_id")
        if rid is None:
            exc = ConlluError("missing '# review_id' comment", 0)
            if strict:
                raise exc
            skipped.append(exc)
            continue
        reviews.append(ReviewSentence(rid.rsplit(":", 1)[0], category, g))
    return reviews


@dataclass(frozen=True)
class DatasetStats:
    n_questions: int
    n_question_sentences: int
    n_cp_mentions: int
    density: Fraction
    n_unique_cp: int
    n_pos: int
    n_neg: int
    n_neu: int

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d["density"] = f"{self.density.numerator}/{self.density.denominator}"
        d["density_2dp"] = round(float(self.density), 2)
        return d


def corpus_stats(corpus: list[QAPair]) -> DatasetStats:
    """Corpus statistics per product. Every mention counts, duplicates included."""
    n_sent = n_cp = 0
    counts = {Polarity.YES: 0, Polarity.NO: 0, Polarity.NEUTRAL: 0}
    unique = set()
    for qa in corpus:
        if qa.gold is None:
            raise CorpusError("missing gold annotation", qa_id=qa.qa_id)
        n_sent += len(qa.question_sentences)
        n_cp += len(qa.gold.entities)
        counts[qa.gold.polarity] += len(qa.gold.entities)
        unique.update(" ".join(e.split()).casefold() for e in qa.gold.entities)
    density = Fraction(n_cp, n_sent) if n_sent else Fraction(0)
    return DatasetStats(len(corpus), n_sent, n_cp, density, len(unique),
                        counts[Polarity.YES], counts[Polarity.NO], counts[Polarity.NEUTRAL])


def stats_table(rows: Mapping[str, DatasetStats]) -> str:
    header = ["Product", "Q", "QSent.", "CP", "Density", "Uniq. CP", "Pos.", "Neg.", "Neu."]
    body = [[name, s.n_questions, s.n_question_sentences, s.n_cp_mentions,
             f"{float(s.density):.2f}", s.n_unique_cp, s.n_pos, s.n_neg, s.n_neu]
            for name, s in rows.items()]
    return _render_table(header, body)


def _render_table(header, body) -> str:
    cells = [[str(c) for c in row] for row in [header] + body]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = [" | ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in cells]
    lines.insert(1, "-+-".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"
