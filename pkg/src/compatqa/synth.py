"""Templated synthetic corpora with gold labels and ready-made parses.

The generator writes the same formats as real ingestion: QA JSONL,
CoNLL-U for question sentences and reviews, and a JSONL pool of unlabeled
training answers. Parses come from the templates, so no parser is needed.
"""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .corpus_io import DependencyGraph, Token, serialize_conllu

BRANDS = ["Samsung", "Microsoft", "Apple", "HP", "Lenovo", "Asus", "Acer", "Dell",
          "Amazon", "Google", "Sony", "LG", "Nokia", "Motorola", "Huawei", "Toshiba"]
LINES = [("Galaxy", "Tab"), ("Surface", "Pro"), ("iPad", "Air"), ("Chromebook",), ("ThinkPad",),
         ("Kindle", "Fire"), ("Nexus",), ("Pixel",), ("Xperia",), ("ZenPad",), ("Inspiron",),
         ("Note",), ("Yoga", "Book"), ("MediaPad",), ("Lumia",), ("Envy",)]
MODEL_NUMBERS = ["2", "3", "4", "7", "8", "10", "10.0", "2017"]
GENERIC_ENTITIES = ("tablet", "phone", "laptop", "camera", "keyboard")

YES_SUBJECTS = ["it", "this one", "mine"]
YES_VERBS = ["works", "fits", "connects"]
YES_ADVERBS = ["great", "perfectly", "fine", "well", "flawlessly", "like a charm"]
YES_DEVICES = ["tablet", "phone", "laptop"]
NO_SUBJECTS = ["it", "this one", "mine"]
NO_VERBS = ["work", "fit", "connect"]
NO_TAILS = ["", "at all", "properly", "with my phone", "with my tablet"]
NEUTRAL_BODIES = ["I am unsure", "you should ask the seller", "depends on the model",
                  "check the manufacturer website", "good question , hard to say",
                  "cannot say for certain", "have not tried that combination",
                  "contact customer support about that", "hard to tell"]
NEUTRAL_PREFIXES = ["", "sorry ,", "honestly"]
NEUTRAL_SUFFIXES = ["", "maybe", "perhaps"]
FILLER_REVIEWS = [
    [("Great", "ADJ", "JJ", 2, "amod"), ("product", "NOUN", "NN", 0, "root"), (".", "PUNCT", ".", 2, "punct")],
    [("The", "DET", "DT", 2, "det"), ("price", "NOUN", "NN", 4, "nsubj"), ("is", "AUX", "VBZ", 4, "cop"),
     ("good", "ADJ", "JJ", 0, "root"), (".", "PUNCT", ".", 4, "punct")],
    [("I", "PRON", "PRP", 2, "nsubj"), ("love", "VERB", "VBP", 0, "root"), ("the", "DET", "DT", 4, "det"),
     ("color", "NOUN", "NN", 2, "dobj"), (".", "PUNCT", ".", 2, "punct")],
    [("Shipping", "NOUN", "NN", 2, "nsubj"), ("was", "AUX", "VBD", 0, "root"),
     ("fast", "ADV", "RB", 2, "advmod"), (".", "PUNCT", ".", 2, "punct")],
]
DISTRACTORS = ["how_long", "come_with", "sturdy"]

_IRREGULAR_LEMMA = {"is": "be", "does": "do", "will": "will", "was": "be"}


@dataclass(frozen=True)
class SynthSpec:
    seed: int = 1
    n_questions: int = 100
    fraction_explicit: float = 0.5
    fraction_neutral: float = 0.2
    fraction_yes: float = 0.7
    fraction_distractor: float = 0.1
    fraction_two_entity: float = 0.1
    fraction_two_sentence: float = 0.1
    n_train_answers: int = 1200
    n_entity_names: int = 60
    seed_verbs: tuple[str, ...] = ("work", "fit")
    planted_verbs: dict = field(default_factory=lambda: {"insert": 5, "hold": 5})
    decoy_verbs: dict = field(default_factory=lambda: {"shake": 2, "wiggle": 2})
    entity_support: int = 4
    n_filler_reviews: int = 100
    product_id: str = "synthetic-stand"
    category: str = "tablet stand"

    def __post_init__(self):
        for name in ("fraction_explicit", "fraction_neutral", "fraction_yes", "fraction_distractor",
                     "fraction_two_entity", "fraction_two_sentence"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        if self.fraction_explicit + self.fraction_neutral > 1.0 + 1e-12:
            raise ValueError("fraction_explicit + fraction_neutral must not exceed 1")
        if self.fraction_two_entity + self.fraction_two_sentence > 1.0 + 1e-12:
            raise ValueError("fraction_two_entity + fraction_two_sentence must not exceed 1")
        if self.n_questions < 0 or self.n_train_answers < 0 or self.n_entity_names < 1:
            raise ValueError("sizes must be non-negative and n_entity_names >= 1")
        if not self.seed_verbs:
            raise ValueError("at least one seed verb is required")
        if any(n < 0 for n in list(self.planted_verbs.values()) + list(self.decoy_verbs.values())):
            raise ValueError("planted supports must be non-negative")

    @property
    def fraction_implicit(self) -> float:
        return max(0.0, 1.0 - self.fraction_explicit - self.fraction_neutral)


@dataclass
class SynthCorpus:
    spec: SynthSpec
    qa_records: list[dict]
    question_graphs: list[DependencyGraph]
    review_graphs: list[DependencyGraph]
    train_records: list[dict]
    answer_kinds: dict[str, str]  # qa_id -> explicit | implicit | neutral

    def qa_jsonl(self) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.qa_records)

    def train_jsonl(self) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.train_records)

    def questions_conllu(self) -> str:
        return serialize_conllu(self.question_graphs)

    def reviews_conllu(self) -> str:
        return serialize_conllu(self.review_graphs)

    def write(self, out_dir) -> dict[str, Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        files = {
            "qa": ("qa.jsonl", self.qa_jsonl()),
            "questions": ("questions.conllu", self.questions_conllu()),
            "reviews": ("reviews.conllu", self.reviews_conllu()),
            "train": ("train_answers.jsonl", self.train_jsonl()),
            "spec": ("synth_spec.json", json.dumps(asdict(self.spec), indent=1, sort_keys=True) + "\n"),
        }
        paths = {}
        for key, (name, text) in files.items():
            path = out / name
            path.write_text(text, encoding="utf-8")
            paths[key] = path
        return paths


class _Sentence:
    def __init__(self):
        self.rows: list[list] = []

    def tok(self, form, upos, xpos, lemma=None) -> int:
        if lemma is None:
            lemma = form if upos == "PROPN" else _IRREGULAR_LEMMA.get(form.lower(), form.lower())
        self.rows.append([form, lemma, upos, xpos, 0, "root"])
        return len(self.rows)

    def attach(self, index, head, deprel):
        self.rows[index - 1][4] = head
        self.rows[index - 1][5] = deprel

    def np(self, entity, det=None) -> int:
        """Append an entity phrase; returns its head index (left unattached)."""
        det_index = None
        if det == "my":
            det_index = self.tok("my", "PRON", "PRP$")
        elif det is not None:
            det_index = self.tok(det, "DET", "DT")
        indices = [self.tok(form, upos, xpos) for form, upos, xpos in entity]
        head_pos = max(k for k, (_, upos, _) in enumerate(entity) if upos in ("NOUN", "PROPN"))
        head = indices[head_pos]
        for k, i in enumerate(indices):
            if i == head:
                continue
            upos = entity[k][1]
            rel = "nummod" if upos == "NUM" else "amod" if upos == "ADJ" else "compound"
            self.attach(i, head, rel)
        if det_index is not None:
            self.attach(det_index, head, "nmod:poss" if det == "my" else "det")
        return head

    def graph(self, **metadata) -> DependencyGraph:
        tokens = tuple(Token(i, f, l, u, h, d, x) for i, (f, l, u, x, h, d) in enumerate(self.rows, start=1))
        text = " ".join(t.form for t in tokens)
        return DependencyGraph(tokens, text, dict(metadata))


def _surface(entity) -> str:
    return " ".join(form for form, _, _ in entity)


def _third_person(verb: str) -> str:
    if verb.endswith(("s", "sh", "ch", "x")):
        return verb + "es"
    return verb + "s"


def _entity_names(rng: random.Random, n: int) -> list[tuple]:
    names = set()
    out = []
    attempts = 0
    while len(out) < n and attempts < 100 * n:
        attempts += 1
        brand = rng.choice(BRANDS)
        line = rng.choice(LINES)
        toks = []
        if rng.random() < 0.7:
            toks.append((brand, "PROPN", "NNP"))
        toks.extend((w, "PROPN", "NNP") for w in line)
        if rng.random() < 0.5:
            toks.append((rng.choice(MODEL_NUMBERS), "NUM", "CD"))
        if rng.random() < 0.1:
            toks = [(f.lower(), u, x) for f, u, x in toks]
        entity = tuple(toks)
        key = _surface(entity).casefold()
        if key not in names:
            names.add(key)
            out.append(entity)
    return out


def _generic(word: str) -> tuple:
    return ((word, "NOUN", "NN"),)


# ------------------------------------------------------------------ questions

def _q_verb_prep(entity, verb, prep, aux="Will", subject=None):
    s = _Sentence()
    a = s.tok(aux, "AUX", "MD" if aux == "Will" else "VBZ")
    if subject is None:
        it = s.tok("it", "PRON", "PRP")
    else:
        det = s.tok("this", "DET", "DT")
        it = s.tok(subject, "NOUN", "NN")
        s.attach(det, it, "det")
    v = s.tok(verb, "VERB", "VB", lemma=verb)
    p = s.tok(prep, "ADP", "IN")
    h = s.np(entity, None)
    q = s.tok("?", "PUNCT", ".")
    s.attach(a, v, "aux")
    s.attach(it, v, "nsubj")
    s.attach(p, h, "case")
    s.attach(h, v, f"nmod:{prep}")
    s.attach(q, v, "punct")
    return s


def _q_compatible(entity, det):
    s = _Sentence()
    cop = s.tok("Is", "AUX", "VBZ")
    this = s.tok("this", "PRON", "DT")
    adj = s.tok("compatible", "ADJ", "JJ")
    p = s.tok("with", "ADP", "IN")
    h = s.np(entity, det)
    q = s.tok("?", "PUNCT", ".")
    s.attach(cop, adj, "cop")
    s.attach(this, adj, "nsubj")
    s.attach(p, h, "case")
    s.attach(h, adj, "nmod:with")
    s.attach(q, adj, "punct")
    return s


def _q_dobj(entity, verb):
    s = _Sentence()
    a = s.tok("Will", "AUX", "MD")
    this = s.tok("this", "PRON", "DT")
    v = s.tok(verb, "VERB", "VB", lemma=verb)
    h = s.np(entity, "my")
    q = s.tok("?", "PUNCT", ".")
    s.attach(a, v, "aux")
    s.attach(this, v, "nsubj")
    s.attach(h, v, "dobj")
    s.attach(q, v, "punct")
    return s


def _q_intro():
    s = _Sentence()
    i = s.tok("I", "PRON", "PRP")
    just = s.tok("just", "ADV", "RB")
    v = s.tok("bought", "VERB", "VBD", lemma="buy")
    this = s.tok("this", "PRON", "DT")
    dot = s.tok(".", "PUNCT", ".")
    s.attach(i, v, "nsubj")
    s.attach(just, v, "advmod")
    s.attach(this, v, "dobj")
    s.attach(dot, v, "punct")
    return s


def _q_distractor(kind, rng):
    s = _Sentence()
    if kind == "how_long":
        how = s.tok("How", "ADV", "WRB")
        long_ = s.tok("long", "ADJ", "JJ")
        is_ = s.tok("is", "AUX", "VBZ")
        the = s.tok("the", "DET", "DT")
        n = s.tok(rng.choice(["cable", "cord", "warranty"]), "NOUN", "NN")
        q = s.tok("?", "PUNCT", ".")
        s.attach(how, long_, "advmod")
        s.attach(is_, long_, "cop")
        s.attach(the, n, "det")
        s.attach(n, long_, "nsubj")
        s.attach(q, long_, "punct")
    elif kind == "come_with":
        does = s.tok("Does", "AUX", "VBZ")
        the = s.tok("the", "DET", "DT")
        n = s.tok("stand", "NOUN", "NN")
        v = s.tok("come", "VERB", "VB")
        w = s.tok("with", "ADP", "IN")
        a = s.tok("a", "DET", "DT")
        o = s.tok(rng.choice(["charger", "manual", "case"]), "NOUN", "NN")
        q = s.tok("?", "PUNCT", ".")
        s.attach(does, v, "aux")
        s.attach(the, n, "det")
        s.attach(n, v, "nsubj")
        s.attach(w, o, "case")
        s.attach(a, o, "det")
        s.attach(o, v, "nmod:with")
        s.attach(q, v, "punct")
    else:
        is_ = s.tok("Is", "AUX", "VBZ")
        this = s.tok("this", "DET", "DT")
        n = s.tok("stand", "NOUN", "NN")
        adj = s.tok(rng.choice(["sturdy", "heavy", "adjustable"]), "ADJ", "JJ")
        q = s.tok("?", "PUNCT", ".")
        s.attach(is_, adj, "cop")
        s.attach(this, n, "det")
        s.attach(n, adj, "nsubj")
        s.attach(q, adj, "punct")
    return s


def _entity_question(rng, entity, verbs):
    """One question sentence mentioning ``entity``."""
    form = rng.random()
    if form < 0.3:
        return _q_verb_prep(entity, rng.choice(verbs), "with")
    if form < 0.45:
        return _q_verb_prep(entity, rng.choice(verbs), "with", subject=rng.choice(["stand", "holder", "mount"]))
    if form < 0.6:
        return _q_verb_prep(entity, rng.choice(verbs), "on", aux="Does")
    if form < 0.8:
        return _q_compatible(entity, rng.choice([None, "a", "my"]))
    return _q_dobj(entity, rng.choice(verbs))


# ------------------------------------------------------------------ answers

def _capitalize(s: str) -> str:
    return s[:1].upper() + s[1:]


def _yes_body(rng) -> str:
    if rng.random() < 0.6:
        return f"{rng.choice(YES_SUBJECTS)} {rng.choice(YES_VERBS)} {rng.choice(YES_ADVERBS)}"
    return f"{rng.choice(YES_VERBS)} {rng.choice(YES_ADVERBS)} with my {rng.choice(YES_DEVICES)}"


def _no_body(rng) -> str:
    aux = rng.choice(["does not", "will not", "did not"])
    tail = rng.choice(NO_TAILS)
    body = f"{rng.choice(NO_SUBJECTS)} {aux} {rng.choice(NO_VERBS)}"
    return f"{body} {tail}".strip()


def _neutral_body(rng) -> str:
    parts = [rng.choice(NEUTRAL_PREFIXES), rng.choice(NEUTRAL_BODIES), rng.choice(NEUTRAL_SUFFIXES)]
    return " ".join(p for p in parts if p)


def _answer(rng, spec: SynthSpec) -> tuple[str, str, str]:
    """Returns (text, kind, gold polarity)."""
    r = rng.random()
    if r < spec.fraction_neutral:
        return _capitalize(_neutral_body(rng)) + ".", "neutral", "neutral"
    polarity = "yes" if rng.random() < spec.fraction_yes else "no"
    body = _yes_body(rng) if polarity == "yes" else _no_body(rng)
    explicit_share = spec.fraction_explicit / max(1e-12, 1.0 - spec.fraction_neutral)
    if rng.random() < explicit_share:
        lead = "Yes" if polarity == "yes" else "No"
        if rng.random() < 0.1:
            return f"{lead}.", "explicit", polarity
        return f"{lead}, {body}.", "explicit", polarity
    return _capitalize(body) + ".", "implicit", polarity


# ------------------------------------------------------------------ reviews

def _review_with(entity_word, verb):
    s = _Sentence()
    subj = s.tok("It", "PRON", "PRP", lemma="it")
    v = s.tok(_third_person(verb), "VERB", "VBZ", lemma=verb)
    w = s.tok("with", "ADP", "IN")
    h = s.np(_generic(entity_word), "my")
    dot = s.tok(".", "PUNCT", ".")
    s.attach(subj, v, "nsubj")
    s.attach(w, h, "case")
    s.attach(h, v, "nmod:with")
    s.attach(dot, v, "punct")
    return s


def _review_dobj(entity_word, verb):
    s = _Sentence()
    subj = s.tok("It", "PRON", "PRP", lemma="it")
    v = s.tok(_third_person(verb), "VERB", "VBZ", lemma=verb)
    h = s.np(_generic(entity_word), "my")
    dot = s.tok(".", "PUNCT", ".")
    s.attach(subj, v, "nsubj")
    s.attach(h, v, "dobj")
    s.attach(dot, v, "punct")
    return s


def _filler(rows):
    s = _Sentence()
    for form, upos, xpos, _, _ in rows:
        s.tok(form, upos, xpos)
    for i, (_, _, _, head, rel) in enumerate(rows, start=1):
        s.attach(i, head, rel)
    return s


def generate_synthetic_corpus(spec: SynthSpec) -> SynthCorpus:
    rng = random.Random(spec.seed)
    names = _entity_names(rng, spec.n_entity_names)
    question_verbs = list(spec.seed_verbs) + sorted(spec.planted_verbs)

    qa_records, question_graphs, kinds = [], [], {}
    for n in range(spec.n_questions):
        qa_id = f"q{n:05d}"
        sentences, gold_entities = [], []
        r = rng.random()
        if r < spec.fraction_distractor:
            sentences.append(_q_distractor(rng.choice(DISTRACTORS), rng))
        else:
            shape = rng.random()
            first = rng.choice(names)
            if shape < spec.fraction_two_entity:
                second = rng.choice([e for e in names if e != first] or names)
                sentences += [_entity_question(rng, first, question_verbs),
                              _entity_question(rng, second, question_verbs)]
                gold_entities += [_surface(first), _surface(second)]
            elif shape < spec.fraction_two_entity + spec.fraction_two_sentence:
                sentences += [_q_intro(), _entity_question(rng, first, question_verbs)]
                gold_entities.append(_surface(first))
            else:
                sentences.append(_entity_question(rng, first, question_verbs))
                gold_entities.append(_surface(first))
        graphs = [s.graph(sent_id=f"{qa_id}:{k}") for k, s in enumerate(sentences, start=1)]
        question_graphs += graphs
        text, kind, polarity = _answer(rng, spec)
        kinds[qa_id] = kind
        qa_records.append({
            "qa_id": qa_id,
            "product_id": spec.product_id,
            "category": spec.category,
            "question": " ".join(g.sentence_text for g in graphs),
            "n_question_sentences": len(graphs),
            "answers": [text],
            "gold": {"entities": gold_entities, "polarity": polarity},
        })

    train_records = []
    for n in range(spec.n_train_answers):
        text, _, _ = _answer(rng, spec)
        train_records.append({"qa_id": f"t{n:05d}", "product_id": spec.product_id,
                              "category": spec.category, "answers": [text], "gold": None})

    review_sentences = []
    for k, word in enumerate(GENERIC_ENTITIES):
        for j in range(spec.entity_support):
            verb = spec.seed_verbs[(k + j) % len(spec.seed_verbs)]
            review_sentences.append(_review_with(word, verb))
    for verbs in (spec.planted_verbs, spec.decoy_verbs):
        for verb, support in sorted(verbs.items()):
            for j in range(support):
                review_sentences.append(_review_dobj(GENERIC_ENTITIES[j % len(GENERIC_ENTITIES)], verb))
    for j in range(spec.n_filler_reviews):
        review_sentences.append(_filler(FILLER_REVIEWS[j % len(FILLER_REVIEWS)]))
    rng.shuffle(review_sentences)
    review_graphs = [s.graph(review_id=f"r{n:05d}:1") for n, s in enumerate(review_sentences)]

    return SynthCorpus(spec, qa_records, question_graphs, review_graphs, train_records, kinds)
