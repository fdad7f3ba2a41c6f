import random

import pytest

from compatqa.cer import (LEARNED, SEED, BootstrapParams, VerbLexicon, bootstrap, count_verbs,
                          extract_from_question)
from compatqa.corpus_io import QAPair, ReviewSentence, load_review_corpus
from compatqa.dep_pattern import default_patterns, parse_pattern_file

from graphs import compatible_with, graph, will_it_work_with

PATTERNS = default_patterns()


def it_verbs_my(verb, noun):
    """'It <verb>s my <noun> .' with the noun as direct object."""
    return graph([("It", "it", "PRON", 2, "nsubj"), (verb + "s", verb, "VERB", 0, "root"),
                  ("my", "my", "PRON", 4, "nmod:poss"), (noun, noun, "NOUN", 2, "dobj"),
                  (".", ".", "PUNCT", 2, "punct")])


def it_works_with_my(verb, noun):
    return graph([("It", "it", "PRON", 2, "nsubj"), (verb + "s", verb, "VERB", 0, "root"),
                  ("with", "with", "ADP", 5, "case"), ("my", "my", "PRON", 5, "nmod:poss"),
                  (noun, noun, "NOUN", 2, "nmod:with"), (".", ".", "PUNCT", 2, "punct")])


def reviews(graphs):
    return [ReviewSentence(f"r{i}", "stand", g) for i, g in enumerate(graphs)]


def hold_corpus(n_hold=3, n_work=3):
    return reviews([it_works_with_my("work", "tablet")] * n_work + [it_verbs_my("hold", "tablet")] * n_hold)


def test_hold_is_learned_from_tablet():
    verbs, entities = bootstrap(hold_corpus(), ["work", "fit"], PATTERNS)
    assert "tablet" in entities and entities.entries["tablet"].support_count == 3
    assert "hold" in verbs.learned
    e = verbs.entries["hold"]
    assert (e.support_count, e.origin, e.iteration_added) == (3, LEARNED, 1)
    assert verbs.entries["work"].origin == SEED


def test_support_threshold_is_inclusive():
    verbs, _ = bootstrap(hold_corpus(n_hold=2), ["work"], PATTERNS)
    assert "hold" not in verbs
    verbs, _ = bootstrap(hold_corpus(n_hold=2), ["work"], PATTERNS, BootstrapParams(min_verb_support=2))
    assert "hold" in verbs


def test_entity_below_threshold_not_added():
    _, entities = bootstrap(hold_corpus(n_work=2), ["work"], PATTERNS)
    assert len(entities) == 0


def test_stop_verbs_never_learned():
    rs = hold_corpus() + reviews([it_verbs_my("have", "tablet")] * 5)
    verbs, _ = bootstrap(rs, ["work"], PATTERNS)
    assert "have" not in verbs


def test_bootstrap_errors():
    with pytest.raises(ValueError, match="seed"):
        bootstrap(hold_corpus(), [], PATTERNS)
    only_ex = [p for p in PATTERNS if p.tier == "extraction"]
    with pytest.raises(ValueError, match="high-precision"):
        bootstrap(hold_corpus(), ["work"], only_ex)
    with pytest.raises(ValueError, match="max_iterations"):
        BootstrapParams(max_iterations=0)


def test_empty_reviews_give_seed_only_lexicon():
    verbs, entities = bootstrap([], ["Work", "fit"], PATTERNS)
    assert verbs.lemmas == {"work", "fit"} and not verbs.learned and len(entities) == 0


def synth_reviews(corpus):
    return load_review_corpus(corpus.reviews_conllu(), category="stand")


def test_planted_verb_counts_match_recount(synth_small):
    rs = synth_reviews(synth_small)
    verbs, entities = bootstrap(rs, ["work", "fit"], PATTERNS)
    spec = synth_small.spec
    for verb, n in spec.planted_verbs.items():
        assert verbs.entries[verb].support_count == n
    for verb in spec.decoy_verbs:
        assert verb not in verbs
    # independent recount: sentences whose root lemma is the verb and whose
    # object is one of the learned entities
    for verb in spec.planted_verbs:
        manual = sum(1 for r in rs if r.graph.token(r.graph.root).lemma == verb
                     and any(t.deprel == "dobj" and t.lemma in entities for t in r.graph.tokens))
        assert manual == verbs.entries[verb].support_count


def test_shuffled_reviews_same_lexicons(synth_small):
    rs = synth_reviews(synth_small)
    base = [lex.dumps() for lex in bootstrap(rs, ["work", "fit"], PATTERNS)]
    for seed in range(3):
        shuffled = rs[:]
        random.Random(seed).shuffle(shuffled)
        assert [lex.dumps() for lex in bootstrap(shuffled, ["fit", "work"], PATTERNS)] == base


def test_lexicons_grow_monotonically_with_iterations(synth_small):
    rs = synth_reviews(synth_small)
    prev_v, prev_e = frozenset(), frozenset()
    for k in range(1, 5):
        v, e = bootstrap(rs, ["work", "fit"], PATTERNS, BootstrapParams(max_iterations=k))
        assert prev_v <= v.keys and prev_e <= e.keys
        prev_v, prev_e = v.keys, e.keys


def test_lexicon_round_trip():
    verbs, entities = bootstrap(hold_corpus(), ["work", "fit"], PATTERNS)
    assert VerbLexicon.loads(verbs.dumps()) == verbs
    with pytest.raises(ValueError, match="4 tab-separated"):
        VerbLexicon.loads("work\t1\n")


def test_count_verbs_in_distinct_sentences():
    g = it_verbs_my("hold", "tablet")
    counts = count_verbs([g, g], PATTERNS, {"tablet"})
    assert counts["hold"] == 2


def qa(*sentences, qa_id="q1"):
    return QAPair(qa_id, "p", "c", tuple(sentences), ("Yes",))


def test_extract_nook():
    g = will_it_work_with([("a", "DET"), ("nook", "NOUN")])
    ex = extract_from_question(qa(g), {"work", "fit"}, PATTERNS)
    assert ex.mentions == ("nook",)
    assert "E1" in ex.pattern_ids["nook"]


def test_extract_unknown_verb_gives_nothing():
    g = will_it_work_with([("a", "DET"), ("nook", "NOUN")], verb="dance")
    assert extract_from_question(qa(g), {"work"}, PATTERNS).mentions == ()


def test_extract_compatible_adjective():
    g = compatible_with([("a", "DET"), ("HP", "PROPN"), ("Chromebook", "PROPN")])
    assert extract_from_question(qa(g), set(), PATTERNS).mentions == ("HP Chromebook",)


def test_surface_dedup_across_sentences_keeps_first():
    a = will_it_work_with([("Nook", "PROPN")])
    b = will_it_work_with([("nook", "NOUN")], verb="fit")
    c = will_it_work_with([("Kindle", "PROPN")])
    ex = extract_from_question(qa(a, b, c), {"work", "fit"}, PATTERNS)
    assert ex.mentions == ("Nook", "Kindle")


def test_extra_lexicons_are_passed_through():
    [p] = parse_pattern_file("Z ex: VERB[$BRANDVERBS] >nmod:with CAPTURE(NOUN)")
    g = will_it_work_with([("nook", "NOUN")], verb="pair")
    assert extract_from_question(qa(g), set(), [p], {"BRANDVERBS": {"pair"}}).mentions == ("nook",)
