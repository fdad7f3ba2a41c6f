import io
import json
from fractions import Fraction

import pytest

from compatqa.corpus_io import (ConlluError, CorpusError, Gold, QAPair, corpus_stats, index_parses,
                                load_qa_corpus, load_review_corpus, parse_conllu, read_answers,
                                serialize_conllu, stats_table)
from compatqa.labels import Polarity

from graphs import graph, will_it_work_with


def conllu_line(i, form, upos, head, rel):
    return "\t".join([str(i), form, form.lower(), upos, "_", "_", str(head), rel, "_", "_"])


TWO_TOKENS = "\n".join([conllu_line(1, "it", "PRON", 2, "nsubj"), conllu_line(2, "works", "VERB", 0, "root")]) + "\n"


def test_minimal_sentence():
    [g] = parse_conllu(TWO_TOKENS)
    assert g.root == 2
    assert g.token(1).head == 2 and g.token(1).deprel == "nsubj"
    assert [t.index for t in g.children(2)] == [1]


def test_empty_input():
    assert parse_conllu("") == []
    assert parse_conllu("\n\n# just a comment\n\n") == []


def test_self_loop_reports_line():
    text = "# sent_id = a\n" + conllu_line(1, "it", "PRON", 1, "nsubj") + "\n" + conllu_line(2, "works", "VERB", 0, "root") + "\n"
    with pytest.raises(ConlluError, match="self-loop at line 2"):
        parse_conllu(text)


@pytest.mark.parametrize("bad_line, message", [
    ("1\tit\tit\tPRON\t_\t_\t2\tnsubj", "expected 10 columns"),
    ("1\tit\tit\tPRON\t_\t_\tx\tnsubj\t_\t_", "non-integer head"),
    ("1\tit\tit\tPRON\t_\t_\t7\tnsubj\t_\t_", "out of range"),
])
def test_malformed_lines(bad_line, message):
    text = bad_line + "\n" + conllu_line(2, "works", "VERB", 0, "root") + "\n"
    with pytest.raises(ConlluError, match=message + ".*line 1"):
        parse_conllu(text)


def test_cycle_and_multiple_roots():
    cyc = "\n".join([conllu_line(1, "a", "X", 2, "dep"), conllu_line(2, "b", "X", 1, "dep"),
                     conllu_line(3, "c", "X", 0, "root")])
    with pytest.raises(ConlluError, match="cycle"):
        parse_conllu(cyc)
    two = "\n".join([conllu_line(1, "a", "X", 0, "root"), conllu_line(2, "b", "X", 0, "root")])
    with pytest.raises(ConlluError, match="exactly one root"):
        parse_conllu(two)


def test_multiword_and_empty_nodes_skipped():
    text = "\n".join([
        "1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_",
        conllu_line(1, "do", "AUX", 3, "aux"),
        conllu_line(2, "n't", "PART", 3, "advmod"),
        conllu_line(3, "work", "VERB", 0, "root"),
        "3.1\tx\tx\tX\t_\t_\t_\t_\t_\t_",
    ])
    [g] = parse_conllu(text)
    assert [t.form for t in g.tokens] == ["do", "n't", "work"]


def test_serialize_roundtrip():
    g = will_it_work_with([("a", "DET"), ("nook", "NOUN")], sent_id="q1:1")
    [back] = parse_conllu(serialize_conllu([g]))
    fields = lambda gr: [(t.form, t.lemma, t.pos, t.head, t.deprel) for t in gr.tokens]
    assert fields(back) == fields(g)
    assert back.sent_id == "q1:1"


def test_xpos_fallback_for_coarse_tag():
    text = "1\tSurface\tsurface\t_\tNNP\t_\t2\tcompound\t_\t_\n2\tPro\tpro\t_\tNNP\t_\t0\troot\t_\t_\n"
    [g] = parse_conllu(text)
    assert g.token(1).coarse_pos == "PROPN"


def _review_blocks(n_reviews, per_review, bad=None):
    blocks = []
    for r in range(n_reviews):
        for s in range(1, per_review + 1):
            head = 1 if (r, s) == bad else 2
            blocks.append(f"# review_id = r{r}:{s}\n" + conllu_line(1, "it", "PRON", head, "nsubj") + "\n"
                          + conllu_line(2, "works", "VERB", 0, "root") + "\n")
    return "\n".join(blocks)


def test_review_corpus_counts():
    reviews = load_review_corpus(io.StringIO(_review_blocks(3, 2)), category="stylus")
    assert len(reviews) == 6
    assert [r.review_id for r in reviews[:2]] == ["r0", "r0"]
    assert load_review_corpus(io.StringIO("")) == []


def test_review_corpus_lenient_skips_one():
    text = _review_blocks(5, 2, bad=(3, 1))
    with pytest.raises(ConlluError):
        load_review_corpus(text)
    errors = []
    reviews = load_review_corpus(text, strict=False, errors=errors)
    assert len(reviews) == 9
    assert len(errors) == 1 and "self-loop" in str(errors[0])


def _qa_line(qa_id, answers=("Yes.",), n=1, gold=None):
    return json.dumps({"qa_id": qa_id, "product_id": "p", "category": "stylus", "question": "q",
                       "n_question_sentences": n, "answers": list(answers), "gold": gold}) + "\n"


def _parses(ids, n=1):
    gs = [will_it_work_with([("nook", "NOUN")], sent_id=f"{i}:{k}") for i in ids for k in range(1, n + 1)]
    return index_parses(gs)


def test_load_qa_single_line():
    [qa] = load_qa_corpus(io.StringIO(_qa_line("q1")), _parses(["q1"]))
    assert len(qa.question_sentences) == 1 and qa.answers == ("Yes.",)
    assert qa.gold is None


def test_load_qa_errors():
    with pytest.raises(CorpusError, match="no answers"):
        load_qa_corpus(io.StringIO(_qa_line("q1", answers=())), _parses(["q1"]))
    with pytest.raises(CorpusError, match="no parse"):
        load_qa_corpus(io.StringIO(_qa_line("q1", n=2)), _parses(["q1"]))
    with pytest.raises(CorpusError, match="missing required key"):
        load_qa_corpus(io.StringIO('{"qa_id": "x"}\n'), {})
    errors = []
    lines = _qa_line("q1") + _qa_line("q2", answers=()) + _qa_line("q3")
    corpus = load_qa_corpus(io.StringIO(lines), _parses(["q1", "q2", "q3"]), strict=False, errors=errors)
    assert [qa.qa_id for qa in corpus] == ["q1", "q3"] and len(errors) == 1


def test_load_255_stylus_lines_in_order():
    ids = [f"s{i}" for i in range(255)]
    text = "".join(_qa_line(i) for i in ids)
    corpus = load_qa_corpus(io.StringIO(text), _parses(ids))
    assert [qa.qa_id for qa in corpus] == ids


def test_read_answers_ignores_parses():
    text = _qa_line("a", answers=("Yes.", "No.")) + _qa_line("b", answers=("Maybe",))
    assert read_answers(io.StringIO(text)) == ["Yes.", "No.", "Maybe"]


def _gold_corpus(entity_lists, sentences_per_q, polarities):
    g = graph([("x", "x", "NOUN", 0, "root")])
    return [QAPair(f"q{i}", "p", "c", (g,) * sentences_per_q[i], ("a",), Gold(tuple(e), polarities[i]))
            for i, e in enumerate(entity_lists)]


def test_corpus_stats_basic():
    corpus = _gold_corpus([["Nook", "nook"], ["iPad"], []], [1, 2, 1],
                          [Polarity.YES, Polarity.NO, Polarity.NEUTRAL])
    s = corpus_stats(corpus)
    assert (s.n_questions, s.n_question_sentences, s.n_cp_mentions) == (3, 4, 3)
    assert s.density == Fraction(3, 4)
    assert s.n_unique_cp == 2
    assert (s.n_pos, s.n_neg, s.n_neu) == (2, 1, 0)
    assert "0.75" in stats_table({"p": s})


def test_corpus_stats_zero_mentions():
    s = corpus_stats(_gold_corpus([[], []], [1, 1], [Polarity.YES, Polarity.NO]))
    assert s.density == 0 and s.n_unique_cp == 0
    assert corpus_stats([]).density == 0


def test_corpus_stats_missing_gold():
    qa = QAPair("q9", "p", "c", (graph([("x", "x", "NOUN", 0, "root")]),), ("a",), None)
    with pytest.raises(CorpusError, match="q9"):
        corpus_stats([qa])
