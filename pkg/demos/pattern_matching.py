"""
Matching dependency paths in a question
=======================================

Parse one CoNLL-U sentence, run the default path inventory over it and
expand the captured head into a noun phrase.
"""

from compatqa.corpus_io import parse_conllu
from compatqa.dep_pattern import chunk_noun_phrase, default_patterns, match_pattern, parse_pattern_file

# "Will it work with a Samsung Galaxy Tab 2 10.0 ?"
conllu = """\
# sent_id = q1:1
1\tWill\twill\tAUX\tMD\t_\t3\taux\t_\t_
2\tit\tit\tPRON\tPRP\t_\t3\tnsubj\t_\t_
3\twork\twork\tVERB\tVB\t_\t0\troot\t_\t_
4\twith\twith\tADP\tIN\t_\t8\tcase\t_\t_
5\ta\ta\tDET\tDT\t_\t8\tdet\t_\t_
6\tSamsung\tsamsung\tPROPN\tNNP\t_\t8\tcompound\t_\t_
7\tGalaxy\tgalaxy\tPROPN\tNNP\t_\t8\tcompound\t_\t_
8\tTab\ttab\tPROPN\tNNP\t_\t3\tnmod:with\t_\t_
9\t2\t2\tNUM\tCD\t_\t8\tnummod\t_\t_
10\t10.0\t10.0\tNUM\tCD\t_\t8\tnummod\t_\t_
11\t?\t?\tPUNCT\t.\t_\t3\tpunct\t_\t_
"""
[g] = parse_conllu(conllu)
print(g.sentence_text)

# the verb lexicon is passed in as $VERBS
lexicons = {"VERBS": {"work", "fit"}}
for p in default_patterns():
    for m in match_pattern(p, g, lexicons):
        np_ = chunk_noun_phrase(g, m.captured_head_index)
        print(f"{p.pattern_id:3s} anchor={g.token(m.anchor_token_index).form!r:8s} path={m.path} -> {np_.surface!r}")

# patterns are plain text; this one climbs from the entity to the verb and captures its subject
[custom] = parse_pattern_file("U1 ex: PROPN <nmod:with VERB[$VERBS] >nsubj CAPTURE(PRON)")
print([g.token(m.captured_head_index).form for m in match_pattern(custom, g, lexicons)])
