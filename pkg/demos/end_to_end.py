"""
Mining compatible products end to end
=====================================

Generate a synthetic product Q&A corpus, learn lexicons and answer models,
extract (entity, label) records and score them against the gold labels.
"""

import io

from compatqa.answer_classify import train_answer_classifier
from compatqa.cer import bootstrap
from compatqa.corpus_io import corpus_stats, index_parses, load_qa_corpus, load_review_corpus, parse_conllu, \
    read_answers, stats_table
from compatqa.dep_pattern import default_patterns
from compatqa.evaluation import evaluate_corpus
from compatqa.pipeline import run_pipeline
from compatqa.synth import SynthSpec, generate_synthetic_corpus

spec = SynthSpec(seed=1, n_questions=500, fraction_explicit=0.5, fraction_neutral=0.2)
synth = generate_synthetic_corpus(spec)

parses = index_parses(parse_conllu(synth.questions_conllu()))
qa = load_qa_corpus(io.StringIO(synth.qa_jsonl()), parses)
print(stats_table({spec.product_id: corpus_stats(qa)}))

patterns = default_patterns()
verbs, _ = bootstrap(load_review_corpus(synth.reviews_conllu()), spec.seed_verbs, patterns)
clf = train_answer_classifier(read_answers(io.StringIO(synth.train_jsonl())))

records = run_pipeline(qa, verbs, patterns, clf)
for r in records[:8]:
    print(f"{r.evidence.qa_id}  {r.entity_surface:28s} {r.label.value}")

report = evaluate_corpus(qa, verbs, patterns, clf)
print(report.cer_table())
print(report.answer_table())
