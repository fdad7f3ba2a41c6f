"""Mining compatible and incompatible products from product Q&A."""

from .answer_classify import (AnswerClassifier, FeatureSpace, LinearModel, PUModel, classify_answer,
                              detect_explicit_polarity, featurize, train_answer_classifier)
from .cer import BootstrapParams, VerbLexicon, bootstrap, extract_from_question
from .corpus_io import (DependencyGraph, QAPair, Token, corpus_stats, index_parses, load_qa_corpus,
                        load_review_corpus, parse_conllu)
from .dep_pattern import chunk_noun_phrase, default_patterns, match_pattern, parse_pattern_file
from .evaluation import eval_answers, eval_cer, eval_overall, evaluate_corpus
from .labels import CompatLabel, Polarity
from .pipeline import CompatibilityRecord, run_pipeline
from .synth import SynthSpec, generate_synthetic_corpus

__version__ = "0.1.0"
