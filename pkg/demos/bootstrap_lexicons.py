"""
Growing the verb lexicon from reviews
=====================================

Start from two seed verbs, harvest entities from high-precision paths and
learn new verbs that reach those entities.
"""

from compatqa.cer import BootstrapParams, bootstrap
from compatqa.corpus_io import load_review_corpus
from compatqa.dep_pattern import default_patterns
from compatqa.synth import SynthSpec, generate_synthetic_corpus

# reviews with two planted verbs (support 5) and two decoys (support 2)
spec = SynthSpec(seed=4, n_questions=10, planted_verbs={"insert": 5, "hold": 5},
                 decoy_verbs={"shake": 2, "wiggle": 2})
corpus = generate_synthetic_corpus(spec)
reviews = load_review_corpus(corpus.reviews_conllu())
print(len(reviews), "review sentences")

verbs, entities = bootstrap(reviews, ["work", "fit"], default_patterns(), BootstrapParams(min_verb_support=3))

# key, support, origin, iteration added
print(verbs.dumps())
print(entities.dumps())

# a lower threshold lets the decoys in
verbs_lo, _ = bootstrap(reviews, ["work", "fit"], default_patterns(), BootstrapParams(min_verb_support=2))
print(sorted(verbs_lo.learned))
