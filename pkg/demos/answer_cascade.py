"""
Classifying answers without labels
==================================

Answers that start with yes/no label themselves. Everything else is
unlabeled, and PU learning separates implicit yes/no answers from neutral
ones before a binary model decides the direction.
"""

from compatqa.answer_classify import (build_distant_training_set, dumps_classifier, FeatureSpace,
                                      loads_classifier, train_answer_classifier)
from compatqa.synth import SynthSpec, generate_synthetic_corpus

corpus = generate_synthetic_corpus(SynthSpec(seed=2, n_train_answers=1500))
answers = [a for rec in corpus.train_records for a in rec["answers"]]
print(answers[:5])

ts = build_distant_training_set(answers, FeatureSpace())
print(len(ts.positives), "distant positives,", len(ts.unlabeled), "unlabeled")

clf = train_answer_classifier(answers)
d = clf.pu.diagnostics
print("spies", len(d["spies"]), "reliable negatives", len(d["reliable_negatives"]),
      "negative set per step-2 round", [len(h) for h in d["negative_history"]])

for a in ["Yes.", "No, sorry.", "It works great with my tablet.", "It does not fit properly.",
          "You should ask the seller.", "qwerty"]:
    print(f"{a!r:40s} {clf.classify(a).value}")

# the model file is JSON and round-trips exactly
text = dumps_classifier(clf)
print(len(text), "bytes;", dumps_classifier(loads_classifier(text)) == text)
