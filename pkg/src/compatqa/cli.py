"""Command-line front end: ``compatqa {stats,bootstrap,train,predict,evaluate,synth}``.

Settings come from an optional ``key = value`` config file (``--config``)
and are overridden by flags. Every command writes its resolved settings to
``<command>.config.json`` in the output directory. Exit status is 0 on
success, 1 when a ``--min-*`` gate fails and 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import io
import json
import logging
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from . import answer_classify as ac
from .cer import (DEFAULT_SEEDS, DEFAULT_STOP_VERBS, BootstrapParams,
                  VerbLexicon, bootstrap)
from .corpus_io import (ConlluError, CorpusError, corpus_stats, index_parses, load_qa_corpus,
                        load_review_corpus, parse_conllu, read_answers, stats_table)
from .dep_pattern import PatternError, default_pattern_text, parse_pattern_file
from .evaluation import evaluate_corpus
from .pipeline import ANSWER_POLICIES, run_pipeline
from .synth import SynthSpec, generate_synthetic_corpus

logger = logging.getLogger("compatqa")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    # paths
    qa: str = ""
    parses: str = ""
    reviews: str = ""
    train_answers: str = ""
    patterns: str = ""
    verbs: str = ""
    model: str = ""
    output_dir: str = "compatqa-out"
    # bootstrapping
    seeds: str = ",".join(DEFAULT_SEEDS)
    max_iterations: int = 5
    min_entity_support: int = 3
    min_verb_support: int = 3
    stop_verbs: str = ",".join(sorted(DEFAULT_STOP_VERBS))
    # training
    epochs: int = 20
    learning_rate: float = 0.1
    regularization: float = 1e-4
    balanced: bool = True
    spy_fraction: float = 0.15
    noise_percentile: float = 5.0
    max_step2_iters: int = 10
    unigrams: bool = False
    # synthetic corpus
    n_questions: int = 500
    fraction_explicit: float = 0.5
    fraction_neutral: float = 0.2
    fraction_distractor: float = 0.1
    n_train_answers: int = 1200
    # run
    seed: int = 0
    jobs: int = 1
    strict: bool = True
    answer_policy: str = "first"
    min_cer_f1: float = -1.0
    min_overall_accuracy: float = -1.0

    def snapshot(self) -> dict:
        return dataclasses.asdict(self)


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _convert(name: str, raw: str):
    kind = _FIELD_TYPES[name]
    if kind == "bool":
        lowered = raw.strip().lower()
        if lowered in ("1", "true", "yes", "on"):
            return True
        if lowered in ("0", "false", "no", "off"):
            return False
        raise UsageError(f"config key {name!r}: not a boolean: {raw!r}")
    try:
        return {"int": int, "float": float}.get(kind, str)(raw.strip())
    except ValueError:
        raise UsageError(f"config key {name!r}: cannot parse {raw!r} as {kind}") from None


def load_config_file(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _FIELD_TYPES:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = _convert(key, value)
    return values


def derive_seed(seed: int, command: str, purpose: str) -> int:
    """Stable sub-seed: first 32 bits of sha256("<seed>/<command>/<purpose>")."""
    digest = hashlib.sha256(f"{seed}/{command}/{purpose}".encode()).hexdigest()
    return int(digest[:8], 16)


# ------------------------------------------------------------------ helpers

def _read(path: str, what: str) -> str:
    if not path:
        raise UsageError(f"no {what} given")
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {what} {path}: {exc.strerror}") from None


def _patterns(cfg: RunConfig):
    text = _read(cfg.patterns, "pattern file") if cfg.patterns else default_pattern_text()
    return parse_pattern_file(text)


def _qa_corpus(cfg: RunConfig):
    skipped: list = []
    parses = index_parses(parse_conllu(_read(cfg.parses, "question parses"), cfg.strict, skipped))
    corpus = load_qa_corpus(io.StringIO(_read(cfg.qa, "QA corpus")), parses, cfg.strict, skipped)
    if skipped:
        logger.warning("skipped %d malformed entries", len(skipped))
    return corpus


def _out(cfg: RunConfig, command: str) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{command}.config.json").write_text(
        json.dumps({"command": command, **cfg.snapshot()}, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    return out


def _split(text: str) -> list[str]:
    return [s.strip() for s in text.split(",") if s.strip()]


# ------------------------------------------------------------------ commands

def cmd_stats(cfg: RunConfig) -> int:
    corpus = _qa_corpus(cfg)
    groups: dict[str, list] = {}
    for qa in corpus:
        groups.setdefault(qa.product_id, []).append(qa)
    rows = {pid: corpus_stats(qas) for pid, qas in sorted(groups.items())}
    rows["ALL"] = corpus_stats(corpus)
    out = _out(cfg, "stats")
    doc = {"stats": {k: v.to_dict() for k, v in rows.items()}, "config": cfg.snapshot(),
           "notes": ["every gold mention counts, including repeats within a question",
                     "unique entities are compared case-folded"]}
    (out / "stats.json").write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    sys.stdout.write(stats_table(rows))
    return 0


def cmd_bootstrap(cfg: RunConfig) -> int:
    patterns = _patterns(cfg)
    reviews = load_review_corpus(_read(cfg.reviews, "review parses"), strict=cfg.strict)
    params = BootstrapParams(cfg.max_iterations, cfg.min_entity_support, cfg.min_verb_support,
                             frozenset(_split(cfg.stop_verbs)))
    verbs, entities = bootstrap(reviews, _split(cfg.seeds), patterns, params)
    out = _out(cfg, "bootstrap")
    (out / "verbs.tsv").write_text(verbs.dumps(), encoding="utf-8")
    (out / "entities.tsv").write_text(entities.dumps(), encoding="utf-8")
    print(f"{len(verbs)} verbs ({len(verbs.learned)} learned), {len(entities)} entities")
    return 0


def _train_params(cfg: RunConfig):
    def linear(purpose):
        return ac.LinearHyperparams(cfg.epochs, cfg.learning_rate, cfg.regularization,
                                    derive_seed(cfg.seed, "train", purpose), cfg.balanced)

    pu = ac.PUParams(cfg.spy_fraction, cfg.noise_percentile, cfg.max_step2_iters,
                     derive_seed(cfg.seed, "train", "spies"), linear("pu"))
    return pu, linear("binary")


def cmd_train(cfg: RunConfig) -> int:
    answers = read_answers(io.StringIO(_read(cfg.train_answers, "training answers")))
    pu_params, binary_hp = _train_params(cfg)
    clf = ac.train_answer_classifier(answers, pu_params, binary_hp, cfg.unigrams)
    clf.header["seed"] = cfg.seed
    clf.header["config"] = cfg.snapshot()
    out = _out(cfg, "train")
    (out / "model.json").write_text(ac.dumps_classifier(clf), encoding="utf-8")
    print(f"trained on {clf.header['n_positive']} distant positives and "
          f"{clf.header['n_unlabeled']} unlabeled answers; {len(clf.space)} features")
    return 0


def _load_models(cfg: RunConfig):
    clf = ac.loads_classifier(_read(cfg.model, "model file"))
    verbs = VerbLexicon.loads(_read(cfg.verbs, "verb lexicon"))
    return clf, verbs


def cmd_predict(cfg: RunConfig) -> int:
    clf, verbs = _load_models(cfg)
    patterns = _patterns(cfg)
    corpus = _qa_corpus(cfg)
    records = run_pipeline(corpus, verbs, patterns, clf, cfg.answer_policy, cfg.jobs)
    out = _out(cfg, "predict")
    with open(out / "records.jsonl", "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps(r.to_dict(), sort_keys=True) + "\n")
    print(f"{len(records)} records from {len(corpus)} questions")
    return 0


def cmd_evaluate(cfg: RunConfig) -> int:
    clf, verbs = _load_models(cfg)
    patterns = _patterns(cfg)
    corpus = _qa_corpus(cfg)
    report = evaluate_corpus(corpus, verbs, patterns, clf, cfg.answer_policy, cfg.snapshot())
    out = _out(cfg, "evaluate")
    (out / "report.json").write_text(json.dumps(report.to_dict(), indent=1, sort_keys=True) + "\n",
                                     encoding="utf-8")
    sys.stdout.write(report.cer_table() + "\n" + report.answer_table())
    failed = [pid for pid, e in report.products.items()
              if float(e.cer.f1) < cfg.min_cer_f1 or float(e.overall_accuracy) < cfg.min_overall_accuracy]
    if failed:
        print(f"threshold not met for: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


def cmd_synth(cfg: RunConfig) -> int:
    spec = SynthSpec(seed=derive_seed(cfg.seed, "synth", "corpus"), n_questions=cfg.n_questions,
                     fraction_explicit=cfg.fraction_explicit, fraction_neutral=cfg.fraction_neutral,
                     fraction_distractor=cfg.fraction_distractor, n_train_answers=cfg.n_train_answers)
    out = _out(cfg, "synth")
    paths = generate_synthetic_corpus(spec).write(out)
    print("wrote " + ", ".join(str(p) for p in paths.values()))
    return 0


COMMANDS = {"stats": cmd_stats, "bootstrap": cmd_bootstrap, "train": cmd_train,
            "predict": cmd_predict, "evaluate": cmd_evaluate, "synth": cmd_synth}

_COMMAND_FLAGS = {
    "stats": ["qa", "parses"],
    "bootstrap": ["reviews", "patterns", "seeds", "max_iterations", "min_entity_support",
                  "min_verb_support", "stop_verbs"],
    "train": ["train_answers", "epochs", "learning_rate", "regularization", "spy_fraction",
              "noise_percentile", "max_step2_iters"],
    "predict": ["qa", "parses", "model", "verbs", "patterns", "answer_policy"],
    "evaluate": ["qa", "parses", "model", "verbs", "patterns", "answer_policy", "min_cer_f1",
                 "min_overall_accuracy"],
    "synth": ["n_questions", "fraction_explicit", "fraction_neutral", "fraction_distractor",
              "n_train_answers"],
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value settings file; flags take precedence")
    common.add_argument("--seed", type=int)
    common.add_argument("--jobs", type=int)
    common.add_argument("--output-dir", dest="output_dir")
    strictness = common.add_mutually_exclusive_group()
    strictness.add_argument("--strict", dest="strict", action="store_true", default=None)
    strictness.add_argument("--lenient", dest="strict", action="store_false")
    common.add_argument("--unigrams", action="store_true", default=None)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="compatqa", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, flags in _COMMAND_FLAGS.items():
        p = sub.add_parser(name, parents=[common], help=COMMANDS[name].__name__.replace("cmd_", ""))
        for flag in flags:
            kind = _FIELD_TYPES[flag]
            kwargs = {"dest": flag}
            if kind == "int":
                kwargs["type"] = int
            elif kind == "float":
                kwargs["type"] = float
            if flag == "answer_policy":
                kwargs["choices"] = ANSWER_POLICIES
            p.add_argument("--" + flag.replace("_", "-"), **kwargs)
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values = load_config_file(args.config) if args.config else {}
    for name in _FIELD_TYPES:
        flag_value = getattr(args, name, None)
        if flag_value is not None:
            values[name] = flag_value
    cfg = RunConfig(**values)
    if cfg.answer_policy not in ANSWER_POLICIES:
        raise UsageError(f"answer_policy must be one of {ANSWER_POLICIES}")
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except (UsageError, ConlluError, CorpusError, PatternError, ac.ModelFormatError, ValueError) as exc:
        print(f"compatqa {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
