"""
Command-line entry point.

    xlingsim build-idf --pairs P --side {src,tgt,ngram,twa} --out F
    xlingsim score     --pairs P --run {1,2,3} | --method M  [--model T] [--out F]
    xlingsim train     --pairs P --gold G --out T
    xlingsim evaluate  SCORES --gold G
    xlingsim align     SENTENCE_X SENTENCE_Y
    xlingsim tune      --pairs P --gold G --method {cts,wes} --out PARAMS

Every command takes --config (or $XLINGSIM_CONFIG); flags override the file.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import c3g
from .evaluation import (EvalReport, kfold_cv, load_dataset, pearson, read_scores,
                         rescale_0_5, tune_params, write_scores)
from .fusion import METHODS, ModelTree, train_model_tree
from .pipeline import (RUN_PRESETS, fuse, load_config, load_resources, make_scorer,
                       translated_targets, word_sets)
from .text_core import analyze
from .twa import align
from .weighting import build_idf

CV_FOLDS = 10


def _config(args, **extra):
    overrides = dict(extra)
    if getattr(args, "model", None):
        overrides["model"] = args.model
    return load_config(args.config, overrides)


def _load(args, cfg, with_gold=False):
    resources = load_resources(cfg)
    dataset = load_dataset(args.pairs, args.gold if with_gold else None,
                           cfg.src_lang, cfg.tgt_lang, resources.tags)
    return resources, dataset


def cmd_build_idf(args):
    cfg = _config(args)
    resources, dataset = _load(args, cfg)
    if len(dataset) == 0:
        raise ValueError(f"{args.pairs}: no sentence pairs")
    if args.side == "src":
        model = build_idf(word_sets(dataset.sentences(0)))
    elif args.side == "tgt":
        model = build_idf(word_sets(dataset.sentences(1)))
    elif args.side == "ngram":
        model = c3g.build_ngram_idf(dataset.sentences(), cfg.ngram)
    else:
        if resources.provider is None:
            raise ValueError("--side twa needs a translation table in the config")
        model = build_idf(word_sets(translated_targets(dataset, resources)))
    model.save(args.out)
    print(f"wrote idf model over {model.doc_count} documents to {args.out}")


def _write_lines(path, lines):
    text = "".join(line + "\n" for line in lines)
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def cmd_score(args):
    cfg = _config(args)
    run = None if args.method else args.run
    methods = (args.method,) if args.method else RUN_PRESETS[run]
    tree = None
    if run == 3:
        if not cfg.path("model"):
            raise ValueError("run 3 needs a trained model (--model or 'model' in the config)")
        cfg.check_paths()
        tree = ModelTree.load(cfg.path("model"))
        methods = METHODS
    resources, dataset = _load(args, cfg)
    scorer = make_scorer(cfg, resources, dataset, methods)
    feats = scorer.features(dataset, methods, args.threads)
    if len(dataset):
        scores = rescale_0_5(fuse(feats, list(methods), run, tree).tolist())
    else:
        scores = []
    if args.out in (None, "-"):
        sys.stdout.write("".join(f"{s:.6f}\n" for s in scores))
    else:
        write_scores(args.out, scores)
    if args.explain:
        rows = ["\t".join((*methods, "score"))]
        rows += ["\t".join(f"{v:.6f}" for v in (*row, s)) for row, s in zip(feats, scores)]
        _write_lines(args.explain, rows)


def _cv_trainer(cfg):
    def trainer(X, y):
        # held-out folds shrink the training set; keep the tree trainable
        min_leaf = max(1, min(cfg.min_leaf, len(y) // 2))
        return train_model_tree(X, y, min_leaf, cfg.prune, cfg.smoothing)
    return trainer


def cmd_train(args):
    cfg = _config(args)
    resources, dataset = _load(args, cfg, with_gold=True)
    if len(dataset) < 2 * cfg.min_leaf:
        raise ValueError(f"training needs at least {2 * cfg.min_leaf} pairs, got {len(dataset)}")
    scorer = make_scorer(cfg, resources, dataset, METHODS)
    X = scorer.features(dataset, METHODS, args.threads)
    y = np.array(dataset.gold) / 5.0
    tree = train_model_tree(X, y, cfg.min_leaf, cfg.prune, cfg.smoothing)
    tree.save(args.out)
    print(f"wrote model tree with {tree.n_leaves} leaves to {args.out}")
    k = min(CV_FOLDS, len(y) // 2)
    cv = kfold_cv(X, y, k, args.seed, _cv_trainer(cfg))
    print(f"{k}-fold cv pearson\t{cv.mean:.4f}")
    if cv.skipped:
        print(f"skipped folds (zero variance)\t{','.join(map(str, cv.skipped))}")


def cmd_evaluate(args):
    scores = read_scores(args.scores)
    gold = read_scores(args.gold, 0.0, 5.0)
    if len(scores) != len(gold):
        raise ValueError(f"{len(scores)} scores but {len(gold)} gold values")
    print(f"pearson\t{pearson(scores, gold):.4f}")


def cmd_align(args):
    cfg = _config(args)
    resources = load_resources(cfg)
    lang = args.lang or cfg.tgt_lang
    tags = resources.tags.get(lang)
    x, y = analyze(args.x, lang, tags), analyze(args.y, lang, tags)
    alignment = align(x, y, resources.embeddings, resources.stops.get(lang), cfg.threshold)
    print(" ".join(f"{i}-{j}" for i, j in alignment))


def cmd_tune(args):
    cfg = _config(args)
    resources, dataset = _load(args, cfg, with_gold=True)
    scorer = make_scorer(cfg, resources, dataset, (args.method,))
    initial = scorer.params

    def score_fn(src, tgt, params):
        return scorer.score(args.method, src, tgt, params)

    best = tune_params(dataset, args.method, score_fn, args.budget, initial)
    best.save(args.out)
    before = pearson([score_fn(a, b, initial) for a, b in dataset.pairs], dataset.gold)
    after = pearson([score_fn(a, b, best) for a, b in dataset.pairs], dataset.gold)
    report = EvalReport(len(dataset), {"initial": before, "tuned": after})
    print("\n".join(report.lines()))


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value run configuration (default $XLINGSIM_CONFIG)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="xlingsim",
                                     description="Cross-language semantic textual similarity")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-idf", parents=[common], help="build an idf model from a pairs file")
    p.add_argument("--pairs", required=True)
    p.add_argument("--side", choices=("src", "tgt", "ngram", "twa"), required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build_idf)

    p = sub.add_parser("score", parents=[common], help="score sentence pairs")
    p.add_argument("--pairs", required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--run", type=int, choices=(1, 2, 3), default=2)
    group.add_argument("--method", choices=METHODS)
    p.add_argument("--model")
    p.add_argument("--out")
    p.add_argument("--explain", help="write per-method scores as TSV to this path ('-' for stdout)")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("train", parents=[common], help="train the model-tree fusion")
    p.add_argument("--pairs", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--out", "--model", dest="out", required=True)
    p.set_defaults(func=cmd_train, model=None)

    p = sub.add_parser("evaluate", parents=[common], help="Pearson of a score file against gold")
    p.add_argument("scores")
    p.add_argument("--gold", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("align", parents=[common], help="align two same-language sentences")
    p.add_argument("x")
    p.add_argument("y")
    p.add_argument("--lang")
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("tune", parents=[common], help="tune weighting parameters on a dev set")
    p.add_argument("--pairs", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--method", choices=("cts", "wes"), default="cts")
    p.add_argument("--budget", type=int, default=400)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_tune)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        args.func(args)
    except (ValueError, LookupError, OSError) as exc:
        print(f"xlingsim: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
