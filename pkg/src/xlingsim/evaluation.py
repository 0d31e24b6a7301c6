"""
Evaluation harness: Pearson correlation, dataset and score-file I/O,
[0, 5] rescaling, k-fold cross-validation and a derivative-free tuner for
the word-weighting parameters.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import ParseError
from .text_core import UNIVERSAL_TAGS, Sentence, TagLexicon, analyze
from .weighting import WeightParams

log = logging.getLogger(__name__)

ALPHA_GRID = tuple(i / 20 for i in range(21))
WEIGHT_RANGE = (0.0, 2.0)


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError(f"pearson needs two equal-length vectors, got {x.shape} and {y.shape}")
    if len(x) < 2:
        raise ValueError("pearson needs at least two points")
    dx, dy = x - x.mean(), y - y.mean()
    sxx, syy = float(dx @ dx), float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise ValueError("pearson is undefined when one side has zero variance")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def rescale_0_5(scores: Sequence[float]) -> list[float]:
    out = []
    for s in scores:
        if not 0.0 <= s <= 1.0:
            raise ValueError(f"score {s} outside [0, 1]")
        out.append(s * 5.0)
    return out


@dataclass
class StsDataset:
    pairs: list[tuple[Sentence, Sentence]]
    gold: list[float] | None = None

    def __post_init__(self):
        if self.gold is not None and len(self.gold) != len(self.pairs):
            raise ValueError(f"{len(self.pairs)} pairs but {len(self.gold)} gold scores")

    def __len__(self):
        return len(self.pairs)

    def sentences(self, side: int | None = None) -> list[Sentence]:
        if side is None:
            return [s for pair in self.pairs for s in pair]
        return [pair[side] for pair in self.pairs]


@dataclass
class EvalReport:
    n: int
    methods: dict[str, float] = field(default_factory=dict)
    fused: float | None = None

    def lines(self) -> list[str]:
        out = [f"pairs\t{self.n}"]
        out += [f"{name}\t{r:.4f}" for name, r in self.methods.items()]
        if self.fused is not None:
            out.append(f"fused\t{self.fused:.4f}")
        return out


def _read_lines(path):
    lines = Path(path).read_text(encoding="utf-8").split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return [ln.rstrip("\r") for ln in lines]


def read_pairs(path) -> list[tuple[str, str]]:
    pairs = []
    for lineno, line in enumerate(_read_lines(path), 1):
        parts = line.split("\t")
        if len(parts) != 2:
            raise ParseError("expected 'source<TAB>target'", path, lineno)
        pairs.append((parts[0], parts[1]))
    return pairs


def read_scores(path, low=-math.inf, high=math.inf) -> list[float]:
    scores = []
    for lineno, line in enumerate(_read_lines(path), 1):
        try:
            value = float(line)
        except ValueError:
            raise ParseError(f"not a number: {line!r}", path, lineno) from None
        if not math.isfinite(value) or not low <= value <= high:
            raise ParseError(f"score {value} outside [{low}, {high}]", path, lineno)
        scores.append(value)
    return scores


def write_scores(path, scores: Sequence[float]):
    Path(path).write_text("".join(f"{s:.6f}\n" for s in scores), encoding="utf-8")


def load_dataset(pairs_path, gold_path=None, src_lang="es", tgt_lang="en",
                 tags: Mapping[str, TagLexicon] | None = None) -> StsDataset:
    tags = tags or {}
    raw = read_pairs(pairs_path)
    pairs = [(analyze(a, src_lang, tags.get(src_lang)), analyze(b, tgt_lang, tags.get(tgt_lang)))
             for a, b in raw]
    gold = None
    if gold_path is not None:
        gold = read_scores(gold_path, 0.0, 5.0)
        if len(gold) != len(pairs):
            raise ParseError(f"{len(pairs)} pairs but {len(gold)} gold scores", gold_path,
                             min(len(gold), len(pairs)) + 1)
    return StsDataset(pairs, gold)


@dataclass
class CVResult:
    mean: float
    fold_scores: list[float | None]
    skipped: list[int]


def kfold_cv(X, y, k: int = 10, seed: int = 0,
             trainer: Callable | None = None) -> CVResult:
    """Seeded k-fold cross-validated Pearson correlation.

    `trainer(X, y)` must return a fitted model with a `predict(X)` method.
    Folds whose predictions or targets have zero variance are skipped.
    """
    from .fusion import train_linear

    trainer = trainer or train_linear
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y, dtype=float)
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if len(y) < k:
        raise ValueError(f"cannot make {k} folds from {len(y)} examples")
    order = np.random.default_rng(seed).permutation(len(y))
    folds = np.array_split(order, k)
    scores, skipped = [], []
    for i, test in enumerate(folds):
        train = np.concatenate([f for j, f in enumerate(folds) if j != i])
        model = trainer(X[train], y[train])
        pred = model.predict(X[test])
        try:
            scores.append(pearson(pred, y[test]))
        except ValueError:
            log.info("fold %d skipped: zero variance", i)
            scores.append(None)
            skipped.append(i)
    valid = [s for s in scores if s is not None]
    if not valid:
        raise ValueError("every fold had zero variance; correlation undefined")
    return CVResult(math.fsum(valid) / len(valid), scores, skipped)


def _safe(objective, params):
    try:
        value = objective(params)
    except ValueError:
        return -math.inf
    return value if math.isfinite(value) else -math.inf


def coordinate_search(objective: Callable[[WeightParams], float], initial: WeightParams,
                      budget: int = 400, min_step: float = 1 / 64) -> tuple[WeightParams, float]:
    """Maximize `objective` over alpha and the 12 POS weights.

    Alpha is swept over a 21-point grid, then each weight is nudged by
    +/- step within [0, 2]; the step halves after a sweep with no gain.
    Only strict improvements are accepted, so the result never scores
    below `initial`. `budget` caps the number of objective evaluations.
    """
    if budget < 1:
        raise ValueError("search budget must allow at least one evaluation")
    best, best_val = initial, _safe(objective, initial)
    evals = 1
    step = 0.5
    lo, hi = WEIGHT_RANGE

    def candidates():
        for a in ALPHA_GRID:
            if a != best.alpha:
                yield best.with_alpha(a)
        for tag in UNIVERSAL_TAGS:
            for delta in (step, -step):
                w = min(hi, max(lo, best.pos_weights[tag] + delta))
                if w != best.pos_weights[tag]:
                    yield best.with_weight(tag, w)

    while step >= min_step and evals < budget:
        improved = False
        for cand in candidates():
            if evals >= budget:
                break
            value = _safe(objective, cand)
            evals += 1
            if value > best_val:
                best, best_val, improved = cand, value, True
        if not improved:
            step /= 2
    return best, best_val


def tune_params(dev: StsDataset, method: str, score_fn: Callable[..., float],
                budget: int = 400, initial: WeightParams | None = None) -> WeightParams:
    """Tune weighting parameters of the CTS or WES method for dev-set Pearson.

    `score_fn(src, tgt, params)` scores one pair with the method being tuned.
    """
    if method not in ("cts", "wes"):
        raise ValueError(f"only cts and wes use weighting parameters, not {method!r}")
    if not dev.gold:
        raise ValueError("tuning needs gold scores")
    if len(set(dev.gold)) < 2:
        raise ValueError("tuning needs non-constant gold scores")
    initial = initial or WeightParams()

    def objective(params):
        return pearson([score_fn(a, b, params) for a, b in dev.pairs], dev.gold)

    best, value = coordinate_search(objective, initial, budget)
    log.info("tuned %s: dev pearson %.4f, alpha %.2f", method, value, best.alpha)
    return best
