"""
Score fusion: plain averaging, ordinary least squares, and an M5-style
model tree (regression tree with linear models in the leaves).

Tree growing follows the M5 recipe. A node is split on the
(feature, observed value) pair that maximizes the standard deviation
reduction

    SDR = sd(T) - sum_i |T_i| / |T| * sd(T_i)

and growth stops when a node has fewer than 2 * min_leaf examples or its
target sd drops below 5% of the root's. Every node gets a least-squares
linear model. Pruning works bottom-up and collapses a subtree into its
node model whenever the node model's inflated error
mean|residual| * (n + v) / (n - v) is no worse than the subtree's.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ParseError

METHODS = ("c3g", "cts", "wes", "twa")
AVERAGE_METHODS = ("c3g", "cts", "twa")

DEFAULT_MIN_LEAF = 4
SD_STOP_FRACTION = 0.05
SMOOTHING_K = 15.0
FORMAT_VERSION = 1
PRUNE_TOLERANCE = 1e-9


def average_fusion(scores: Sequence[float]) -> float:
    scores = list(scores)
    if not scores:
        raise ValueError("cannot average an empty list of scores")
    return math.fsum(scores) / len(scores)


def _as_xy(X, y=None):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise ValueError("features must be a 2-d array (examples x features)")
    if not np.all(np.isfinite(X)):
        raise ValueError("features must be finite")
    if y is None:
        return X
    y = np.asarray(y, dtype=float).ravel()
    if len(y) != len(X):
        raise ValueError(f"{len(X)} feature rows but {len(y)} targets")
    if not np.all(np.isfinite(y)):
        raise ValueError("targets must be finite")
    return X, y


@dataclass(frozen=True, eq=False)
class LinearModel:
    coef: np.ndarray
    intercept: float

    @property
    def n_features(self):
        return len(self.coef)

    def predict(self, X) -> np.ndarray:
        X = _as_xy(X)
        if X.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} features, got {X.shape[1]}")
        return X @ self.coef + self.intercept

    def predict_one(self, f) -> float:
        f = np.asarray(f, dtype=float).ravel()
        if len(f) != self.n_features:
            raise ValueError(f"expected {self.n_features} features, got {len(f)}")
        return float(f @ self.coef + self.intercept)


def train_linear(X, y) -> LinearModel:
    """Ordinary least squares; rank-deficient systems get the minimum-norm fit."""
    X, y = _as_xy(X, y)
    if len(y) == 0:
        raise ValueError("cannot fit a linear model on zero examples")
    x_mean, y_mean = X.mean(axis=0), y.mean()
    # centering keeps the intercept out of the minimum-norm tradeoff
    coef, *_ = np.linalg.lstsq(X - x_mean, y - y_mean, rcond=None)
    return LinearModel(coef, float(y_mean - x_mean @ coef))


def predict_linear(model: LinearModel, f) -> float:
    return model.predict_one(f)


@dataclass(eq=False)
class Node:
    model: LinearModel
    n: int
    feature: int | None = None
    threshold: float | None = None
    left: Node | None = None
    right: Node | None = None

    @property
    def is_leaf(self):
        return self.left is None

    def make_leaf(self):
        self.feature = self.threshold = self.left = self.right = None


@dataclass(eq=False)
class ModelTree:
    root: Node
    n_features: int
    min_leaf: int = DEFAULT_MIN_LEAF
    prune: bool = True
    smoothing: bool = False

    def _path(self, f):
        node, path = self.root, [self.root]
        while not node.is_leaf:
            node = node.left if f[node.feature] <= node.threshold else node.right
            path.append(node)
        return path

    def predict_one(self, f) -> float:
        f = np.asarray(f, dtype=float).ravel()
        if len(f) != self.n_features:
            raise ValueError(f"expected {self.n_features} features, got {len(f)}")
        path = self._path(f)
        p = path[-1].model.predict_one(f)
        if self.smoothing:
            for child, parent in zip(reversed(path[1:]), reversed(path[:-1])):
                q = parent.model.predict_one(f)
                p = (child.n * p + SMOOTHING_K * q) / (child.n + SMOOTHING_K)
        return p

    def predict(self, X) -> np.ndarray:
        X = _as_xy(X)
        return np.array([self.predict_one(row) for row in X])

    def leaves(self) -> list[Node]:
        out, stack = [], [self.root]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                out.append(node)
            else:
                stack += [node.right, node.left]
        return out

    @property
    def n_leaves(self):
        return len(self.leaves())

    def depth(self, node=None) -> int:
        node = node or self.root
        if node.is_leaf:
            return 0
        return 1 + max(self.depth(node.left), self.depth(node.right))

    def dumps(self) -> str:
        lines = [f"m5tree {FORMAT_VERSION}",
                 f"features {self.n_features} min_leaf {self.min_leaf} "
                 f"prune {int(self.prune)} smoothing {int(self.smoothing)}"]

        def model_fields(m):
            return " ".join(repr(float(v)) for v in (m.intercept, *m.coef))

        def walk(node):
            if node.is_leaf:
                lines.append(f"leaf {model_fields(node.model)} n={node.n}")
            else:
                lines.append(f"node {node.feature} {float(node.threshold)!r} n={node.n} "
                             f"model={model_fields(node.model).replace(' ', ',')}")
                walk(node.left)
                walk(node.right)

        walk(self.root)
        return "\n".join(lines) + "\n"

    def save(self, path):
        Path(path).write_text(self.dumps(), encoding="utf-8")

    @classmethod
    def loads(cls, text: str, path=None) -> ModelTree:
        lines = [(i, ln.split()) for i, ln in enumerate(text.splitlines(), 1) if ln.strip()]
        if not lines or lines[0][1] != ["m5tree", str(FORMAT_VERSION)]:
            raise ParseError(f"expected header 'm5tree {FORMAT_VERSION}'", path, 1)
        try:
            meta = lines[1][1]
            opts = dict(zip(meta[0::2], meta[1::2]))
            d = int(opts["features"])
            min_leaf = int(opts.get("min_leaf", DEFAULT_MIN_LEAF))
            prune = bool(int(opts.get("prune", 1)))
            smoothing = bool(int(opts.get("smoothing", 0)))
        except (IndexError, KeyError, ValueError):
            raise ParseError("bad metadata line", path, 2) from None
        body = iter(lines[2:])

        def parse_model(values, lineno):
            if len(values) != d + 1:
                raise ParseError(f"expected intercept + {d} coefficients", path, lineno)
            return LinearModel(np.array(values[1:]), values[0])

        def read():
            try:
                lineno, parts = next(body)
            except StopIteration:
                raise ParseError("tree ends early", path) from None
            extra = dict(p.split("=", 1) for p in parts if "=" in p)
            plain = [p for p in parts if "=" not in p]
            try:
                n = int(extra.get("n", 0))
                if plain[0] == "leaf":
                    return Node(parse_model([float(v) for v in plain[1:]], lineno), n)
                if plain[0] == "node":
                    feature, threshold = int(plain[1]), float(plain[2])
                    if not 0 <= feature < d or not math.isfinite(threshold):
                        raise ParseError("bad split", path, lineno)
                    model = None
                    if "model" in extra:
                        model = parse_model([float(v) for v in extra["model"].split(",")], lineno)
                    node = Node(model, n, feature, threshold)
                    node.left = read()
                    node.right = read()
                    return node
            except (IndexError, ValueError) as exc:
                if isinstance(exc, ParseError):
                    raise
                raise ParseError("malformed tree line", path, lineno) from None
            raise ParseError(f"unknown line kind {plain[0]!r}", path, lineno)

        root = read()
        leftover = next(body, None)
        if leftover is not None:
            raise ParseError("trailing lines after tree", path, leftover[0])
        if smoothing and not _has_path_models(root):
            raise ParseError("smoothing requires node models and counts", path)
        return cls(root, d, min_leaf, prune, smoothing)

    @classmethod
    def load(cls, path) -> ModelTree:
        return cls.loads(Path(path).read_text(encoding="utf-8"), path)


def _has_path_models(node):
    if node.n <= 0 or node.model is None:
        return False
    return node.is_leaf or (_has_path_models(node.left) and _has_path_models(node.right))


def _best_split(X, y, min_leaf):
    """Return (sdr, feature, threshold) of the best split, or None."""
    n = len(y)
    yc = y - y.mean()
    sd = yc.std()
    best = None
    sizes = np.arange(1, n)
    for f in range(X.shape[1]):
        order = np.argsort(X[:, f], kind="stable")
        xs, ys = X[order, f], yc[order]
        s1, s2 = np.cumsum(ys)[:-1], np.cumsum(ys * ys)[:-1]
        t1, t2 = yc.sum() - s1, (yc * yc).sum() - s2
        m = sizes
        sd_l = np.sqrt(np.maximum(s2 / m - (s1 / m) ** 2, 0.0))
        sd_r = np.sqrt(np.maximum(t2 / (n - m) - (t1 / (n - m)) ** 2, 0.0))
        sdr = sd - (m * sd_l + (n - m) * sd_r) / n
        valid = (m >= min_leaf) & (n - m >= min_leaf) & (xs[:-1] < xs[1:])
        if not valid.any():
            continue
        cand = np.flatnonzero(valid)
        i = cand[np.argmax(sdr[cand])]
        if best is None or sdr[i] > best[0]:
            best = (float(sdr[i]), f, float(xs[i]))
    return best


def _grow(X, y, min_leaf, sd_root):
    node = Node(train_linear(X, y), len(y))
    sd = y.std()
    if len(y) < 2 * min_leaf or sd == 0.0 or sd < SD_STOP_FRACTION * sd_root:
        return node
    split = _best_split(X, y, min_leaf)
    if split is None or split[0] <= 0.0:
        return node
    _, f, thr = split
    mask = X[:, f] <= thr
    node.feature, node.threshold = f, thr
    node.left = _grow(X[mask], y[mask], min_leaf, sd_root)
    node.right = _grow(X[~mask], y[~mask], min_leaf, sd_root)
    return node


def _inflated_error(model, X, y):
    n, v = len(y), model.n_features + 1
    err = float(np.mean(np.abs(model.predict(X) - y)))
    if n <= v:
        return err * 10.0
    return err * (n + v) / (n - v)


def _prune(node, X, y, tol):
    own = _inflated_error(node.model, X, y)
    if node.is_leaf:
        return own
    mask = X[:, node.feature] <= node.threshold
    el = _prune(node.left, X[mask], y[mask], tol)
    er = _prune(node.right, X[~mask], y[~mask], tol)
    subtree = (node.left.n * el + node.right.n * er) / node.n
    # exact fits differ only by rounding noise; treat those as ties
    if own <= subtree + tol:
        node.make_leaf()
        return own
    return subtree


def train_model_tree(X, y, min_leaf: int = DEFAULT_MIN_LEAF, prune: bool = True,
                     smoothing: bool = False) -> ModelTree:
    X, y = _as_xy(X, y)
    if min_leaf < 1:
        raise ValueError(f"min_leaf must be >= 1, got {min_leaf}")
    if len(y) < 2 * min_leaf:
        raise ValueError(f"need at least {2 * min_leaf} examples for min_leaf={min_leaf}, "
                         f"got {len(y)}")
    sd_root = y.std()
    root = _grow(X, y, min_leaf, sd_root)
    if prune:
        _prune(root, X, y, PRUNE_TOLERANCE * max(sd_root, 1.0))
    return ModelTree(root, X.shape[1], min_leaf, prune, smoothing)


def predict_model_tree(tree: ModelTree, f) -> float:
    return tree.predict_one(f)
