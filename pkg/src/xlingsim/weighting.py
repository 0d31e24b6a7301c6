"""
Document frequencies, tf.idf vectors, cosine similarity and the per-word
weight that blends part-of-speech importance with idf.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .errors import ParseError
from .text_core import UNIVERSAL_TAGS, UNKNOWN, Token

SparseVector = dict  # term -> nonzero weight

DEFAULT_K = 0.5
DEFAULT_ALPHA = 0.5


@dataclass(frozen=True)
class IdfModel:
    doc_count: int
    df: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.doc_count < 1:
            raise ValueError("idf model needs at least one document")
        for term, count in self.df.items():
            if not 1 <= count <= self.doc_count:
                raise ValueError(f"df({term!r})={count} outside [1, {self.doc_count}]")

    def idf(self, term: str) -> float:
        return idf(self, term)

    def save(self, path):
        lines = [f"N\t{self.doc_count}"]
        lines += [f"{term}\t{self.df[term]}" for term in sorted(self.df)]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> IdfModel:
        text = Path(path).read_text(encoding="utf-8")
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        if not lines:
            raise ParseError("empty idf file", path, 1)
        head = lines[0].split("\t")
        if len(head) != 2 or head[0] != "N":
            raise ParseError("expected header 'N<TAB>count'", path, 1)
        try:
            doc_count = int(head[1])
        except ValueError:
            raise ParseError(f"bad document count {head[1]!r}", path, 1) from None
        df = {}
        for lineno, line in enumerate(lines[1:], 2):
            # n-gram terms may start or end with a space, so no stripping
            term, sep, count = line.rpartition("\t")
            if not sep:
                raise ParseError("expected 'term<TAB>df'", path, lineno)
            try:
                df[term] = int(count)
            except ValueError:
                raise ParseError(f"bad df value {count!r}", path, lineno) from None
        try:
            return cls(doc_count, df)
        except ValueError as exc:
            raise ParseError(str(exc), path) from None


def build_idf(corpus: Iterable[Iterable[str]]) -> IdfModel:
    """Count, for every term, the number of documents that contain it."""
    df = Counter()
    n = 0
    for doc in corpus:
        n += 1
        df.update(set(doc))
    if n == 0:
        raise ValueError("cannot build an idf model from an empty corpus")
    return IdfModel(n, dict(df))


def idf(model: IdfModel, term: str) -> float:
    """Smoothed idf, ln(1 + N/df); unseen terms count as df = 1."""
    return math.log1p(model.doc_count / model.df.get(term, 1))


def tf_double_norm(counts: Mapping[str, float], K: float = DEFAULT_K) -> dict:
    if not counts:
        raise ValueError("term counts are empty")
    if not 0.0 <= K <= 1.0:
        raise ValueError(f"K must lie in [0, 1], got {K}")
    top = max(counts.values())
    return {t: K + (1.0 - K) * c / top for t, c in counts.items()}


def tfidf_vector(terms: Iterable[str] | Mapping[str, int], model: IdfModel,
                 K: float = DEFAULT_K) -> SparseVector:
    counts = terms if isinstance(terms, Mapping) else Counter(terms)
    counts = {t: c for t, c in counts.items() if c > 0}
    if not counts:
        return {}
    tf = tf_double_norm(counts, K)
    vec = {t: w * idf(model, t) for t, w in tf.items()}
    return {t: w for t, w in vec.items() if w != 0.0}


def cosine(a: Mapping[str, float], b: Mapping[str, float]) -> float:
    if len(a) > len(b):
        a, b = b, a
    dot = math.fsum(w * b.get(t, 0.0) for t, w in a.items())
    na = math.sqrt(math.fsum(w * w for w in a.values()))
    nb = math.sqrt(math.fsum(w * w for w in b.values()))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return max(-1.0, min(1.0, dot / (na * nb)))


@dataclass(frozen=True)
class WeightParams:
    """Exponent `alpha` plus one weight per universal POS tag.

    Tokens still tagged UNKNOWN (no tagger was run) get `fallback`.
    """

    alpha: float = DEFAULT_ALPHA
    pos_weights: Mapping[str, float] = field(
        default_factory=lambda: dict.fromkeys(UNIVERSAL_TAGS, 1.0))
    fallback: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if set(self.pos_weights) != set(UNIVERSAL_TAGS):
            missing = set(UNIVERSAL_TAGS) - set(self.pos_weights)
            extra = set(self.pos_weights) - set(UNIVERSAL_TAGS)
            raise ValueError(f"pos weights must cover exactly the 12 universal tags "
                             f"(missing {sorted(missing)}, extra {sorted(extra)})")
        for tag, w in self.pos_weights.items():
            if not math.isfinite(w):
                raise ValueError(f"pos weight for {tag} is not finite")

    def pos_weight(self, tag: str) -> float:
        if tag == UNKNOWN:
            return self.fallback
        return self.pos_weights[tag]

    def with_weight(self, tag: str, value: float) -> WeightParams:
        weights = dict(self.pos_weights)
        weights[tag] = value
        return WeightParams(self.alpha, weights, self.fallback)

    def with_alpha(self, alpha: float) -> WeightParams:
        return WeightParams(alpha, dict(self.pos_weights), self.fallback)

    def save(self, path):
        lines = [f"{tag}\t{self.pos_weights[tag]!r}" for tag in UNIVERSAL_TAGS]
        lines.append(f"alpha\t{self.alpha!r}")
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> WeightParams:
        weights, alpha, fallback = {}, None, 1.0
        text = Path(path).read_text(encoding="utf-8")
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ParseError("expected 'TAG<TAB>weight'", path, lineno)
            key, value = parts[0].strip(), parts[1].strip()
            try:
                number = float(value)
            except ValueError:
                raise ParseError(f"bad number {value!r}", path, lineno) from None
            if key == "alpha":
                alpha = number
            elif key == UNKNOWN:
                fallback = number
            elif key in UNIVERSAL_TAGS or key == ".":
                weights["PUNCT" if key == "." else key] = number
            else:
                raise ParseError(f"unknown tag {key!r}", path, lineno)
        if alpha is None:
            raise ParseError("missing 'alpha' line", path)
        try:
            return cls(alpha, weights, fallback)
        except ValueError as exc:
            raise ParseError(str(exc), path) from None


def phi(token: Token, model: IdfModel, params: WeightParams) -> float:
    """Word weight pos_weight^(1 - alpha) * idf^alpha (0^0 taken as 1)."""
    w = params.pos_weight(token.pos)
    if w < 0:
        raise ValueError(f"negative POS weight {w} for tag {token.pos}")
    a = params.alpha
    return w ** (1.0 - a) * idf(model, token.normalized) ** a
