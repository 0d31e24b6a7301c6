"""
Translate-then-align similarity.

The source sentence is translated into the target language, both sentences
are word-aligned, and the score is the idf mass of aligned words over the
idf mass of all content words on both sides. The aligner is a greedy
one-to-one matcher with three phases, each locking the tokens it pairs:

1. identical normalized words;
2. shared 4-character prefix, both words at least 5 characters long;
3. embedding cosine >= threshold, best pair first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .resources import EmbeddingModel, TranslationProvider, translate
from .text_core import Sentence, StopList, TagLexicon
from .weighting import IdfModel, idf

DEFAULT_THRESHOLD = 0.7
STEM_PREFIX = 4
STEM_MIN_LEN = 5


@dataclass(frozen=True)
class Alignment:
    pairs: frozenset = frozenset()

    def __post_init__(self):
        xs = [i for i, _ in self.pairs]
        ys = [j for _, j in self.pairs]
        if len(set(xs)) != len(xs) or len(set(ys)) != len(ys):
            raise ValueError("alignment must be one-to-one")

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(sorted(self.pairs))

    def __str__(self):
        return " ".join(f"{i}-{j}" for i, j in self)

    @property
    def x_indices(self):
        return {i for i, _ in self.pairs}

    @property
    def y_indices(self):
        return {j for _, j in self.pairs}


def _content_indices(s: Sentence, stops: StopList | None):
    if stops is None:
        return [i for i in range(s.n)]
    if stops.lang != s.lang:
        raise ValueError(f"stop list is {stops.lang!r}, sentence is {s.lang!r}")
    return [i for i, t in enumerate(s.tokens) if t.normalized not in stops.words]


def _stem_match(a: str, b: str) -> bool:
    return (len(a) >= STEM_MIN_LEN and len(b) >= STEM_MIN_LEN
            and a[:STEM_PREFIX] == b[:STEM_PREFIX])


def align(x: Sentence, y: Sentence, emb: EmbeddingModel | None = None,
          stops: StopList | None = None,
          sim_threshold: float = DEFAULT_THRESHOLD) -> Alignment:
    if x.lang != y.lang:
        raise ValueError(f"cannot align {x.lang!r} with {y.lang!r}; translate first")
    free_x = _content_indices(x, stops)
    free_y = _content_indices(y, stops)
    wx = [t.normalized for t in x.tokens]
    wy = [t.normalized for t in y.tokens]
    pairs = []

    for same in (lambda a, b: a == b, _stem_match):
        for i in list(free_x):
            for j in free_y:
                if same(wx[i], wy[j]):
                    pairs.append((i, j))
                    free_x.remove(i)
                    free_y.remove(j)
                    break

    if emb is not None and free_x and free_y:
        candidates = []
        for i in free_x:
            vi = emb.vector(x.tokens[i])
            if vi is None:
                continue
            ni = np.linalg.norm(vi)
            for j in free_y:
                vj = emb.vector(y.tokens[j])
                if vj is None:
                    continue
                nj = np.linalg.norm(vj)
                if ni == 0.0 or nj == 0.0:
                    continue
                sim = float(np.dot(vi, vj) / (ni * nj))
                if sim >= sim_threshold:
                    candidates.append((-sim, i, j))
        used_x, used_y = set(), set()
        for _, i, j in sorted(candidates):
            if i not in used_x and j not in used_y:
                pairs.append((i, j))
                used_x.add(i)
                used_y.add(j)

    return Alignment(frozenset(pairs))


def _idf_mass(words, model):
    return math.fsum(idf(model, w) for w in words)


def alignment_score(x: Sentence, y: Sentence, alignment: Alignment, model: IdfModel,
                    stops: StopList | None = None) -> float:
    """idf-weighted share of aligned words, each sentence taken as a word set."""
    content_x = {x.tokens[i].normalized for i in _content_indices(x, stops)}
    content_y = {y.tokens[j].normalized for j in _content_indices(y, stops)}
    den = _idf_mass(content_x, model) + _idf_mass(content_y, model)
    if den <= 0.0:
        return 0.0
    aligned_x = {x.tokens[i].normalized for i in alignment.x_indices}
    aligned_y = {y.tokens[j].normalized for j in alignment.y_indices}
    num = _idf_mass(aligned_x, model) + _idf_mass(aligned_y, model)
    return min(1.0, max(0.0, num / den))


def score_twa(sx: Sentence, sy: Sentence, provider: TranslationProvider,
              emb: EmbeddingModel | None, idf_t: IdfModel, stops: StopList | None = None,
              threshold: float = DEFAULT_THRESHOLD, tags: TagLexicon | None = None) -> float:
    tx = translate(provider, sx, sy.lang, tags)
    return alignment_score(tx, sy, align(tx, sy, emb, stops, threshold), idf_t, stops)
