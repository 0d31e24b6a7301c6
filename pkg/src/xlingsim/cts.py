"""
Conceptual thesaurus similarity: a weighted Jaccard ratio over the words of
each sentence that find a counterpart in the other sentence through the
bilingual lexicon or embedding neighbours.

A content word of one sentence is *matched* when its concept set (its
target-language expansions, or the word itself for target-language text)
shares an element with the concept sets of the other sentence. The score is

    (weight(matched_x) + weight(matched_y)) / (weight(content_x) + weight(content_y))

where weight sums `phi` over distinct content words, using each word's own
language idf model. Because numerator words are a subset of denominator
words the ratio stays in [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from .resources import BilingualLexicon, EmbeddingModel, Resources, expand_word
from .text_core import Sentence, StopList, Token, distinct, filter_stops
from .weighting import IdfModel, WeightParams, phi


@dataclass(frozen=True)
class ConceptBag:
    origin: Sentence
    content: tuple[Token, ...]
    expansion: Mapping[str, frozenset]

    def concepts(self) -> set[str]:
        out = set()
        for targets in self.expansion.values():
            out |= targets
        return out

    def __len__(self):
        return len(self.content)


def build_concept_bag(s: Sentence, lex: BilingualLexicon, emb: EmbeddingModel | None,
                      stops: StopList | None, k: int = 10) -> ConceptBag:
    content = tuple(distinct(filter_stops(s.tokens, stops)))
    if s.lang == lex.tgt_lang:
        expansion = {t.normalized: frozenset([t.normalized]) for t in content}
    elif s.lang == lex.src_lang:
        expansion = {t.normalized: frozenset(expand_word(t, lex, emb, k)) for t in content}
    else:
        raise ValueError(f"lexicon covers {lex.src_lang}->{lex.tgt_lang}, "
                         f"sentence is {s.lang!r}")
    return ConceptBag(s, content, expansion)


def match_bags(bx: ConceptBag, by: ConceptBag) -> tuple[list[Token], list[Token]]:
    """Content words of each bag whose concepts meet the other bag's."""
    pool_x, pool_y = bx.concepts(), by.concepts()
    mx = [t for t in bx.content if bx.expansion[t.normalized] & pool_y]
    my = [t for t in by.content if by.expansion[t.normalized] & pool_x]
    return mx, my


def _omega(tokens, model, params):
    return math.fsum(phi(t, model, params) for t in tokens)


def score_bags(bx: ConceptBag, by: ConceptBag, params: WeightParams,
               idf_x: IdfModel, idf_y: IdfModel) -> float:
    mx, my = match_bags(bx, by)
    den = _omega(bx.content, idf_x, params) + _omega(by.content, idf_y, params)
    if den <= 0.0:
        return 0.0
    num = _omega(mx, idf_x, params) + _omega(my, idf_y, params)
    return min(1.0, max(0.0, num / den))


def score_cts(sx: Sentence, sy: Sentence, resources: Resources, params: WeightParams,
              idf_x: IdfModel, idf_y: IdfModel) -> float:
    lex, emb, k = resources.lexicon, resources.embeddings, resources.k
    bx = build_concept_bag(sx, lex, emb, resources.stops.get(sx.lang), k)
    by = build_concept_bag(sy, lex, emb, resources.stops.get(sy.lang), k)
    return score_bags(bx, by, params, idf_x, idf_y)
