"""Embedding similarity: cosine between phi-weighted sums of word vectors."""

from __future__ import annotations

from typing import Iterable, Mapping

import numpy as np

from .resources import EmbeddingModel
from .text_core import Sentence, StopList, Token, filter_stops
from .weighting import IdfModel, WeightParams, phi


def sentence_vector(tokens: Sentence | Iterable[Token], emb: EmbeddingModel,
                    model: IdfModel, params: WeightParams) -> np.ndarray:
    """Sum of vector(w) * phi(w); words without a vector are skipped."""
    if isinstance(tokens, Sentence):
        tokens = tokens.tokens
    v = np.zeros(emb.dim)
    for tok in tokens:
        vec = emb.vector(tok)
        if vec is not None:
            v += vec * phi(tok, model, params)
    return v


def vector_cosine(a: np.ndarray, b: np.ndarray) -> float:
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


def score_wes(sx: Sentence, sy: Sentence, emb: EmbeddingModel, idf_x: IdfModel,
              idf_y: IdfModel, params: WeightParams,
              stops: Mapping[str, StopList] | None = None) -> float:
    """Cosine of the two sentence vectors, negative values clamped to 0."""
    stops = stops or {}
    vx = sentence_vector(filter_stops(sx.tokens, stops.get(sx.lang)), emb, idf_x, params)
    vy = sentence_vector(filter_stops(sy.tokens, stops.get(sy.lang)), emb, idf_y, params)
    return min(1.0, max(0.0, vector_cosine(vx, vy)))
