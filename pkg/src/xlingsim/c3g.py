"""Character n-gram similarity: cosine between tf.idf vectors of 3-grams."""

from __future__ import annotations

from typing import Iterable

from .text_core import Sentence, char_ngrams, normalize_text
from .weighting import DEFAULT_K, IdfModel, build_idf, cosine, tfidf_vector

DEFAULT_N = 3


def sentence_ngrams(s: Sentence, n: int = DEFAULT_N):
    return char_ngrams(normalize_text(s.raw), n)


def build_ngram_idf(sentences: Iterable[Sentence], n: int = DEFAULT_N) -> IdfModel:
    """One document per sentence; both languages share the model."""
    return build_idf(sentence_ngrams(s, n) for s in sentences)


def ngram_vector(s: Sentence, model: IdfModel, n: int = DEFAULT_N, K: float = DEFAULT_K):
    return tfidf_vector(sentence_ngrams(s, n), model, K)


def score_c3g(src: Sentence, tgt: Sentence, model: IdfModel,
              n: int = DEFAULT_N, K: float = DEFAULT_K) -> float:
    score = cosine(ngram_vector(src, model, n, K), ngram_vector(tgt, model, n, K))
    return min(1.0, max(0.0, score))
