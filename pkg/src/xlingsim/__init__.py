"""Cross-language semantic textual similarity toolkit."""

from .c3g import score_c3g
from .cts import build_concept_bag, score_cts
from .evaluation import StsDataset, kfold_cv, load_dataset, pearson, rescale_0_5, tune_params
from .fusion import (LinearModel, ModelTree, average_fusion, predict_linear,
                     predict_model_tree, train_linear, train_model_tree)
from .resources import (BilingualLexicon, EmbeddingModel, FileTranslationProvider,
                        IdentityProvider, Resources, expand_word, load_embeddings,
                        load_lexicon, top_k_neighbors, translate)
from .text_core import (Sentence, StopList, TagLexicon, Token, analyze, char_ngrams,
                        filter_stops, normalize_text, pos_tag, tokenize)
from .twa import Alignment, align, score_twa
from .weighting import IdfModel, WeightParams, build_idf, cosine, idf, phi, tfidf_vector
from .wes import score_wes, sentence_vector

__version__ = "0.1.0"


__all__ = [
    "Alignment",
    "BilingualLexicon",
    "EmbeddingModel",
    "FileTranslationProvider",
    "IdentityProvider",
    "IdfModel",
    "LinearModel",
    "ModelTree",
    "Resources",
    "Sentence",
    "StopList",
    "StsDataset",
    "TagLexicon",
    "Token",
    "WeightParams",
    "align",
    "analyze",
    "average_fusion",
    "build_concept_bag",
    "build_idf",
    "char_ngrams",
    "cosine",
    "expand_word",
    "filter_stops",
    "idf",
    "kfold_cv",
    "load_dataset",
    "load_embeddings",
    "load_lexicon",
    "normalize_text",
    "pearson",
    "phi",
    "pos_tag",
    "predict_linear",
    "predict_model_tree",
    "rescale_0_5",
    "score_c3g",
    "score_cts",
    "score_twa",
    "score_wes",
    "sentence_vector",
    "tfidf_vector",
    "tokenize",
    "top_k_neighbors",
    "train_linear",
    "train_model_tree",
    "translate",
    "tune_params",
]
