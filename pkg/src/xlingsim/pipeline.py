"""Run configuration and per-pair feature extraction shared by the CLI."""

from __future__ import annotations

import configparser
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import c3g, cts, twa, wes
from .errors import InvalidResource
from .evaluation import StsDataset
from .fusion import AVERAGE_METHODS, DEFAULT_MIN_LEAF, METHODS, ModelTree, average_fusion
from .resources import (BilingualLexicon, FileTranslationProvider, Resources,
                        RemoteTranslationProvider, load_embeddings, load_lexicon, translate)
from .text_core import Sentence, load_stoplist, load_tag_lexicon
from .weighting import DEFAULT_K, IdfModel, WeightParams, build_idf

CONFIG_ENV = "XLINGSIM_CONFIG"

PATH_KEYS = ("lexicon", "emb_src", "emb_tgt", "stops_src", "stops_tgt", "tags_src",
             "tags_tgt", "translations", "idf_src", "idf_tgt", "idf_ngram", "idf_twa",
             "params", "model")

RUN_PRESETS = {
    1: ("cts",),
    2: AVERAGE_METHODS,
    3: METHODS,
}


@dataclass
class RunConfig:
    src_lang: str = "es"
    tgt_lang: str = "en"
    paths: dict[str, Path] = field(default_factory=dict)
    translate_url: str | None = None
    k: int = 10
    ngram: int = 3
    tf_k: float = DEFAULT_K
    threshold: float = twa.DEFAULT_THRESHOLD
    min_leaf: int = DEFAULT_MIN_LEAF
    prune: bool = True
    smoothing: bool = False

    def path(self, key):
        return self.paths.get(key)

    def check_paths(self):
        for key, p in self.paths.items():
            if not p.is_file():
                raise FileNotFoundError(f"{key}: no such file {p}")


def load_config(path=None, overrides: dict | None = None) -> RunConfig:
    """Read a flat `key = value` file; `overrides` (from flags) win."""
    path = path or os.environ.get(CONFIG_ENV)
    values = {}
    base = Path.cwd()
    if path:
        parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
        text = Path(path).read_text(encoding="utf-8")
        parser.read_string("[run]\n" + text, source=str(path))
        values = {k: v.strip().strip('"') for k, v in parser["run"].items()}
        base = Path(path).resolve().parent
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value
    cfg = RunConfig()
    for key, value in values.items():
        if key in PATH_KEYS:
            p = Path(value)
            cfg.paths[key] = p if p.is_absolute() else base / p
        elif key in ("src_lang", "tgt_lang", "translate_url"):
            setattr(cfg, key, str(value))
        elif key in ("k", "ngram", "min_leaf"):
            setattr(cfg, key, int(value))
        elif key in ("tf_k", "threshold"):
            setattr(cfg, key, float(value))
        elif key in ("prune", "smoothing"):
            setattr(cfg, key, str(value).lower() in ("1", "true", "yes", "on"))
        else:
            raise ValueError(f"unknown configuration key {key!r}")
    return cfg


def load_resources(cfg: RunConfig) -> Resources:
    cfg.check_paths()
    src, tgt = cfg.src_lang, cfg.tgt_lang
    p = cfg.path
    lexicon = (load_lexicon(p("lexicon"), src, tgt) if p("lexicon")
               else BilingualLexicon(src, tgt, {}))
    embeddings = None
    if p("emb_src") or p("emb_tgt"):
        if not (p("emb_src") and p("emb_tgt")):
            raise InvalidResource("embeddings need both emb_src and emb_tgt")
        embeddings = load_embeddings(p("emb_src"), p("emb_tgt"), src, tgt)
    stops = {lang: load_stoplist(p(key), lang)
             for lang, key in ((src, "stops_src"), (tgt, "stops_tgt")) if p(key)}
    tags = {lang: load_tag_lexicon(p(key), lang)
            for lang, key in ((src, "tags_src"), (tgt, "tags_tgt")) if p(key)}
    provider = None
    if p("translations"):
        provider = FileTranslationProvider.load(p("translations"), src, tgt)
    elif cfg.translate_url:
        provider = RemoteTranslationProvider(cfg.translate_url)
    return Resources(lexicon, embeddings, stops, tags, provider, cfg.k)


def word_sets(sentences: Sequence[Sentence]):
    return [s.words() for s in sentences]


@dataclass
class Scorer:
    """Scores sentence pairs with any of the four methods."""

    resources: Resources
    params: WeightParams
    idf_src: IdfModel
    idf_tgt: IdfModel
    idf_ngram: IdfModel
    idf_twa: IdfModel | None = None
    ngram: int = c3g.DEFAULT_N
    tf_k: float = DEFAULT_K
    threshold: float = twa.DEFAULT_THRESHOLD

    def _idf_for(self, s: Sentence):
        return self.idf_src if s.lang == self.resources.src_lang else self.idf_tgt

    def score(self, method: str, src: Sentence, tgt: Sentence, params=None) -> float:
        params = params or self.params
        res = self.resources
        if method == "c3g":
            return c3g.score_c3g(src, tgt, self.idf_ngram, self.ngram, self.tf_k)
        if method == "cts":
            return cts.score_cts(src, tgt, res, params, self._idf_for(src), self._idf_for(tgt))
        if method == "wes":
            if res.embeddings is None:
                raise InvalidResource("the wes method needs embeddings")
            return wes.score_wes(src, tgt, res.embeddings, self._idf_for(src),
                                 self._idf_for(tgt), params, res.stops)
        if method == "twa":
            if res.provider is None and src.lang != tgt.lang:
                raise InvalidResource("the twa method needs a translation provider")
            return twa.score_twa(src, tgt, res.provider, res.embeddings, self.idf_twa,
                                 res.stops.get(tgt.lang), self.threshold,
                                 res.tags.get(tgt.lang))
        raise ValueError(f"unknown method {method!r}")

    def features(self, dataset: StsDataset, methods: Sequence[str] = METHODS,
                 threads: int = 1) -> np.ndarray:
        """Matrix of scores, one row per pair, one column per method."""
        def row(pair):
            return [self.score(m, pair[0], pair[1]) for m in methods]

        if threads > 1:
            with ThreadPoolExecutor(threads) as pool:
                rows = list(pool.map(row, dataset.pairs))
        else:
            rows = [row(p) for p in dataset.pairs]
        return np.array(rows, dtype=float).reshape(len(dataset), len(methods))


def translated_targets(dataset: StsDataset, resources: Resources) -> list[Sentence]:
    """Target sentences plus source sentences translated to the target language."""
    tgt = resources.tgt_lang
    tags = resources.tags.get(tgt)
    out = []
    for src, other in dataset.pairs:
        out.append(translate(resources.provider, src, tgt, tags) if src.lang != tgt else src)
        out.append(other)
    return out


def build_idf_models(dataset: StsDataset, resources: Resources, ngram: int = c3g.DEFAULT_N,
                     need_twa: bool = True) -> dict[str, IdfModel]:
    """idf models built directly on the data being scored."""
    if len(dataset) == 0:
        raise ValueError("cannot build idf models from an empty dataset")
    models = {
        "idf_src": build_idf(word_sets(dataset.sentences(0))),
        "idf_tgt": build_idf(word_sets(dataset.sentences(1))),
        "idf_ngram": c3g.build_ngram_idf(dataset.sentences(), ngram),
    }
    if need_twa and resources.provider is not None:
        models["idf_twa"] = build_idf(word_sets(translated_targets(dataset, resources)))
    return models


def make_scorer(cfg: RunConfig, resources: Resources, dataset: StsDataset,
                methods: Sequence[str] = METHODS) -> Scorer:
    params = WeightParams.load(cfg.path("params")) if cfg.path("params") else WeightParams()
    idf = {}
    missing = [k for k in ("idf_src", "idf_tgt", "idf_ngram", "idf_twa") if not cfg.path(k)]
    if missing and len(dataset):
        idf = build_idf_models(dataset, resources, cfg.ngram, need_twa="twa" in methods)
    for key in ("idf_src", "idf_tgt", "idf_ngram", "idf_twa"):
        if cfg.path(key):
            idf[key] = IdfModel.load(cfg.path(key))
    empty = IdfModel(1, {})
    return Scorer(resources, params,
                  idf.get("idf_src", empty), idf.get("idf_tgt", empty),
                  idf.get("idf_ngram", empty), idf.get("idf_twa", idf.get("idf_tgt", empty)),
                  cfg.ngram, cfg.tf_k, cfg.threshold)


def fuse(features: np.ndarray, methods: Sequence[str], run: int | None,
         tree: ModelTree | None = None) -> np.ndarray:
    """Per-pair scores in [0, 1] for a run preset, or the single method given."""
    if run is None:
        return np.clip(features[:, 0], 0.0, 1.0)
    if run == 1:
        return features[:, methods.index("cts")]
    if run == 2:
        cols = [methods.index(m) for m in AVERAGE_METHODS]
        return np.array([average_fusion(row) for row in features[:, cols]])
    if run == 3:
        if tree is None:
            raise ValueError("run 3 needs a trained model tree")
        return np.clip(tree.predict(features), 0.0, 1.0)
    raise ValueError(f"unknown run preset {run}")
