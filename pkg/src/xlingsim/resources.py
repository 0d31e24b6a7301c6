"""
Bilingual resources: a translation lexicon, a shared bilingual embedding
space and sentence translation providers.
"""

from __future__ import annotations

import json
import threading
import urllib.request
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import InvalidResource, ParseError, TranslationMissing
from .text_core import Sentence, StopList, TagLexicon, Token, analyze, normalize_text

DEFAULT_NEIGHBORS = 10


@dataclass(frozen=True)
class BilingualLexicon:
    src_lang: str
    tgt_lang: str
    entries: Mapping[str, frozenset] = field(default_factory=dict)

    def translations(self, word: str) -> frozenset:
        return self.entries.get(word, frozenset())

    def reversed(self) -> BilingualLexicon:
        back = {}
        for src, targets in self.entries.items():
            for tgt in targets:
                back.setdefault(tgt, set()).add(src)
        return BilingualLexicon(self.tgt_lang, self.src_lang,
                                {w: frozenset(ts) for w, ts in back.items()})

    def __len__(self):
        return len(self.entries)


def load_lexicon(path, src_lang="es", tgt_lang="en") -> BilingualLexicon:
    entries = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ParseError("expected 'src_word<TAB>tgt_word'", path, lineno)
        src, tgt = normalize_text(parts[0]), normalize_text(parts[1])
        if src and tgt:
            entries.setdefault(src, set()).add(tgt)
    return BilingualLexicon(src_lang, tgt_lang,
                            {w: frozenset(ts) for w, ts in entries.items()})


@dataclass(frozen=True, eq=False)
class EmbeddingModel:
    """Source and target vocabularies living in one vector space."""

    dim: int
    src_vocab: Mapping[str, np.ndarray]
    tgt_vocab: Mapping[str, np.ndarray]
    src_lang: str = "es"
    tgt_lang: str = "en"

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidResource(f"embedding dimension must be >= 1, got {self.dim}")
        for vocab in (self.src_vocab, self.tgt_vocab):
            for word, vec in vocab.items():
                if len(vec) != self.dim:
                    raise InvalidResource(
                        f"vector for {word!r} has length {len(vec)}, expected {self.dim}")

    def vocab(self, src_side: bool) -> Mapping[str, np.ndarray]:
        return self.src_vocab if src_side else self.tgt_vocab

    def is_src(self, lang: str) -> bool:
        # a monolingual model (src_lang == tgt_lang) answers from the target side
        return lang == self.src_lang and lang != self.tgt_lang

    def vector(self, token: Token):
        """Vector for a token, looked up on the side of its language (or None)."""
        return self.vocab(self.is_src(token.lang)).get(token.normalized)

    @cached_property
    def _target_index(self):
        words = sorted(self.tgt_vocab)
        if not words:
            return words, np.zeros((0, self.dim))
        mat = np.array([self.tgt_vocab[w] for w in words], dtype=float)
        norms = np.linalg.norm(mat, axis=1)
        norms[norms == 0.0] = 1.0
        return words, mat / norms[:, None]


def _read_vectors(path):
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ParseError("empty embedding file", path, 1)
    head = lines[0].split()
    try:
        count, dim = int(head[0]), int(head[1])
        if len(head) != 2:
            raise ValueError
    except (ValueError, IndexError):
        raise ParseError("expected header 'vocab_size dim'", path, 1) from None
    vocab = {}
    for lineno, line in enumerate(lines[1:], 2):
        parts = line.rstrip().split(" ")
        if not line.strip():
            continue
        if len(parts) != dim + 1:
            raise ParseError(f"expected {dim} values, got {len(parts) - 1}", path, lineno)
        try:
            vec = np.array([float(v) for v in parts[1:]])
        except ValueError:
            raise ParseError("non-numeric vector component", path, lineno) from None
        word = normalize_text(parts[0])
        if word:
            vocab[word] = vec
    if len(vocab) > count:
        raise ParseError(f"header announces {count} words, found {len(vocab)}", path, 1)
    return dim, vocab


def load_embeddings(src_path, tgt_path, src_lang="es", tgt_lang="en") -> EmbeddingModel:
    src_dim, src_vocab = _read_vectors(src_path)
    tgt_dim, tgt_vocab = _read_vectors(tgt_path)
    if src_dim != tgt_dim:
        raise InvalidResource(
            f"embedding dimensions differ: {src_path} has {src_dim}, {tgt_path} has {tgt_dim}")
    return EmbeddingModel(src_dim, src_vocab, tgt_vocab, src_lang, tgt_lang)


def top_k_neighbors(model: EmbeddingModel, word: str, src_side: bool,
                    k: int = DEFAULT_NEIGHBORS) -> list[tuple[str, float]]:
    """Exact k nearest target-side words by cosine.

    The query word is excluded from its own neighbours when it is itself a
    target-side word. Ties are broken alphabetically.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    query = model.vocab(src_side).get(word)
    if query is None:
        return []
    words, mat = model._target_index
    if not words:
        return []
    qn = np.linalg.norm(query)
    sims = mat @ (query / qn) if qn > 0 else np.zeros(len(words))
    sims = np.clip(sims, -1.0, 1.0)
    order = sorted(range(len(words)), key=lambda i: (-sims[i], words[i]))
    out = []
    for i in order:
        if not src_side and words[i] == word:
            continue
        out.append((words[i], float(sims[i])))
        if len(out) == k:
            break
    return out


def expand_word(word: Token, lex: BilingualLexicon, emb: EmbeddingModel | None,
                k: int = DEFAULT_NEIGHBORS) -> set[str]:
    """All target-language words a source word may stand for."""
    out = set(lex.translations(word.normalized))
    if emb is not None:
        out.update(w for w, _ in top_k_neighbors(emb, word.normalized, True, k))
    return out


class TranslationProvider:
    """Translates raw sentence text from one language to another."""

    def translate_text(self, text: str, src: str, tgt: str) -> str:
        raise NotImplementedError


class IdentityProvider(TranslationProvider):
    """Returns the text unchanged; useful when both sides share a language."""

    def translate_text(self, text, src, tgt):
        return text


class FileTranslationProvider(TranslationProvider):
    """Exact-match lookup in a table of pre-computed translations."""

    def __init__(self, table: Mapping[str, str], src_lang="es", tgt_lang="en"):
        self.table = dict(table)
        self.src_lang = src_lang
        self.tgt_lang = tgt_lang

    @classmethod
    def load(cls, path, src_lang="es", tgt_lang="en"):
        table = {}
        text = Path(path).read_text(encoding="utf-8")
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ParseError("expected 'source<TAB>translation'", path, lineno)
            table[parts[0]] = parts[1]
        return cls(table, src_lang, tgt_lang)

    def translate_text(self, text, src, tgt):
        if (src, tgt) != (self.src_lang, self.tgt_lang):
            raise ValueError(f"translation table covers {self.src_lang}->{self.tgt_lang}, "
                             f"not {src}->{tgt}")
        try:
            return self.table[text]
        except KeyError:
            raise TranslationMissing(text) from None


class RemoteTranslationProvider(TranslationProvider):
    """Client for a JSON translation endpoint (LibreTranslate request shape).

    POSTs {"q", "source", "target"} and reads "translatedText". Results are
    cached so repeated calls within one run stay deterministic.
    """

    def __init__(self, url: str, timeout: float = 30.0, api_key: str | None = None):
        self.url = url
        self.timeout = timeout
        self.api_key = api_key
        self._cache = {}
        self._lock = threading.Lock()

    def translate_text(self, text, src, tgt):
        key = (text, src, tgt)
        with self._lock:
            if key in self._cache:
                return self._cache[key]
            payload = {"q": text, "source": src, "target": tgt, "format": "text"}
            if self.api_key:
                payload["api_key"] = self.api_key
            req = urllib.request.Request(
                self.url, data=json.dumps(payload).encode("utf-8"),
                headers={"Content-Type": "application/json"}, method="POST")
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                body = json.loads(resp.read().decode("utf-8"))
            result = body.get("translatedText")
            if result is None:
                raise TranslationMissing(text)
            self._cache[key] = result
            return result


def translate(provider: TranslationProvider, sentence: Sentence, tgt: str,
              tags: TagLexicon | None = None) -> Sentence:
    if sentence.lang == tgt:
        return sentence
    text = provider.translate_text(sentence.raw, sentence.lang, tgt)
    return analyze(text, tgt, tags)


@dataclass
class Resources:
    """Everything the concept-matching and alignment methods look things up in."""

    lexicon: BilingualLexicon
    embeddings: EmbeddingModel | None = None
    stops: Mapping[str, StopList] = field(default_factory=dict)
    tags: Mapping[str, TagLexicon] = field(default_factory=dict)
    provider: TranslationProvider | None = None
    k: int = DEFAULT_NEIGHBORS

    @property
    def src_lang(self):
        return self.lexicon.src_lang

    @property
    def tgt_lang(self):
        return self.lexicon.tgt_lang
