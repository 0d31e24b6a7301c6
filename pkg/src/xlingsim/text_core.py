"""
Text normalization, tokenization and light-weight tagging.

Every similarity method works on the same normalized alphabet: lowercase
ASCII letters, digits and single spaces. Characters outside that alphabet
(accented letters included) are deleted, not transliterated, so
"Qué" becomes "qu".
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping

from .errors import ParseError

UNIVERSAL_TAGS = (
    "ADJ", "ADP", "ADV", "CONJ", "DET", "NOUN",
    "NUM", "PRON", "PRT", "VERB", "X", "PUNCT",
)
UNKNOWN = "UNKNOWN"

_OUTSIDE_ALPHABET = re.compile(r"[^a-z0-9 ]")
_SPACES = re.compile(r" +")
_WHITESPACE = re.compile(r"\s")


@dataclass(frozen=True)
class Token:
    surface: str
    normalized: str
    lang: str = ""
    pos: str = UNKNOWN

    def __str__(self):
        if self.pos == UNKNOWN:
            return self.normalized
        return f"{self.normalized}/{self.pos}"


@dataclass(frozen=True)
class Sentence:
    lang: str
    raw: str
    tokens: tuple[Token, ...] = ()

    @property
    def n(self) -> int:
        return len(self.tokens)

    @property
    def normalized(self) -> str:
        return " ".join(t.normalized for t in self.tokens)

    def words(self) -> list[str]:
        return [t.normalized for t in self.tokens]


@dataclass(frozen=True)
class StopList:
    lang: str
    words: frozenset[str] = field(default_factory=frozenset)

    def __contains__(self, word):
        return word in self.words


@dataclass(frozen=True)
class TagLexicon:
    lang: str
    entries: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        bad = {tag for tag in self.entries.values() if tag not in UNIVERSAL_TAGS}
        if bad:
            raise ValueError(f"unknown POS tags in lexicon: {sorted(bad)}")

    def tag(self, word: str) -> str:
        return self.entries.get(word, "X")


def normalize_text(raw: str) -> str:
    """Lowercase `raw` and keep only a-z, 0-9 and single inner spaces."""
    text = _WHITESPACE.sub(" ", raw.lower())
    text = _OUTSIDE_ALPHABET.sub("", text)
    return _SPACES.sub(" ", text).strip()


def tokenize(normalized: str, lang: str = "") -> list[Token]:
    return [Token(surface=w, normalized=w, lang=lang) for w in normalized.split(" ") if w]


def char_ngrams(normalized: str, n: int) -> Counter:
    """Multiset of the contiguous length-`n` substrings, spaces included."""
    if n < 1:
        raise ValueError(f"n-gram size must be >= 1, got {n}")
    return Counter(normalized[i:i + n] for i in range(len(normalized) - n + 1))


def _check_lang(tokens, lang, what):
    for tok in tokens:
        if tok.lang != lang:
            raise ValueError(
                f"{what} is for language {lang!r} but token {tok.surface!r} is {tok.lang!r}")


def filter_stops(tokens: Iterable[Token], stops: StopList | None) -> list[Token]:
    tokens = list(tokens)
    if stops is None:
        return tokens
    _check_lang(tokens, stops.lang, "stop list")
    return [t for t in tokens if t.normalized not in stops.words]


def pos_tag(tokens: Iterable[Token], lex: TagLexicon) -> list[Token]:
    """Set each token's tag from `lex`; words missing from it are tagged X."""
    tokens = list(tokens)
    _check_lang(tokens, lex.lang, "tag lexicon")
    return [replace(t, pos=lex.tag(t.normalized)) for t in tokens]


def analyze(raw: str, lang: str, tags: TagLexicon | None = None) -> Sentence:
    """Normalize, tokenize and (optionally) tag a raw sentence."""
    tokens = tokenize(normalize_text(raw), lang)
    if tags is not None:
        tokens = pos_tag(tokens, tags)
    return Sentence(lang=lang, raw=raw, tokens=tuple(tokens))


def load_stoplist(path, lang: str) -> StopList:
    words = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        word = normalize_text(line)
        if word:
            words.add(word)
    return StopList(lang=lang, words=frozenset(words))


def load_tag_lexicon(path, lang: str) -> TagLexicon:
    # later duplicates override earlier ones
    entries = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ParseError("expected 'word<TAB>TAG'", path, lineno)
        word, tag = normalize_text(parts[0]), parts[1].strip()
        if tag == ".":
            tag = "PUNCT"
        if tag not in UNIVERSAL_TAGS:
            raise ParseError(f"unknown POS tag {tag!r}", path, lineno)
        if word:
            entries[word] = tag
    return TagLexicon(lang=lang, entries=entries)


def distinct(tokens: Iterable[Token]) -> list[Token]:
    """First occurrence of each normalized form, in sentence order."""
    seen = set()
    out = []
    for tok in tokens:
        if tok.normalized not in seen:
            seen.add(tok.normalized)
            out.append(tok)
    return out
