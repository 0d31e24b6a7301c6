import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import numpy as np
import pytest

from xlingsim.errors import InvalidResource, ParseError, TranslationMissing
from xlingsim.resources import (BilingualLexicon, EmbeddingModel, FileTranslationProvider,
                                IdentityProvider, RemoteTranslationProvider, expand_word,
                                load_embeddings, load_lexicon, top_k_neighbors, translate)
from xlingsim.text_core import Token, analyze


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


def test_load_lexicon(tmp_path):
    lex = load_lexicon(write(tmp_path / "a.tsv", "gato\tcat\n"))
    assert lex.entries == {"gato": {"cat"}}
    lex = load_lexicon(write(tmp_path / "b.tsv", "gato\tcat\nGato\tkitty\ngato\tcat\n"))
    assert lex.entries == {"gato": {"cat", "kitty"}}
    with pytest.raises(ParseError) as err:
        load_lexicon(write(tmp_path / "c.tsv", "gato\n"))
    assert err.value.line == 1


def test_lexicon_reversed():
    lex = BilingualLexicon("es", "en", {"gato": frozenset({"cat", "kitty"})})
    back = lex.reversed()
    assert (back.src_lang, back.tgt_lang) == ("en", "es")
    assert back.entries == {"cat": {"gato"}, "kitty": {"gato"}}


def test_load_embeddings(tmp_path):
    src = write(tmp_path / "es.txt", "2 3\ngato 1 0 0\nperro 0 1 0\n")
    tgt = write(tmp_path / "en.txt", "1 3\ncat 1 0 0\n")
    model = load_embeddings(src, tgt)
    assert model.dim == 3 and len(model.src_vocab) == 2 and len(model.tgt_vocab) == 1
    bad_dim = write(tmp_path / "en4.txt", "1 4\ncat 1 0 0 0\n")
    with pytest.raises(InvalidResource):
        load_embeddings(src, bad_dim)
    short = write(tmp_path / "short.txt", "1 3\ncat 1 0\n")
    with pytest.raises(ParseError) as err:
        load_embeddings(src, short)
    assert err.value.line == 2


def toy(tgt=None, src=None):
    tgt = tgt or {"a": [1.0, 0.0], "b": [0.0, 1.0]}
    src = src or {"q": [1.0, 0.0]}
    return EmbeddingModel(2, {w: np.array(v) for w, v in src.items()},
                          {w: np.array(v) for w, v in tgt.items()})


def test_top_k_neighbors():
    model = toy()
    assert top_k_neighbors(model, "absent", True, 3) == []
    assert top_k_neighbors(model, "q", True, 1) == [("a", pytest.approx(1.0))]
    model = toy({"a": [1, 0], "b": [1, 1], "c": [0, 1]})
    got = top_k_neighbors(model, "q", True, 10)
    assert [w for w, _ in got] == ["a", "b", "c"]
    assert [s for _, s in got] == pytest.approx([1.0, 2 ** -0.5, 0.0])


def test_top_k_ties_and_self_exclusion():
    model = toy({"b": [1, 0], "a": [2, 0], "c": [0, 1]})
    assert [w for w, _ in top_k_neighbors(model, "q", True, 2)] == ["a", "b"]
    assert [w for w, _ in top_k_neighbors(model, "a", False, 5)] == ["b", "c"]


def test_top_k_sorted_and_bounded():
    rng = np.random.default_rng(3)
    tgt = {f"w{i}": rng.normal(size=2).tolist() for i in range(30)}
    model = toy(tgt)
    for k in (1, 5, 40):
        got = top_k_neighbors(model, "q", True, k)
        assert len(got) == min(k, 30)
        sims = [s for _, s in got]
        assert sims == sorted(sims, reverse=True)


def test_expand_word():
    lex = BilingualLexicon("es", "en", {"gato": frozenset({"cat"})})
    gato = Token("gato", "gato", "es")
    assert expand_word(gato, lex, None) == {"cat"}
    assert expand_word(Token("zzz", "zzz", "es"), BilingualLexicon("es", "en"), None) == set()
    emb = toy({"feline": [1, 0], "car": [0, 1]}, {"gato": [1, 0.01]})
    assert expand_word(gato, lex, emb, k=1) == {"cat", "feline"}


def test_file_translation(tmp_path):
    table = write(tmp_path / "t.tsv", "el gato\tthe cat\n")
    provider = FileTranslationProvider.load(table)
    out = translate(provider, analyze("el gato", "es"), "en")
    assert out.raw == "the cat" and out.lang == "en" and out.words() == ["the", "cat"]
    with pytest.raises(TranslationMissing) as err:
        translate(provider, analyze("el perro", "es"), "en")
    assert "el perro" in str(err.value)


def test_same_language_is_identity():
    s = analyze("the cat", "en")
    assert translate(FileTranslationProvider({}), s, "en") is s
    assert translate(IdentityProvider(), analyze("hola", "es"), "en").raw == "hola"


class _Handler(BaseHTTPRequestHandler):
    def do_POST(self):
        body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        reply = {"translatedText": body["q"].upper()} if body["q"] != "fail" else {}
        data = json.dumps(reply).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):
        pass


def test_remote_provider():
    server = HTTPServer(("127.0.0.1", 0), _Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        provider = RemoteTranslationProvider(f"http://127.0.0.1:{server.server_port}/translate")
        assert provider.translate_text("el gato", "es", "en") == "EL GATO"
        assert provider.translate_text("el gato", "es", "en") == "EL GATO"
        with pytest.raises(TranslationMissing):
            provider.translate_text("fail", "es", "en")
    finally:
        server.shutdown()
