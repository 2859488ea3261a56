import pytest
from hypothesis import given, strategies as st

from unmtlab.corpus import (CorpusError, MonoCorpus, ParallelCorpus, detokenize, load_mono,
                            load_parallel, load_parallel_tsv, tokenize)


def test_tokenize_examples():
    assert tokenize("") == []
    assert tokenize("hello, world.") == ["hello", ",", "world", "."]
    assert tokenize('"(quoted)"') == ['"', "(", "quoted", ")", '"']
    # internal punctuation stays inside the word
    assert tokenize("don't visit www.site.com!") == ["don't", "visit", "www.site.com", "!"]


def test_detokenize_examples():
    assert detokenize([]) == ""
    assert detokenize(["hello", ",", "world"]) == "hello, world"


words = st.text(alphabet="abcdefghij", min_size=1, max_size=6)
punct = st.sampled_from([",", ".", "!", "?", ";", ":"])


@given(st.lists(st.tuples(words, st.one_of(st.none(), punct)), min_size=1, max_size=8))
def test_detokenize_inverts_tokenize(items):
    text = " ".join(w + (p or "") for w, p in items)
    toks = tokenize(text)
    assert all(toks)
    assert detokenize(toks) == text
    assert tokenize(" ".join(toks)) == toks


def test_load_mono_drops_blank_lines(tmp_path):
    f = tmp_path / "m.txt"
    f.write_text("a b\n\n  \nc\nd e f\n", encoding="utf-8")
    corpus = load_mono(f, "xx")
    assert corpus.sentences == (("a", "b"), ("c",), ("d", "e", "f"))
    assert corpus.num_tokens == 6


def test_load_mono_large_file_counts(tmp_path):
    f = tmp_path / "big.txt"
    lines = [("w%d x" % i) if i % 7 else "" for i in range(200_000)]
    f.write_text("\n".join(lines) + "\n", encoding="utf-8")
    expected = sum(1 for line in open(f, encoding="utf-8") if line.strip())
    assert len(load_mono(f, "xx")) == expected


def test_invalid_utf8_names_line(tmp_path):
    f = tmp_path / "bad.txt"
    f.write_bytes(b"ok\nfine\n\xff\xfe broken\n")
    with pytest.raises(CorpusError, match=":3:"):
        load_mono(f, "xx")


def test_unreadable_file(tmp_path):
    with pytest.raises(CorpusError, match="cannot read"):
        load_mono(tmp_path / "missing.txt", "xx")


def test_parallel_blank_pair_dropped(tmp_path):
    s, t = tmp_path / "s", tmp_path / "t"
    s.write_text("a\nb\nc\n", encoding="utf-8")
    t.write_text("A\n\nC\n", encoding="utf-8")
    corpus = load_parallel(s, t, "x", "y")
    assert corpus.pairs == ((("a",), ("A",)), (("c",), ("C",)))
    assert corpus.side("y") == (("A",), ("C",))
    assert corpus.reversed().src_lang == "y"


def test_parallel_count_mismatch(tmp_path):
    s, t = tmp_path / "s", tmp_path / "t"
    s.write_text("a\n" * 10, encoding="utf-8")
    t.write_text("b\n" * 11, encoding="utf-8")
    with pytest.raises(CorpusError, match="10.*11"):
        load_parallel(s, t, "x", "y")


def test_parallel_tsv(tmp_path):
    f = tmp_path / "p.tsv"
    f.write_text("a b\tA B\nc\tC\n", encoding="utf-8")
    assert len(load_parallel_tsv(f, "x", "y")) == 2
    f.write_text("a\tb\tc\n", encoding="utf-8")
    with pytest.raises(CorpusError, match="exactly one tab"):
        load_parallel_tsv(f, "x", "y")


def test_corpus_invariants():
    with pytest.raises(CorpusError):
        MonoCorpus("", (("a",),))
    with pytest.raises(CorpusError):
        MonoCorpus("x", ((),))
    with pytest.raises(CorpusError):
        ParallelCorpus("x", "y", ((("a",), ()),))
