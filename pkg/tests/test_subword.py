from collections import Counter

import pytest
from hypothesis import given, strategies as st

from unmtlab.model import SPECIAL_TOKENS, UNK
from unmtlab.subword import (MARKER, BpeError, BpeModel, Vocab, apply_bpe, format_bpe, learn_bpe,
                             parse_bpe, revert_bpe, revert_bpe_lenient)


def naive_bpe(word_counts, num_merges):
    """Reference learner: recount every pair from scratch each iteration."""
    segs = {w: tuple(w[:-1]) + (w[-1] + MARKER,) for w in word_counts}
    merges = []
    for _ in range(num_merges):
        pairs = Counter()
        for w, seg in segs.items():
            for p in zip(seg, seg[1:]):
                pairs[p] += word_counts[w]
        if not pairs:
            break
        best = sorted(pairs.items(), key=lambda kv: (-kv[1], kv[0]))[0]
        if best[1] < 2:
            break
        merges.append(best[0])
        for w, seg in segs.items():
            out, i = [], 0
            while i < len(seg):
                if i + 1 < len(seg) and (seg[i], seg[i + 1]) == best[0]:
                    out.append(seg[i] + seg[i + 1])
                    i += 2
                else:
                    out.append(seg[i])
                    i += 1
            segs[w] = tuple(out)
    return merges, segs


def test_first_merge_hand_example():
    model = learn_bpe([[("aaab", "aab")]], 1)
    # (a,a) occurs 2 + 1 = 3 times; (a,b</w>) twice
    assert model.merges == (("a", "a"),)


def test_zero_merges_gives_characters():
    model = learn_bpe([[("hello",)]], 0)
    assert apply_bpe(["hello"], model) == ["h", "e", "l", "l", "o" + MARKER]


def test_errors():
    with pytest.raises(BpeError):
        learn_bpe([], 10)
    with pytest.raises(BpeError):
        learn_bpe([[("a",)]], -1)
    with pytest.raises(BpeError):
        learn_bpe([[("a" + MARKER,)]], 1)
    with pytest.raises(BpeError):
        revert_bpe(["ab", "c"])
    with pytest.raises(BpeError):
        revert_bpe(["a" + MARKER + "b"])
    with pytest.raises(BpeError):
        BpeModel((("a", "b"), ("a", "b")))


words = st.text(alphabet="abcdxyz", min_size=1, max_size=8)
corpora = st.lists(st.lists(words, min_size=1, max_size=6).map(tuple), min_size=1, max_size=30)


@given(corpora, st.integers(0, 40))
def test_matches_naive_learner(corpus, merges):
    counts = Counter(w for s in corpus for w in s)
    ref_merges, ref_segs = naive_bpe(counts, merges)
    model = learn_bpe([corpus], merges)
    assert list(model.merges) == ref_merges
    for w, seg in ref_segs.items():
        assert model.segment(w) == seg


@given(corpora, st.lists(st.text(alphabet="abcdefxyz", min_size=1, max_size=10), max_size=12))
def test_revert_inverts_apply(corpus, tokens):
    model = learn_bpe([corpus], 30)
    assert revert_bpe(apply_bpe(tokens, model)) == tokens


@given(corpora)
def test_more_merges_never_lengthen(corpus):
    lengths = [sum(len(apply_bpe(s, learn_bpe([corpus], k))) for s in corpus) for k in (0, 5, 10, 40)]
    assert lengths == sorted(lengths, reverse=True)


@given(corpora, st.integers(0, 50))
def test_vocab_bound(corpus, merges):
    model = learn_bpe([corpus], merges)
    assert len(model.vocab) <= len(model.inventory) + merges


def test_unseen_characters_stay_single():
    model = learn_bpe([[("abab", "abab")]], 10)
    assert apply_bpe(["qrs"], model) == ["q", "r", "s" + MARKER]


def test_deterministic_and_file_round_trip():
    corpus = [("low", "lower", "newest", "widest")] * 3
    a, b = learn_bpe([corpus], 20), learn_bpe([corpus], 20)
    assert a.merges == b.merges
    again = parse_bpe(format_bpe(a))
    assert again.merges == a.merges and again.inventory == a.inventory
    assert format_bpe(a).splitlines()[0] == f"#bpe version=1 marker={MARKER}"
    with pytest.raises(BpeError):
        parse_bpe("a b\n")


def test_hello_world_round_trip():
    model = learn_bpe([[("hello", "world")]], 5)
    assert revert_bpe(apply_bpe(["hello", "world"], model)) == ["hello", "world"]
    assert revert_bpe([]) == []


def test_lenient_revert_tolerates_model_output():
    assert revert_bpe_lenient(["he", "<unk>", "llo" + MARKER, "wor"]) == ["hello", "wor"]


def test_vocab():
    v = Vocab.build([["b" + MARKER, "a"], ["a"]])
    assert v.symbols[:len(SPECIAL_TOKENS)] == SPECIAL_TOKENS
    assert v.encode(["a", "zzz"]) == [len(SPECIAL_TOKENS), UNK]
    assert v.decode(v.encode(["a", "b" + MARKER])) == ["a", "b" + MARKER]
