import random

import pytest
from hypothesis import given, strategies as st

from oracles import brute_bleu, brute_distance
from unmtlab.metrics import MetricError, bleu, bleu_stats, character_ter, evaluate, levenshtein


def random_corpus(rng, size):
    vocab = "a b c d e f g".split()
    hyps, refs = [], []
    for _ in range(size):
        refs.append([rng.choice(vocab) for _ in range(rng.randint(1, 9))])
        hyps.append([rng.choice(vocab) for _ in range(rng.randint(0, 9))])
    return hyps, refs


def test_bleu_matches_oracle_on_random_corpora():
    rng = random.Random(12)
    for _ in range(50):
        hyps, refs = random_corpus(rng, rng.randint(1, 20))
        assert abs(bleu(hyps, refs) - brute_bleu(hyps, refs)) < 1e-9


def test_character_ter_matches_oracle_on_random_corpora():
    rng = random.Random(13)
    for _ in range(50):
        hyps, refs = random_corpus(rng, rng.randint(1, 10))
        dist = sum(brute_distance(" ".join(h), " ".join(r)) for h, r in zip(hyps, refs))
        norm = sum(max(len(" ".join(h)), 1) for h in hyps)
        assert character_ter(hyps, refs) == dist / norm


def test_identity_scores():
    corpus = [["the", "cat", "sat", "down"], ["a", "b", "c", "d", "e"]]
    report = evaluate(corpus, corpus)
    assert report.bleu == 100.0
    assert report.character_ter == 0.0


def test_no_shared_unigram_is_small_but_positive():
    hyps = [["x", "y", "z", "w", "v"]] * 8
    refs = [["a", "b", "c", "d", "e"]] * 8
    assert 0 < bleu(hyps, refs) < 1
    # on a single short sentence the smoothed pseudo-counts stay large
    assert 1 < bleu([["x", "y", "z", "w"]], [["a", "b", "c", "d"]]) < 10


def test_hand_character_ter():
    assert character_ter(["abc"], ["abd"]) == pytest.approx(1 / 3)
    # empty hypothesis counts as length 1
    assert character_ter([""], ["abcd"]) == 4.0


def test_errors():
    with pytest.raises(MetricError):
        bleu([["a"]], [])
    with pytest.raises(MetricError):
        bleu([["a"]], [[]])
    with pytest.raises(MetricError):
        character_ter(["a", "b"], ["a"])


def test_stats_precisions():
    stats = bleu_stats([["a", "b", "c", "d"]], [["a", "b", "x", "d"]])
    assert stats.matches == (3, 1, 0, 0)
    assert stats.totals == (4, 3, 2, 1)
    assert stats.precisions == pytest.approx((75.0, 100 / 3, 100 / 4, 100 / 4))


sent = st.lists(st.sampled_from("abcde"), min_size=1, max_size=8)


@given(st.lists(st.tuples(sent, sent), min_size=1, max_size=10), st.randoms())
def test_bleu_permutation_invariant(pairs, rnd):
    hyps, refs = zip(*pairs)
    shuffled = list(pairs)
    rnd.shuffle(shuffled)
    h2, r2 = zip(*shuffled)
    assert bleu(hyps, refs) == pytest.approx(bleu(h2, r2), abs=1e-12)
    assert 0 <= bleu(hyps, refs) <= 100


words = st.text(alphabet="abc ", max_size=12)


@given(words, words, words)
def test_levenshtein_triangle(a, b, c):
    assert levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c)
    assert levenshtein(a, b) == brute_distance(a, b) == levenshtein(b, a)
