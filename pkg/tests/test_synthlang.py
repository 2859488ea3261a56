import json

import pytest

from unmtlab.similarity import overlap, profile
from unmtlab.synthlang import (PUA_BASE, FamilyMember, SynthError, SynthSpec, build_family,
                               derive_distant, derive_related, family_from_json, gen_base,
                               latin_script, pua_script, romanization, write_family)
from unmtlab.translit import romanize, validate_scheme

SMALL = SynthSpec(corpus_size=400, test_size=50, seed=3)


def latin(corpus, script):
    scheme = romanization(script)
    return [[romanize(t, scheme) for t in s] for s in corpus.sentences]


def test_same_seed_same_corpus():
    a, _ = gen_base(SMALL)
    b, _ = gen_base(SMALL)
    c, _ = gen_base(SynthSpec(corpus_size=400, test_size=50, seed=4))
    assert a == b
    assert a != c


def test_lexicon_and_lengths():
    mono, state = gen_base(SMALL)
    assert len(state.base.words) == SMALL.vocab_size
    assert len(set(state.base.words)) == SMALL.vocab_size
    assert len(mono.sentences) == SMALL.corpus_size
    for s in mono.sentences:
        assert SMALL.min_sentence_len <= len(s) <= SMALL.max_sentence_len
        for tok in s:
            assert SMALL.min_word_len <= len(tok) <= SMALL.max_word_len
            assert all(PUA_BASE <= ord(ch) < PUA_BASE + SMALL.alphabet_size for ch in tok)


def test_spec_validation():
    with pytest.raises(SynthError):
        SynthSpec(min_sentence_len=5, max_sentence_len=4)
    with pytest.raises(SynthError):
        SynthSpec(alphabet_size=40)


def test_strength_zero_same_script_is_identical():
    base, state = gen_base(SMALL)
    rel, _ = derive_related(state, 0.0)
    assert rel.sentences == base.sentences
    assert overlap(profile(base), profile(rel)) == 1.0


def test_disjoint_script_has_zero_overlap():
    base, state = gen_base(SMALL)
    for strength in (0.0, 0.5):
        rel, _ = derive_related(state, strength, pua_script(1, 16), name=f"r{strength}")
        assert overlap(profile(base), profile(rel)) == 0.0
        # once both sides are romanized the shared words come back
        rom = overlap(profile(latin(base, state.base.script)),
                      profile(latin(rel, state.members[f"r{strength}"].script)))
        assert rom > 0.3


def test_overlap_monotone_in_strength():
    base, state = gen_base(SMALL)
    scores = []
    for strength in (0, .25, .5, .75, 1):
        rel, _ = derive_related(state, strength, name=f"s{strength}")
        scores.append(overlap(profile(base), profile(rel)))
    assert scores[0] == 1.0
    assert all(a >= b for a, b in zip(scores, scores[1:])), scores
    assert scores[-1] < 0.2


def test_related_relexifies_exact_fraction():
    _, state = gen_base(SMALL)
    derive_related(state, 0.3, name="r")
    changed = sum(a != b for a, b in zip(state.base.words, state.members["r"].words))
    assert changed == round(0.3 * SMALL.vocab_size)
    assert len(set(state.members["r"].words)) == SMALL.vocab_size
    with pytest.raises(SynthError):
        derive_related(state, 1.5, name="bad")
    with pytest.raises(SynthError):
        derive_related(state, 0.1, name="r")


def test_distant_pair():
    base, state = gen_base(SMALL)
    dst, test = derive_distant(state)
    assert overlap(profile(base), profile(dst)) == 0.0
    assert test.evaluation_only and len(test.pairs) == SMALL.test_size
    lang = state.members["en"]
    assert not set(lang.words) & set(state.base.words)
    # ground truth inverts: map each base word to its id, then render reversed
    index = {state.base.surface(i): i for i in range(SMALL.vocab_size)}
    for src, tgt in test.pairs:
        assert tgt == tuple(lang.surface(index[w]) for w in reversed(src))


def test_related_ground_truth_inverts():
    _, state = gen_base(SMALL)
    _, test = derive_related(state, 0.5, pua_script(2, 16), name="r")
    index = {state.base.surface(i): i for i in range(SMALL.vocab_size)}
    lang = state.members["r"]
    for src, tgt in test.pairs:
        assert tgt == tuple(lang.surface(index[w]) for w in src)


def test_inventory_too_small():
    spec = SynthSpec(vocab_size=50, alphabet_size=2, min_word_len=2, max_word_len=3)
    with pytest.raises(SynthError):
        gen_base(spec)
    _, state = gen_base(SMALL)
    with pytest.raises(SynthError):
        derive_distant(state, latin_script(8))


def test_parallel_depends_on_pair_and_purpose_only():
    _, state = gen_base(SMALL)
    derive_related(state, 0.5, name="r")
    ab = state.parallel("synA", "r", 30)
    ba = state.parallel("r", "synA", 30)
    assert [(t, s) for s, t in ab.pairs] == list(ba.pairs)
    assert state.parallel("synA", "r", 30, "valid").pairs != ab.pairs


def test_romanization_scheme_is_valid():
    assert validate_scheme(romanization(pua_script(3, 16))).ok


def test_write_family(tmp_path):
    state = family_from_json({
        "spec": {"corpus_size": 100, "test_size": 20, "seed": 9},
        "members": [{"name": "rel", "kind": "related", "script": 1,
                     "substitution_strength": 0.5},
                    {"name": "dst", "kind": "distant", "script": "latin"}],
    })
    meta_path = write_family(state, tmp_path)
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["manifest.json", "mono.dst", "mono.rel", "mono.synA",
                     "scheme.synth0.tsv", "scheme.synth1.tsv",
                     "test.synA-dst.dst", "test.synA-dst.synA",
                     "test.synA-rel.rel", "test.synA-rel.synA"]
    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    assert meta["spec"]["seed"] == 9
    assert meta["languages"]["rel"]["substitution_strength"] == 0.5
    assert len(meta["languages"]["dst"]["lexicon"]) == 50
    again = build_family(SynthSpec(corpus_size=100, test_size=20, seed=9),
                         [FamilyMember("rel", "related", 1, 0.5),
                          FamilyMember("dst", "distant", "latin")])
    assert again.mono("dst") == state.mono("dst")
    lines = (tmp_path / "test.synA-dst.dst").read_text(encoding="utf-8").splitlines()
    assert len(lines) == 20
