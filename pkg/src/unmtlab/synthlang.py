"""Synthetic language families with known translations.

A base language is a random lexicon of short words over an abstract
alphabet plus an order-1 Markov chain over word ids (each word has a few
allowed successors).  Every derived language shares the chain, so a
sentence is a sequence of word ids and its translation in any family
member is obtained by rendering those ids with that member's lexicon:

* a *related* language replaces a fraction of the lexicon with fresh
  words (the rest is shared letter for letter) and may write its letters
  in its own script;
* a *distant* language replaces every word and reverses word order.

Scripts are letter inventories.  Synthetic scripts live in the Private
Use Area, one block per script, and a script's romanization maps letter
``i`` to Latin letter ``i``.  Two related languages written in different
synthetic scripts therefore share no characters, and share every shared
word again once both are romanized.
"""

from __future__ import annotations

import json
import zlib
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import MonoCorpus, ParallelCorpus, Sentence, write_mono
from .translit import TranslitScheme, save_scheme, synthetic_scheme

LATIN_LETTERS = "abcdefghijklmnopqrstuvwxyz"
PUA_BASE = 0xE000
PUA_BLOCK = 0x100


class SynthError(ValueError):
    pass


@dataclass(frozen=True)
class SynthScript:
    name: str
    letters: str

    @property
    def is_latin(self) -> bool:
        return self.letters == LATIN_LETTERS[:len(self.letters)]


def latin_script(size: int = len(LATIN_LETTERS)) -> SynthScript:
    if size > len(LATIN_LETTERS):
        raise SynthError(f"latin has only {len(LATIN_LETTERS)} letters, asked for {size}")
    return SynthScript("latin", LATIN_LETTERS[:size])


def pua_script(index: int, size: int) -> SynthScript:
    """Synthetic script number ``index``: ``size`` letters from its own PUA block."""
    if not 0 < size <= PUA_BLOCK:
        raise SynthError(f"script size must be in 1..{PUA_BLOCK}")
    start = PUA_BASE + PUA_BLOCK * index
    return SynthScript(f"synth{index}", "".join(chr(start + i) for i in range(size)))


def romanization(script: SynthScript) -> TranslitScheme:
    return synthetic_scheme(script.name, list(script.letters),
                            list(LATIN_LETTERS[:len(script.letters)]))


@dataclass(frozen=True)
class SynthSpec:
    vocab_size: int = 50
    min_sentence_len: int = 4
    max_sentence_len: int = 8
    corpus_size: int = 3000
    test_size: int = 500
    alphabet_size: int = 16
    min_word_len: int = 2
    max_word_len: int = 5
    successors: int = 4
    markov_order: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.vocab_size < 2:
            raise SynthError("vocab_size must be >= 2")
        if not 1 <= self.min_sentence_len <= self.max_sentence_len:
            raise SynthError("need 1 <= min_sentence_len <= max_sentence_len")
        if not 1 <= self.min_word_len <= self.max_word_len:
            raise SynthError("need 1 <= min_word_len <= max_word_len")
        if self.corpus_size < 1 or self.test_size < 1:
            raise SynthError("corpus_size and test_size must be >= 1")
        if not 1 <= self.successors <= self.vocab_size:
            raise SynthError("successors must be in 1..vocab_size")
        if self.markov_order != 1:
            raise SynthError("only first-order word chains are supported")
        if self.alphabet_size < 2 or self.alphabet_size > len(LATIN_LETTERS):
            raise SynthError(f"alphabet_size must be in 2..{len(LATIN_LETTERS)}")


@dataclass(frozen=True)
class SynthLanguage:
    name: str
    script: SynthScript
    words: tuple[tuple[int, ...], ...]   # abstract letter ids per word id
    reverse: bool = False

    def surface(self, word_id: int) -> str:
        letters = self.script.letters
        return "".join(letters[c] for c in self.words[word_id])

    def render(self, word_ids: Sequence[int]) -> Sentence:
        toks = tuple(self.surface(w) for w in word_ids)
        return toks[::-1] if self.reverse else toks


@dataclass
class BaseState:
    """Everything needed to sample sentences and render them in any member."""
    spec: SynthSpec
    successors: np.ndarray              # (vocab_size, k) word ids
    base: SynthLanguage
    members: dict[str, SynthLanguage] = field(default_factory=dict)
    strengths: dict[str, float] = field(default_factory=dict)

    def rng(self, *purpose: str) -> np.random.Generator:
        tags = [zlib.crc32(p.encode("utf-8")) for p in purpose]
        return np.random.default_rng([self.spec.seed, *tags])

    def sample(self, count: int, *purpose: str) -> list[tuple[int, ...]]:
        rng = self.rng("sentences", *purpose)
        spec = self.spec
        out = []
        for _ in range(count):
            n = int(rng.integers(spec.min_sentence_len, spec.max_sentence_len + 1))
            w = [int(rng.integers(spec.vocab_size))]
            while len(w) < n:
                w.append(int(self.successors[w[-1], rng.integers(spec.successors)]))
            out.append(tuple(w))
        return out

    def language(self, name: str) -> SynthLanguage:
        if name == self.base.name:
            return self.base
        try:
            return self.members[name]
        except KeyError:
            raise SynthError(f"unknown synthetic language {name!r}") from None

    def mono(self, name: str, count: int | None = None, comparable: bool = False) -> MonoCorpus:
        """Monolingual sample.  By default every language draws its own
        sentences; ``comparable=True`` renders the base language's sample
        instead, so two members differ only in their lexicons."""
        lang = self.language(name)
        source = self.base.name if comparable else name
        ids = self.sample(self.spec.corpus_size if count is None else count, "mono", source)
        return MonoCorpus(name, tuple(lang.render(s) for s in ids))

    def parallel(self, src: str, tgt: str, count: int, purpose: str = "train",
                 evaluation_only: bool = False) -> ParallelCorpus:
        """Pairs of translations.  Sentences depend on the unordered language pair
        and ``purpose`` only, so A-B and B-A with the same purpose are the same set."""
        a, b = self.language(src), self.language(tgt)
        ids = self.sample(count, "parallel", purpose, *sorted((src, tgt)))
        return ParallelCorpus(src, tgt, tuple((a.render(s), b.render(s)) for s in ids),
                              evaluation_only)

    def test_set(self, src: str, tgt: str) -> ParallelCorpus:
        """Held-out ground truth shared by every condition; never for training."""
        a, b = self.language(src), self.language(tgt)
        ids = self.sample(self.spec.test_size, "test")
        return ParallelCorpus(src, tgt, tuple((a.render(s), b.render(s)) for s in ids),
                              evaluation_only=True)


def _fresh_words(rng: np.random.Generator, spec: SynthSpec, count: int,
                 taken: set[tuple[int, ...]]) -> list[tuple[int, ...]]:
    space = sum(spec.alphabet_size ** n for n in range(spec.min_word_len, spec.max_word_len + 1))
    if len(taken) + count > space // 2:
        raise SynthError(f"alphabet of {spec.alphabet_size} letters is too small for "
                         f"{len(taken) + count} distinct words")
    out = []
    while len(out) < count:
        n = int(rng.integers(spec.min_word_len, spec.max_word_len + 1))
        w = tuple(int(c) for c in rng.integers(spec.alphabet_size, size=n))
        if w not in taken:
            taken.add(w)
            out.append(w)
    return out


def _check_script(script: SynthScript, spec: SynthSpec):
    if len(script.letters) < spec.alphabet_size:
        raise SynthError(f"script {script.name} has {len(script.letters)} letters, "
                         f"lexicon needs {spec.alphabet_size}")


def _all_words(state: BaseState) -> set[tuple[int, ...]]:
    taken = set(state.base.words)
    for lang in state.members.values():
        taken.update(lang.words)
    return taken


def gen_base(spec: SynthSpec, script: SynthScript | None = None,
             name: str = "synA") -> tuple[MonoCorpus, BaseState]:
    script = script or pua_script(0, spec.alphabet_size)
    _check_script(script, spec)
    rng = np.random.default_rng([spec.seed, zlib.crc32(b"lexicon")])
    words = _fresh_words(rng, spec, spec.vocab_size, set())
    successors = np.stack([rng.choice(spec.vocab_size, size=spec.successors, replace=False)
                           for _ in range(spec.vocab_size)])
    state = BaseState(spec, successors, SynthLanguage(name, script, tuple(words)))
    return state.mono(name), state


def _register(state: BaseState, lang: SynthLanguage):
    if lang.name == state.base.name or lang.name in state.members:
        raise SynthError(f"language {lang.name!r} already exists")
    state.members[lang.name] = lang


def derive_related(state: BaseState, substitution_strength: float,
                   script: SynthScript | None = None,
                   name: str = "synR") -> tuple[MonoCorpus, ParallelCorpus]:
    """Relexify ``round(strength * vocab)`` words; the rest keep the base form."""
    if not 0.0 <= substitution_strength <= 1.0:
        raise SynthError("substitution_strength must lie in [0, 1]")
    spec = state.spec
    script = script or state.base.script
    _check_script(script, spec)
    rng = state.rng("relexify", name)
    k = int(round(substitution_strength * spec.vocab_size))
    replaced = sorted(int(i) for i in rng.choice(spec.vocab_size, size=k, replace=False))
    fresh = _fresh_words(rng, spec, k, _all_words(state))
    words = list(state.base.words)
    for i, w in zip(replaced, fresh):
        words[i] = w
    _register(state, SynthLanguage(name, script, tuple(words)))
    state.strengths[name] = substitution_strength
    return state.mono(name, comparable=True), state.test_set(state.base.name, name)


def derive_distant(state: BaseState, script: SynthScript | None = None,
                   name: str = "en") -> tuple[MonoCorpus, ParallelCorpus]:
    """Fresh lexicon, reversed word order.

    Fresh words also avoid the base forms as Latin strings, so a distant
    Latin-script language never shares a whole word with a romanized
    family member.
    """
    spec = state.spec
    script = script or latin_script()
    _check_script(script, spec)
    rng = state.rng("distant", name)
    words = _fresh_words(rng, spec, spec.vocab_size, _all_words(state))
    _register(state, SynthLanguage(name, script, tuple(words), reverse=True))
    return state.mono(name, comparable=True), state.test_set(state.base.name, name)


# --------------------------------------------------------------------------
# on-disk layout

def manifest(state: BaseState) -> dict:
    langs = {}
    for lang in [state.base, *state.members.values()]:
        langs[lang.name] = {
            "script": lang.script.name,
            "reverse": lang.reverse,
            "substitution_strength": state.strengths.get(lang.name),
            "lexicon": [lang.surface(i) for i in range(len(lang.words))],
        }
    return {
        "spec": asdict(state.spec),
        "base": state.base.name,
        "successors": state.successors.tolist(),
        "languages": langs,
    }


def write_family(state: BaseState, out_dir: str | Path) -> Path:
    """Monolingual corpora, base-to-member test pairs, romanization schemes,
    and ``manifest.json`` (seed, spec, and every lexicon as the ground-truth map)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    base = state.base.name
    schemes = {}
    for lang in [state.base, *state.members.values()]:
        write_mono(state.mono(lang.name), out / f"mono.{lang.name}")
        if lang.name != base:
            test = state.test_set(base, lang.name)
            write_mono(test.sources, out / f"test.{base}-{lang.name}.{base}")
            write_mono(test.targets, out / f"test.{base}-{lang.name}.{lang.name}")
        if not lang.script.is_latin and lang.script.name not in schemes:
            schemes[lang.script.name] = save_scheme(romanization(lang.script),
                                                    out / f"scheme.{lang.script.name}.tsv").name
    meta = manifest(state)
    meta["schemes"] = schemes
    (out / "manifest.json").write_text(json.dumps(meta, ensure_ascii=False, indent=1) + "\n",
                                       encoding="utf-8")
    return out / "manifest.json"


@dataclass(frozen=True)
class FamilyMember:
    name: str
    kind: str                  # "related" or "distant"
    script: int | str          # PUA block index, or "latin"
    substitution_strength: float = 0.0


def build_family(spec: SynthSpec, members: Sequence[FamilyMember], base_name: str = "synA",
                 base_script: int = 0) -> BaseState:
    """Convenience wrapper for JSON-described families."""
    def script_of(s):
        return latin_script() if s == "latin" else pua_script(int(s), spec.alphabet_size)

    _, state = gen_base(spec, script_of(base_script), base_name)
    for m in members:
        if m.kind == "related":
            derive_related(state, m.substitution_strength, script_of(m.script), m.name)
        elif m.kind == "distant":
            derive_distant(state, script_of(m.script), m.name)
        else:
            raise SynthError(f"unknown member kind {m.kind!r}")
    return state


def family_from_json(data: dict) -> BaseState:
    spec = SynthSpec(**data.get("spec", {}))
    members = [FamilyMember(**m) for m in data.get("members", [])]
    return build_family(spec, members, data.get("base", "synA"), data.get("base_script", 0))
