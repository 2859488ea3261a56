"""Byte-pair encoding: learning merges, segmenting, and reverting.

Words are split into characters and the end-of-word marker is glued onto
the last character, so ``"low"`` starts as ``l o w</w>``.  Learning
repeatedly merges the most frequent adjacent pair (ties go to the
lexicographically smallest pair) and stops early once no pair occurs at
least twice.  Because every segmented word ends in exactly one symbol
carrying the marker, ``revert_bpe`` can rebuild the token sequence
without any other information.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import MonoCorpus
from .model import SPECIAL_TOKENS, UNK

MARKER = "</w>"
FORMAT_VERSION = 1
DESK_MERGES = 500
REAL_DATA_MERGES = 10_000

Pair = tuple[str, str]


class BpeError(ValueError):
    pass


def _initial_symbols(word: str, marker: str) -> tuple[str, ...]:
    if not word:
        raise BpeError("cannot segment an empty token")
    if marker in word:
        raise BpeError(f"token {word!r} contains the reserved marker {marker!r}")
    return tuple(word[:-1]) + (word[-1] + marker,)


def _merge_word(symbols: tuple[str, ...], pair: Pair) -> tuple[str, ...]:
    a, b = pair
    out = []
    i = 0
    while i < len(symbols):
        if i + 1 < len(symbols) and symbols[i] == a and symbols[i + 1] == b:
            out.append(a + b)
            i += 2
        else:
            out.append(symbols[i])
            i += 1
    return tuple(out)


@dataclass(frozen=True)
class BpeModel:
    merges: tuple[Pair, ...]
    marker: str = MARKER
    # starting symbols seen at learning time (characters, and characters + marker)
    inventory: frozenset[str] = frozenset()
    _ranks: Mapping[Pair, int] = field(init=False, repr=False, compare=False)
    _cache: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        ranks = {}
        for i, pair in enumerate(self.merges):
            if pair in ranks:
                raise BpeError(f"duplicate merge {pair} at positions {ranks[pair]} and {i}")
            ranks[pair] = i
        object.__setattr__(self, "_ranks", ranks)
        object.__setattr__(self, "_cache", {})

    @property
    def vocab(self) -> frozenset[str]:
        return self.inventory | {a + b for a, b in self.merges}

    def segment(self, word: str) -> tuple[str, ...]:
        hit = self._cache.get(word)
        if hit is not None:
            return hit
        symbols = _initial_symbols(word, self.marker)
        ranks = self._ranks
        while len(symbols) > 1:
            best = None
            for pair in zip(symbols, symbols[1:]):
                r = ranks.get(pair)
                if r is not None and (best is None or r < best[0]):
                    best = (r, pair)
            if best is None:
                break
            symbols = _merge_word(symbols, best[1])
        self._cache[word] = symbols
        return symbols


def _word_counts(corpora: Iterable[MonoCorpus | Iterable[Sequence[str]]]) -> Counter[str]:
    counts: Counter[str] = Counter()
    for corpus in corpora:
        sents = corpus.sentences if isinstance(corpus, MonoCorpus) else corpus
        for sent in sents:
            counts.update(sent)
    return counts


def learn_bpe(corpora: Sequence[MonoCorpus | Iterable[Sequence[str]]], num_merges: int,
              marker: str = MARKER) -> BpeModel:
    """One joint model over all given corpora."""
    if num_merges < 0:
        raise BpeError(f"num_merges must be >= 0, got {num_merges}")
    counts = _word_counts(corpora)
    if not counts:
        raise BpeError("cannot learn BPE from empty corpora")

    words = sorted(counts)
    freqs = [counts[w] for w in words]
    segs = [_initial_symbols(w, marker) for w in words]
    inventory = frozenset(s for seg in segs for s in seg)

    pair_counts: Counter[Pair] = Counter()
    where: dict[Pair, set[int]] = defaultdict(set)
    for i, seg in enumerate(segs):
        for pair in zip(seg, seg[1:]):
            pair_counts[pair] += freqs[i]
            where[pair].add(i)

    merges: list[Pair] = []
    while len(merges) < num_merges and pair_counts:
        best = min(pair_counts, key=lambda p: (-pair_counts[p], p))
        if pair_counts[best] < 2:
            break
        merges.append(best)
        for i in sorted(where.pop(best, ())):
            old = segs[i]
            new = _merge_word(old, best)
            for pair in zip(old, old[1:]):
                pair_counts[pair] -= freqs[i]
                if pair_counts[pair] <= 0:
                    del pair_counts[pair]
            for pair in zip(new, new[1:]):
                pair_counts[pair] += freqs[i]
                where[pair].add(i)
            segs[i] = new
        pair_counts.pop(best, None)
    return BpeModel(tuple(merges), marker, inventory)


def apply_bpe(tokens: Sequence[str], model: BpeModel) -> list[str]:
    out: list[str] = []
    for tok in tokens:
        out.extend(model.segment(tok))
    return out


def revert_bpe(subwords: Sequence[str], marker: str = MARKER) -> list[str]:
    tokens: list[str] = []
    buf: list[str] = []
    for i, sym in enumerate(subwords):
        pos = sym.find(marker)
        if pos == -1:
            buf.append(sym)
            continue
        if pos != len(sym) - len(marker) or pos == 0:
            raise BpeError(f"malformed marker placement in symbol {i}: {sym!r}")
        buf.append(sym[:pos])
        tokens.append("".join(buf))
        buf = []
    if buf:
        raise BpeError(f"subword sequence ends without a word marker: {buf!r}")
    return tokens


def revert_bpe_lenient(subwords: Sequence[str], marker: str = MARKER) -> list[str]:
    """Like ``revert_bpe`` but for model output: stray special symbols are
    dropped and an unterminated tail still becomes a word."""
    tokens: list[str] = []
    buf: list[str] = []
    for sym in subwords:
        if sym in SPECIAL_TOKENS:
            continue
        if sym.endswith(marker):
            buf.append(sym[:-len(marker)])
            word = "".join(buf)
            if word:
                tokens.append(word)
            buf = []
        else:
            buf.append(sym)
    if buf:
        tokens.append("".join(buf))
    return tokens


# --------------------------------------------------------------------------
# model files

def format_bpe(model: BpeModel) -> str:
    lines = [f"#bpe version={FORMAT_VERSION} marker={model.marker}"]
    lines.append("#inventory " + " ".join(sorted(model.inventory)))
    lines += [f"{a} {b}" for a, b in model.merges]
    return "\n".join(lines) + "\n"


def parse_bpe(text: str, source: str = "<string>") -> BpeModel:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#bpe "):
        raise BpeError(f"{source}: missing '#bpe' header line")
    header = dict(kv.split("=", 1) for kv in lines[0].split()[1:])
    if int(header.get("version", -1)) != FORMAT_VERSION:
        raise BpeError(f"{source}: unsupported version {header.get('version')}")
    marker = header.get("marker", MARKER)
    inventory: frozenset[str] = frozenset()
    merges = []
    for lineno, line in enumerate(lines[1:], start=2):
        if line.startswith("#inventory"):
            inventory = frozenset(line.split()[1:])
            continue
        if not line.strip():
            continue
        parts = line.split(" ")
        if len(parts) != 2 or not all(parts):
            raise BpeError(f"{source}:{lineno}: expected 'left right'")
        merges.append((parts[0], parts[1]))
    return BpeModel(tuple(merges), marker, inventory)


def save_bpe(model: BpeModel, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(format_bpe(model), encoding="utf-8")
    return path


def load_bpe(path: str | Path) -> BpeModel:
    path = Path(path)
    return parse_bpe(path.read_text(encoding="utf-8"), str(path))


# --------------------------------------------------------------------------
# id vocabulary

@dataclass(frozen=True)
class Vocab:
    """Subword symbols to model ids; the reserved specials occupy ids 0..4."""
    symbols: tuple[str, ...]
    _index: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if tuple(self.symbols[:len(SPECIAL_TOKENS)]) != SPECIAL_TOKENS:
            raise BpeError("vocabulary must start with the special tokens")
        if len(set(self.symbols)) != len(self.symbols):
            raise BpeError("vocabulary symbols must be unique")
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.symbols)})

    @classmethod
    def build(cls, segmented: Iterable[Sequence[str]]) -> "Vocab":
        """Every symbol that occurs, in sorted order after the specials."""
        seen = {s for sent in segmented for s in sent}
        seen.difference_update(SPECIAL_TOKENS)
        return cls(SPECIAL_TOKENS + tuple(sorted(seen)))

    def __len__(self) -> int:
        return len(self.symbols)

    def encode(self, subwords: Sequence[str]) -> list[int]:
        idx = self._index
        return [idx.get(s, UNK) for s in subwords]

    def decode(self, ids: Sequence[int]) -> list[str]:
        return [self.symbols[i] for i in ids]

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text("".join(s + "\n" for s in self.symbols), encoding="utf-8")
        return path

    @classmethod
    def load(cls, path: str | Path) -> "Vocab":
        return cls(tuple(Path(path).read_text(encoding="utf-8").splitlines()))
