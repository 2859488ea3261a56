"""Monolingual and parallel corpora: loading, tokenizing, detokenizing.

Every sentence is a tuple of tokens and every corpus carries exactly one
language code per side.  Corpora are frozen after construction.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

Sentence = tuple[str, ...]


class CorpusError(ValueError):
    pass


def _check_lang(lang: str) -> str:
    if not isinstance(lang, str) or not lang:
        raise CorpusError(f"language code must be a non-empty string, got {lang!r}")
    return lang


@dataclass(frozen=True)
class MonoCorpus:
    lang: str
    sentences: tuple[Sentence, ...]
    # ground-truth material that may be scored against but never trained on
    evaluation_only: bool = False

    def __post_init__(self):
        _check_lang(self.lang)
        for i, s in enumerate(self.sentences):
            if not s:
                raise CorpusError(f"{self.lang}: sentence {i} is empty")

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self) -> Iterator[Sentence]:
        return iter(self.sentences)

    @property
    def num_tokens(self) -> int:
        return sum(len(s) for s in self.sentences)


@dataclass(frozen=True)
class ParallelCorpus:
    src_lang: str
    tgt_lang: str
    pairs: tuple[tuple[Sentence, Sentence], ...]
    evaluation_only: bool = False

    def __post_init__(self):
        _check_lang(self.src_lang)
        _check_lang(self.tgt_lang)
        for i, (s, t) in enumerate(self.pairs):
            if not s or not t:
                raise CorpusError(f"{self.src_lang}-{self.tgt_lang}: pair {i} has an empty side")

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def sources(self) -> tuple[Sentence, ...]:
        return tuple(p[0] for p in self.pairs)

    @property
    def targets(self) -> tuple[Sentence, ...]:
        return tuple(p[1] for p in self.pairs)

    def side(self, lang: str) -> tuple[Sentence, ...]:
        if lang == self.src_lang:
            return self.sources
        if lang == self.tgt_lang:
            return self.targets
        raise CorpusError(f"{lang!r} is not a side of {self.src_lang}-{self.tgt_lang}")

    def reversed(self) -> "ParallelCorpus":
        return ParallelCorpus(self.tgt_lang, self.src_lang,
                              tuple((t, s) for s, t in self.pairs), self.evaluation_only)


# --------------------------------------------------------------------------
# tokenization

def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def tokenize(line: str, lang: str | None = None) -> list[str]:
    """Whitespace split, then peel leading/trailing punctuation into single-char tokens.

    The same rule applies to every language; ``lang`` is accepted for
    call-site symmetry only.  Internal punctuation ("don't", "www.x.com")
    stays inside its word.
    """
    out: list[str] = []
    for piece in line.split():
        i, j = 0, len(piece)
        while i < j and _is_punct(piece[i]):
            i += 1
        while j > i and _is_punct(piece[j - 1]):
            j -= 1
        out.extend(piece[:i])
        if i < j:
            out.append(piece[i:j])
        out.extend(piece[j:])
    return out


def detokenize(tokens: Sequence[str]) -> str:
    """Join with single spaces, gluing punctuation tokens to their predecessor."""
    parts: list[str] = []
    for tok in tokens:
        if parts and len(tok) == 1 and _is_punct(tok):
            parts[-1] += tok
        else:
            parts.append(tok)
    return " ".join(parts)


# --------------------------------------------------------------------------
# loading

def _read_lines(path: str | Path) -> list[str]:
    """Decode line by line so an encoding error can name its line."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise CorpusError(f"cannot read {path}: {exc}") from exc
    lines = []
    for lineno, chunk in enumerate(raw.splitlines(), start=1):
        try:
            lines.append(chunk.decode("utf-8"))
        except UnicodeDecodeError as exc:
            raise CorpusError(f"{path}:{lineno}: invalid UTF-8 ({exc.reason})") from None
    return lines


def sentences_from_lines(lines: Iterable[str], lang: str) -> tuple[Sentence, ...]:
    return tuple(tuple(tokenize(line, lang)) for line in lines if line.strip())


def mono_from_lines(lines: Iterable[str], lang: str) -> MonoCorpus:
    return MonoCorpus(lang, sentences_from_lines(lines, lang))


def load_mono(path: str | Path, lang: str) -> MonoCorpus:
    """One sentence per line; blank lines dropped, order kept."""
    return mono_from_lines(_read_lines(path), _check_lang(lang))


def _pairs_from_lines(src_lines, tgt_lines, src_lang, tgt_lang):
    pairs = []
    for s, t in zip(src_lines, tgt_lines):
        if s.strip() and t.strip():
            pairs.append((tuple(tokenize(s, src_lang)), tuple(tokenize(t, tgt_lang))))
    return ParallelCorpus(src_lang, tgt_lang, tuple(pairs))


def load_parallel(src_path: str | Path, tgt_path: str | Path,
                  src_lang: str, tgt_lang: str) -> ParallelCorpus:
    """Line-aligned pair of files; a pair with a blank side is dropped as a whole."""
    src_lines = _read_lines(src_path)
    tgt_lines = _read_lines(tgt_path)
    if len(src_lines) != len(tgt_lines):
        raise CorpusError(f"line count mismatch: {src_path} has {len(src_lines)} lines, "
                          f"{tgt_path} has {len(tgt_lines)}")
    return _pairs_from_lines(src_lines, tgt_lines, _check_lang(src_lang), _check_lang(tgt_lang))


def load_parallel_tsv(path: str | Path, src_lang: str, tgt_lang: str) -> ParallelCorpus:
    """Single-file form: ``source<TAB>target`` per line, exactly one tab."""
    src_lines, tgt_lines = [], []
    for lineno, line in enumerate(_read_lines(path), start=1):
        if not line.strip():
            continue
        if line.count("\t") != 1:
            raise CorpusError(f"{path}:{lineno}: expected exactly one tab, "
                              f"found {line.count(chr(9))}")
        s, t = line.split("\t")
        src_lines.append(s)
        tgt_lines.append(t)
    return _pairs_from_lines(src_lines, tgt_lines, _check_lang(src_lang), _check_lang(tgt_lang))


def write_mono(corpus: MonoCorpus | Iterable[Sequence[str]], path: str | Path) -> Path:
    path = Path(path)
    sents = corpus.sentences if isinstance(corpus, MonoCorpus) else corpus
    path.write_text("".join(detokenize(s) + "\n" for s in sents), encoding="utf-8")
    return path
