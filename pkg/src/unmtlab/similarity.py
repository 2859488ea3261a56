"""Character n-gram profiles and the frequency-weighted overlap score.

``overlap`` sums, over the union of n-grams seen in either profile, the
smaller of the two frequencies, and divides by the sum of the larger
ones.  Identical profiles score 1, profiles with no common n-gram score 0,
and n-grams that are frequent on both sides dominate rare shared ones.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import MonoCorpus

DEFAULT_N = 3


@dataclass(frozen=True)
class NgramProfile:
    n: int
    counts: Mapping[str, int]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n-gram length must be >= 1, got {self.n}")
        for gram, c in self.counts.items():
            if len(gram) != self.n or c < 1:
                raise ValueError(f"bad profile entry {gram!r}: {c}")

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def __len__(self) -> int:
        return len(self.counts)


def profile_tokens(tokens: Iterable[str], n: int = DEFAULT_N) -> NgramProfile:
    """Count every length-``n`` window inside each token; windows never span tokens."""
    if n < 1:
        raise ValueError(f"n-gram length must be >= 1, got {n}")
    counts: Counter[str] = Counter()
    for tok in tokens:
        for i in range(len(tok) - n + 1):
            counts[tok[i:i + n]] += 1
    return NgramProfile(n, dict(counts))


def profile(corpus: MonoCorpus | Iterable[Sequence[str]], n: int = DEFAULT_N) -> NgramProfile:
    sents = corpus.sentences if isinstance(corpus, MonoCorpus) else corpus
    return profile_tokens((tok for s in sents for tok in s), n)


def overlap_counts(pa: NgramProfile, pb: NgramProfile) -> tuple[int, int]:
    """``(sum of min counts, sum of max counts)`` over the union of n-grams."""
    if pa.n != pb.n:
        raise ValueError(f"profiles use different n ({pa.n} vs {pb.n})")
    if not pa.counts and not pb.counts:
        raise ValueError("overlap of two empty profiles is undefined")
    a, b = pa.counts, pb.counts
    shared = 0
    for gram, ca in a.items():
        cb = b.get(gram)
        if cb is not None:
            shared += min(ca, cb)
    # sum(max) = sum(a) + sum(b) - sum(min) over the union
    return shared, pa.total + pb.total - shared


def overlap(pa: NgramProfile, pb: NgramProfile) -> float:
    shared, union = overlap_counts(pa, pb)
    return shared / union


def pairwise_matrix(corpora: Sequence[MonoCorpus | Iterable[Sequence[str]]],
                    n: int = DEFAULT_N) -> np.ndarray:
    """Symmetric matrix of overlaps with a unit diagonal."""
    if len(corpora) < 2:
        raise ValueError("need at least two corpora")
    profiles = []
    for i, c in enumerate(corpora):
        p = profile(c, n)
        if not p.counts:
            raise ValueError(f"corpus {i} has no {n}-grams")
        profiles.append(p)
    k = len(profiles)
    mat = np.eye(k)
    for i in range(k):
        for j in range(i + 1, k):
            mat[i, j] = mat[j, i] = overlap(profiles[i], profiles[j])
    return mat


def format_matrix(labels: Sequence[str], mat: np.ndarray) -> str:
    """Percentages to one decimal, tab separated, with a header row."""
    lines = ["\t" + "\t".join(labels)]
    for lab, row in zip(labels, mat):
        lines.append(lab + "\t" + "\t".join(f"{100 * v:.1f}" for v in row))
    return "\n".join(lines) + "\n"
