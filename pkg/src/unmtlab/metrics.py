"""Corpus BLEU and a shift-free character edit rate.

BLEU follows the usual corpus-level recipe: clipped n-gram matches for
n = 1..4 summed over the corpus, exponential smoothing of zero-match
orders (each one halves the pseudo-count of the previous), geometric
mean, brevity penalty.  Scores are on the tokens as given.

``character_ter`` is plain character Levenshtein distance on the
detokenized strings, summed over the corpus and divided by the summed
hypothesis lengths.  It has no shift operation, unlike the published
characTER, so scores run somewhat higher on reordered output.  An empty
hypothesis counts as length 1, so it contributes the full reference
length as its rate.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .corpus import detokenize

MAX_ORDER = 4


class MetricError(ValueError):
    pass


@dataclass(frozen=True)
class BleuStats:
    matches: tuple[int, ...]
    totals: tuple[int, ...]
    hyp_len: int
    ref_len: int

    @property
    def precisions(self) -> tuple[float, ...]:
        """Smoothed per-order precisions in percent, as used in the score."""
        out = []
        smooth = 1.0
        for m, t in zip(self.matches, self.totals):
            if t == 0:
                out.append(0.0)
            elif m == 0:
                smooth *= 2
                out.append(100.0 / (smooth * t))
            else:
                out.append(100.0 * m / t)
        return tuple(out)

    @property
    def brevity_penalty(self) -> float:
        if self.hyp_len == 0:
            return 0.0
        if self.hyp_len >= self.ref_len:
            return 1.0
        return math.exp(1.0 - self.ref_len / self.hyp_len)

    @property
    def score(self) -> float:
        precisions = self.precisions
        if min(precisions) <= 0.0:
            return 0.0
        log_mean = sum(math.log(p) for p in precisions) / len(precisions)
        # exp(log(100)) overshoots 100 by an ulp
        return min(100.0, self.brevity_penalty * math.exp(log_mean))


@dataclass(frozen=True)
class EvalReport:
    bleu: float
    character_ter: float
    sentences: int
    stats: BleuStats

    def tsv(self) -> str:
        return f"{self.bleu:.2f}\t{self.character_ter:.4f}"

    def verbose(self) -> str:
        prec = "/".join(f"{p:.1f}" for p in self.stats.precisions)
        return (f"bleu\t{self.bleu:.2f}\ncharacter_ter\t{self.character_ter:.4f}\n"
                f"sentences\t{self.sentences}\nprecisions\t{prec}\n"
                f"brevity_penalty\t{self.stats.brevity_penalty:.4f}\n"
                f"hyp_len\t{self.stats.hyp_len}\nref_len\t{self.stats.ref_len}")


def _check_pairs(hypotheses, references):
    if len(hypotheses) != len(references):
        raise MetricError(f"{len(hypotheses)} hypotheses but {len(references)} references")
    if not references:
        raise MetricError("need at least one sentence pair")
    for i, ref in enumerate(references):
        if len(ref) == 0:
            raise MetricError(f"reference {i} is empty")


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu_stats(hypotheses: Sequence[Sequence[str]],
               references: Sequence[Sequence[str]]) -> BleuStats:
    _check_pairs(hypotheses, references)
    matches = [0] * MAX_ORDER
    totals = [0] * MAX_ORDER
    hyp_len = ref_len = 0
    for hyp, ref in zip(hypotheses, references):
        hyp_len += len(hyp)
        ref_len += len(ref)
        for n in range(1, MAX_ORDER + 1):
            h = _ngrams(hyp, n)
            r = _ngrams(ref, n)
            matches[n - 1] += sum(min(c, r[g]) for g, c in h.items())
            totals[n - 1] += max(len(hyp) - n + 1, 0)
    return BleuStats(tuple(matches), tuple(totals), hyp_len, ref_len)


def bleu(hypotheses: Sequence[Sequence[str]], references: Sequence[Sequence[str]]) -> float:
    return bleu_stats(hypotheses, references).score


def levenshtein(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def _as_text(x: str | Sequence[str]) -> str:
    return x if isinstance(x, str) else detokenize(x)


def character_ter(hypotheses: Sequence[str | Sequence[str]],
                  references: Sequence[str | Sequence[str]]) -> float:
    """Strings are used as they are; token sequences are detokenized first."""
    _check_pairs(hypotheses, references)
    dist = norm = 0
    for hyp, ref in zip(hypotheses, references):
        h, r = _as_text(hyp), _as_text(ref)
        if not r:
            raise MetricError("reference detokenizes to an empty string")
        dist += levenshtein(h, r)
        norm += max(len(h), 1)
    return dist / norm


def evaluate(hypotheses: Sequence[Sequence[str]], references: Sequence[Sequence[str]]) -> EvalReport:
    stats = bleu_stats(hypotheses, references)
    return EvalReport(stats.score, character_ter(hypotheses, references), len(references), stats)
