"""Corruption model for denoising auto-encoding: word dropout plus local shuffle."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, TypeVar

import numpy as np

T = TypeVar("T")


@dataclass(frozen=True)
class NoiseConfig:
    p_drop: float = 0.1
    shuffle_k: float = 3

    def __post_init__(self):
        if not 0.0 <= self.p_drop <= 1.0:
            raise ValueError(f"p_drop must lie in [0, 1], got {self.p_drop}")
        if self.shuffle_k < 0:
            raise ValueError(f"shuffle_k must be >= 0, got {self.shuffle_k}")

    @property
    def is_identity(self) -> bool:
        return self.p_drop == 0 and self.shuffle_k == 0


def corrupt(sentence: Sequence[T], config: NoiseConfig, rng: np.random.Generator) -> list[T]:
    """Drop each token with probability ``p_drop`` (one always survives), then
    reorder survivors by ``index + U[0, shuffle_k]``.

    A token's new position differs from its position among the survivors by
    at most ``shuffle_k``, since two tokens can only swap order when their
    indices are less than ``shuffle_k`` apart.  In particular ``shuffle_k=1``
    never reorders; the conventional default of 3 moves tokens by up to 2.
    """
    n = len(sentence)
    if n == 0:
        return []
    if config.p_drop > 0:
        keep = rng.random(n) >= config.p_drop
        if not keep.any():
            keep[rng.integers(n)] = True
        kept = [tok for tok, k in zip(sentence, keep) if k]
    else:
        kept = list(sentence)
    if config.shuffle_k > 0 and len(kept) > 1:
        keys = np.arange(len(kept)) + rng.uniform(0, config.shuffle_k, size=len(kept))
        kept = [kept[i] for i in np.argsort(keys, kind="stable")]
    return kept
