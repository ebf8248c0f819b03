"""Seeded randomness and the word, position and operation samplers.

All randomness flows from :class:`RandomSource`, which wraps CPython's
Mersenne Twister and only ever calls ``random()``. That method is the one
part of :mod:`random` whose output sequence for an integer seed is promised
to stay fixed across Python versions, so every other draw (bounded integers,
categorical picks) is derived from it here rather than delegated to
``randrange``/``choices``.
"""

from __future__ import annotations

import enum
import math
import random
from collections.abc import Sequence
from functools import lru_cache

__all__ = [
    "OP_PROBABILITIES",
    "NoEligibleWords",
    "RandomSource",
    "TypoOp",
    "halve_weight",
    "position_weights",
    "sample_index",
    "sample_op",
    "sample_position",
    "word_weights",
]

SEED_LIMIT = 2**64


class TypoOp(str, enum.Enum):
    REPLACE = "replace"
    INSERT = "insert"
    DELETE = "delete"
    TRANSPOSE = "transpose"


# Draw order is part of the determinism contract.
OP_PROBABILITIES: dict[TypoOp, float] = {
    TypoOp.REPLACE: 0.2825,
    TypoOp.INSERT: 0.1525,
    TypoOp.DELETE: 0.2825,
    TypoOp.TRANSPOSE: 0.2825,
}


class NoEligibleWords(ValueError):
    """Raised when every word weight is zero."""


class RandomSource:
    """Single-owner stream of uniform draws for one corruption run."""

    __slots__ = ("_random", "seed")

    def __init__(self, seed: int) -> None:
        if not isinstance(seed, int) or not 0 <= seed < SEED_LIMIT:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
        self.seed = seed
        self._random = random.Random(seed).random

    def uniform(self) -> float:
        """A float in [0, 1)."""
        return self._random()

    def below(self, n: int) -> int:
        """A uniform integer in [0, n)."""
        if n <= 0:
            raise ValueError("n must be positive")
        return min(int(self._random() * n), n - 1)

    def choice(self, items: Sequence):
        return items[self.below(len(items))]

    def categorical(self, weights: Sequence[float]) -> int:
        """Index ``i`` with probability ``weights[i] / sum(weights)``."""
        total = math.fsum(weights)
        if not total > 0:
            raise NoEligibleWords("no eligible words: all weights are zero")
        target = self._random() * total
        acc = 0.0
        last = -1
        for i, w in enumerate(weights):
            if w <= 0:
                continue
            acc += w
            last = i
            if target < acc:
                return i
        # Rounding in the running sum can leave target just past the end.
        return last


def word_weights(words: Sequence[str], eligibility: Sequence[bool]) -> list[float]:
    if len(words) != len(eligibility):
        raise ValueError("words and eligibility differ in length")
    return [math.sqrt(len(w)) if ok else 0.0 for w, ok in zip(words, eligibility, strict=True)]


def sample_index(weights: Sequence[float], rng: RandomSource) -> int:
    return rng.categorical(weights)


def halve_weight(weights: Sequence[float], index: int) -> list[float]:
    if not weights[index] > 0:
        raise ValueError(f"cannot halve zero weight at index {index}")
    halved = list(weights)
    halved[index] = weights[index] / 2
    return halved


@lru_cache(maxsize=256)
def _position_weights(length: int) -> tuple[float, ...]:
    if length == 2:
        raw = [0.0, 0.2]
    else:
        # Linear from 0.1 at index 1 to 0.2 at the final index.
        span = length - 2
        raw = [0.0] + [0.1 + 0.1 * (i - 1) / span for i in range(1, length)]
    total = math.fsum(raw)
    return tuple(w / total for w in raw)


def position_weights(length: int) -> list[float]:
    """Normalized per-index weights for a word of ``length`` characters.

    Index 0 always gets 0, index 1 gets raw weight 0.1, the last index 0.2,
    and indices in between are interpolated linearly. For two characters the
    last-character weight wins.
    """
    if length < 2:
        raise ValueError(f"position sampling needs length >= 2, got {length}")
    return list(_position_weights(length))


def sample_position(length: int, rng: RandomSource) -> int:
    if length < 2:
        raise ValueError(f"position sampling needs length >= 2, got {length}")
    return rng.categorical(_position_weights(length))


_OPS = tuple(OP_PROBABILITIES)
_OP_WEIGHTS = tuple(OP_PROBABILITIES.values())


def sample_op(rng: RandomSource, allowed: Sequence[TypoOp] | None = None) -> TypoOp:
    """Draw an operation, optionally renormalized over ``allowed``."""
    if allowed is None:
        return _OPS[rng.categorical(_OP_WEIGHTS)]
    weights = [OP_PROBABILITIES[op] if op in allowed else 0.0 for op in _OPS]
    return _OPS[rng.categorical(weights)]
