"""Typo operations and the iterative corruption loop.

Each iteration draws a word (sqrt-length weights, halved after every hit),
then an operation, then a position from the word's current length. A failed
or invalid edit redraws among the operations not yet tried on that word; when
all four fail the attempt counts as one retry and a new word is drawn.

A non-final word whose last character is picked for transposition borrows the
first character of the following separator, so ``the cat`` can become
``th ecat``. Whitespace is moved, never created or destroyed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal

from multypo.layouts import Hand, KeyboardLayout, LayoutRegistry, fold
from multypo.lexicon import IgnoreSet, is_eligible, tokenize
from multypo.sampling import (
    RandomSource,
    TypoOp,
    halve_weight,
    sample_index,
    sample_op,
    sample_position,
    word_weights,
)

__all__ = [
    "DEFAULT_MAX_RETRIES",
    "CorruptionConfig",
    "CorruptionResult",
    "Mode",
    "TypoEvent",
    "TypoFailure",
    "apply_delete",
    "apply_insert",
    "apply_replace",
    "apply_transpose",
    "corrupt",
    "is_valid",
    "naive_insert",
    "naive_replace",
    "naive_transpose",
    "target_typo_count",
]

DEFAULT_MAX_RETRIES = 100


class Mode(str, enum.Enum):
    MULTYPO = "multypo"
    NAIVE = "naive"


class TypoFailure(Exception):
    """An operation cannot be applied at the sampled position."""


@dataclass(frozen=True)
class CorruptionConfig:
    language: str
    rate: float
    seed: int = 0
    mode: Mode = Mode.MULTYPO
    max_retries: int = DEFAULT_MAX_RETRIES

    def __post_init__(self) -> None:
        if not (isinstance(self.rate, (int, float)) and 0.0 <= self.rate <= 1.0):
            raise ValueError(f"rate must be within [0, 1], got {self.rate!r}")
        if not isinstance(self.max_retries, int) or self.max_retries < 1:
            raise ValueError(f"max_retries must be >= 1, got {self.max_retries!r}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        object.__setattr__(self, "mode", Mode(self.mode))


@dataclass(frozen=True)
class TypoEvent:
    word_index: int
    position: int
    op: TypoOp
    before: str
    after: str

    def to_dict(self) -> dict:
        return {
            "word_index": self.word_index,
            "position": self.position,
            "op": self.op.value,
            "before": self.before,
            "after": self.after,
        }

    @classmethod
    def from_dict(cls, data: dict) -> TypoEvent:
        return cls(
            word_index=int(data["word_index"]),
            position=int(data["position"]),
            op=TypoOp(data["op"]),
            before=data["before"],
            after=data["after"],
        )


@dataclass(frozen=True)
class CorruptionResult:
    text: str
    events: tuple[TypoEvent, ...]
    requested: int
    words: tuple[str, ...] = field(default=(), repr=False)
    # Final state per word; a word that borrowed its following space keeps it.
    final_words: tuple[str, ...] = field(default=(), repr=False)

    @property
    def applied(self) -> int:
        return len(self.events)

    @property
    def shortfall(self) -> int:
        return self.requested - self.applied


def target_typo_count(rate: float, word_count: int) -> int:
    """``rate * word_count`` rounded half away from zero."""
    if not 0.0 <= rate <= 1.0:
        raise ValueError(f"rate must be within [0, 1], got {rate!r}")
    if word_count < 0:
        raise ValueError("word_count must be >= 0")
    # Round the decimal as written, not its binary approximation.
    product = Decimal(repr(rate)) * word_count
    return int(product.quantize(Decimal(1), rounding=ROUND_HALF_UP))


def _check_position(word: str, position: int) -> None:
    if not 1 <= position < len(word):
        raise ValueError(f"position {position} outside [1, {len(word) - 1}] for {word!r}")


def _match_case(new: str, reference: str) -> str:
    if reference != fold(reference):
        upper = new.upper()
        if len(upper) == 1:
            return upper
    return new


def apply_replace(word: str, position: int, layout: KeyboardLayout, rng: RandomSource) -> str:
    _check_position(word, position)
    ch = word[position]
    candidates = layout.neighbors(ch)
    if not candidates:
        raise TypoFailure(f"no neighbors for {ch!r}")
    new = _match_case(rng.choice(candidates), ch)
    return word[:position] + new + word[position + 1 :]


def apply_insert(word: str, position: int, layout: KeyboardLayout, rng: RandomSource) -> str:
    _check_position(word, position)
    ch = word[position]
    candidates = layout.neighbors(ch)
    if not candidates:
        raise TypoFailure(f"no neighbors for {ch!r}")
    new = _match_case(rng.choice(candidates), ch)
    return word[: position + 1] + new + word[position + 1 :]


def apply_delete(word: str, position: int) -> str:
    _check_position(word, position)
    if word[position].isspace():
        raise TypoFailure("whitespace cannot be deleted")
    return word[:position] + word[position + 1 :]


def crosses_hands(layout: KeyboardLayout, a: str, b: str) -> bool:
    """True when ``a`` and ``b`` are typed by different hands.

    A space counts as different from either hand; unknown keys never qualify.
    """
    ha, hb = layout.hand_of(a), layout.hand_of(b)
    if ha is Hand.UNKNOWN or hb is Hand.UNKNOWN:
        return False
    return ha is not hb


def _transpose(word: str, position: int, is_final_word: bool, pad: str) -> tuple[str, str, str]:
    if not 1 <= position < len(word):
        raise ValueError(f"position {position} outside [1, {len(word) - 1}] for {word!r}")
    if position == len(word) - 1:
        if is_final_word or not pad:
            raise TypoFailure("nothing follows the last character")
        word += pad
    a, b = word[position], word[position + 1]
    return word[:position] + b + a + word[position + 2 :], a, b


def apply_transpose(
    word: str,
    position: int,
    layout: KeyboardLayout,
    is_final_word: bool,
    pad: str = " ",
) -> str:
    """Swap ``position`` with ``position + 1`` if the two keys cross hands.

    At the last character of a non-final word, ``pad`` (the whitespace that
    follows the word) is appended first, so the result is one longer than
    ``word``. Pass ``is_final_word=True`` whenever padding is not allowed.
    """
    swapped, a, b = _transpose(word, position, is_final_word, pad)
    if not crosses_hands(layout, a, b):
        raise TypoFailure(f"same-hand or unknown pair {a!r}, {b!r}")
    return swapped


def naive_replace(word: str, position: int, layout: KeyboardLayout, rng: RandomSource) -> str:
    _check_position(word, position)
    ch = word[position]
    if ch.isspace():
        raise TypoFailure("whitespace cannot be replaced")
    original = fold(ch)
    candidates = [c for c in layout.ordered_alphabet if c != original]
    new = _match_case(rng.choice(candidates), ch)
    return word[:position] + new + word[position + 1 :]


def naive_insert(word: str, position: int, layout: KeyboardLayout, rng: RandomSource) -> str:
    _check_position(word, position)
    new = _match_case(rng.choice(layout.ordered_alphabet), word[position])
    return word[: position + 1] + new + word[position + 1 :]


def naive_transpose(word: str, position: int, is_final_word: bool, pad: str = " ") -> str:
    return _transpose(word, position, is_final_word, pad)[0]


def is_valid(candidate: str, history: list[str]) -> bool:
    """Reject edits that leave the word as it is or return it to an earlier state."""
    return candidate not in history


@dataclass
class _WordState:
    history: list[str]
    padded: bool = False

    @property
    def current(self) -> str:
        return self.history[-1]


def _attempt(
    index: int,
    state: _WordState,
    is_final: bool,
    pad: str,
    layout: KeyboardLayout,
    mode: Mode,
    rng: RandomSource,
) -> tuple[TypoEvent, bool] | None:
    """Try untried ops on one word until one yields a valid new state."""
    untried = list(TypoOp)
    no_pad = is_final or state.padded
    while untried:
        op = sample_op(rng) if len(untried) == 4 else sample_op(rng, untried)
        untried.remove(op)
        word = state.current
        position = sample_position(len(word), rng)
        try:
            if op is TypoOp.DELETE:
                candidate = apply_delete(word, position)
            elif mode is Mode.MULTYPO:
                if op is TypoOp.REPLACE:
                    candidate = apply_replace(word, position, layout, rng)
                elif op is TypoOp.INSERT:
                    candidate = apply_insert(word, position, layout, rng)
                else:
                    candidate = apply_transpose(word, position, layout, no_pad, pad)
            else:
                if op is TypoOp.REPLACE:
                    candidate = naive_replace(word, position, layout, rng)
                elif op is TypoOp.INSERT:
                    candidate = naive_insert(word, position, layout, rng)
                else:
                    candidate = naive_transpose(word, position, no_pad, pad)
        except TypoFailure:
            continue

        padded_now = op is TypoOp.TRANSPOSE and len(candidate) == len(word) + 1
        history = [h + pad for h in state.history] if padded_now else state.history
        if not is_valid(candidate, history):
            continue
        before = word + pad if padded_now else word
        return TypoEvent(index, position, op, before, candidate), padded_now
    return None


def corrupt(
    text: str,
    config: CorruptionConfig,
    registry: LayoutRegistry,
    ignore: IgnoreSet,
) -> CorruptionResult:
    """Inject ``round(rate * n)`` typos into ``text`` where achievable."""
    layout = registry[config.language]
    if ignore.language != config.language:
        raise ValueError(f"ignore set is for {ignore.language!r}, not {config.language!r}")
    tokens = tokenize(text)
    words = tokens.words
    requested = target_typo_count(config.rate, len(words))
    if requested == 0:
        return CorruptionResult(text, (), 0, words, words)

    rng = RandomSource(config.seed)
    weights = word_weights(words, [is_eligible(w, ignore) for w in words])
    separators = list(tokens.separators)
    states: dict[int, _WordState] = {}
    events: list[TypoEvent] = []
    retries = 0
    last = len(words) - 1

    while len(events) < requested and retries < config.max_retries:
        if not any(w > 0 for w in weights):
            break
        index = sample_index(weights, rng)
        state = states.get(index)
        if state is None:
            state = states[index] = _WordState([words[index]])
        pad = separators[index + 1][:1] if index < last else ""
        outcome = _attempt(index, state, index == last, pad, layout, config.mode, rng)
        if outcome is None:
            retries += 1
            continue
        event, padded_now = outcome
        if padded_now:
            state.history = [h + pad for h in state.history]
            state.padded = True
            separators[index + 1] = separators[index + 1][1:]
        state.history.append(event.after)
        events.append(event)
        weights = halve_weight(weights, index)
        if len(event.after) < 2:
            # One-character words are never drawn.
            weights[index] = 0.0

    final = tuple(states[i].current if i in states else w for i, w in enumerate(words))
    parts = [separators[0]]
    for word, sep in zip(final, separators[1:], strict=True):
        parts.append(word)
        parts.append(sep)
    return CorruptionResult("".join(parts), tuple(events), requested, words, final)
