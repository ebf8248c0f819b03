"""Keyboard-aware multilingual typo injection.

>>> from multypo import corrupt, CorruptionConfig, load_registry, load_ignore_set
>>> registry = load_registry()
>>> result = corrupt("Colorless green ideas smell furiously.",
...                  CorruptionConfig("eng_Latn", rate=0.4, seed=3),
...                  registry, load_ignore_set("eng_Latn"))
>>> result.applied
2
"""

from multypo.engine import (
    CorruptionConfig,
    CorruptionResult,
    Mode,
    TypoEvent,
    corrupt,
    target_typo_count,
)
from multypo.layouts import (
    SUPPORTED_LANGUAGES,
    Hand,
    KeyboardLayout,
    LayoutError,
    LayoutRegistry,
    load_registry,
    parse_layout,
)
from multypo.lexicon import IgnoreSet, load_ignore_set, tokenize
from multypo.sampling import RandomSource, TypoOp

__all__ = [
    "SUPPORTED_LANGUAGES",
    "CorruptionConfig",
    "CorruptionResult",
    "Hand",
    "IgnoreSet",
    "KeyboardLayout",
    "LayoutError",
    "LayoutRegistry",
    "Mode",
    "RandomSource",
    "TypoEvent",
    "TypoOp",
    "corrupt",
    "load_ignore_set",
    "load_registry",
    "parse_layout",
    "target_typo_count",
    "tokenize",
]
