"""Reversible whitespace tokenization and per-word eligibility."""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from multypo.layouts import SUPPORTED_LANGUAGES, LayoutError

__all__ = [
    "IgnoreSet",
    "TokenizedText",
    "default_ignore_dir",
    "detokenize",
    "is_eligible",
    "is_ignored",
    "load_ignore_set",
    "load_ignore_sets",
    "parse_ignore_set",
    "tokenize",
]

IGNORE_SUFFIX = ".ignore"
ASCII_DIGITS = tuple("0123456789")

# Zero code point of each script's native decimal digits.
_NATIVE_DIGIT_ZERO = {
    "ara_Arab": 0x0660,
    "ben_Beng": 0x09E6,
    "hin_Deva": 0x0966,
    "tam_Taml": 0x0BE6,
}

_WORD_RE = re.compile(r"\S+")


@dataclass(frozen=True)
class TokenizedText:
    words: tuple[str, ...]
    separators: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.separators) != len(self.words) + 1:
            raise ValueError("separators must number one more than words")


def tokenize(text: str) -> TokenizedText:
    words: list[str] = []
    separators: list[str] = []
    cursor = 0
    for m in _WORD_RE.finditer(text):
        separators.append(text[cursor : m.start()])
        words.append(m.group())
        cursor = m.end()
    separators.append(text[cursor:])
    return TokenizedText(tuple(words), tuple(separators))


def detokenize(tokens: TokenizedText) -> str:
    parts = [tokens.separators[0]]
    for word, sep in zip(tokens.words, tokens.separators[1:], strict=True):
        parts.append(word)
        parts.append(sep)
    return "".join(parts)


def _normalize(s: str) -> str:
    return unicodedata.normalize("NFC", s).casefold()


@dataclass(frozen=True)
class IgnoreSet:
    """Protected strings for one language; words containing any are never edited."""

    language: str
    entries: frozenset[str]
    _pattern: re.Pattern = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        # Match on normalized forms so composed and decomposed input agree.
        folded = sorted({_normalize(e) for e in self.entries if e}, key=lambda e: (-len(e), e))
        pattern = re.compile("|".join(map(re.escape, folded))) if folded else re.compile(r"(?!)")
        object.__setattr__(self, "_pattern", pattern)

    def matches(self, word: str) -> bool:
        return self._pattern.search(_normalize(word)) is not None


def native_digits(language: str) -> tuple[str, ...]:
    zero = _NATIVE_DIGIT_ZERO.get(language)
    if zero is None:
        return ()
    return tuple(chr(zero + i) for i in range(10))


def parse_ignore_set(language: str, source_text: str) -> IgnoreSet:
    """Parse one ``.ignore`` file; digits for the language are always added."""
    if language not in SUPPORTED_LANGUAGES:
        raise LayoutError(f"unknown language {language!r}")
    entries = set(ASCII_DIGITS) | set(native_digits(language))
    for raw in source_text.splitlines():
        line = raw.strip()
        if line and not line.startswith("#"):
            entries.add(line)
    return IgnoreSet(language, frozenset(entries))


def default_ignore_dir() -> Path:
    return Path(str(resources.files("multypo") / "data" / "ignore"))


def load_ignore_set(language: str, ignore_directory: str | Path | None = None) -> IgnoreSet:
    directory = Path(ignore_directory) if ignore_directory else default_ignore_dir()
    path = directory / f"{language}{IGNORE_SUFFIX}"
    if not path.is_file():
        raise LayoutError(f"no ignore set for {language!r} in {str(directory)!r}")
    return parse_ignore_set(language, path.read_text(encoding="utf-8"))


def load_ignore_sets(ignore_directory: str | Path | None = None) -> dict[str, IgnoreSet]:
    return {lang: load_ignore_set(lang, ignore_directory) for lang in SUPPORTED_LANGUAGES}


def is_ignored(word: str, ignore_set: IgnoreSet) -> bool:
    return ignore_set.matches(word)


def is_eligible(word: str, ignore_set: IgnoreSet) -> bool:
    """Words need at least two characters and no protected substring."""
    return len(word) >= 2 and not ignore_set.matches(word)
