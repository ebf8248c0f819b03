"""Keyboard layouts: parsing, neighbor lookup and hand assignment.

A layout file looks like::

    language: eng_Latn
    row 0: q w e r t y u i o p
    row 1: a s d f g h j k l
    row 2 split 5: z x c v b n m

Characters are listed in physical left-to-right order. ``_`` marks a key that
exists physically but carries no letter (digits, punctuation, dead keys), so
it occupies a column without joining the alphabet. Columns strictly left of a
row's split are typed with the left hand.
"""

from __future__ import annotations

import enum
import re
from collections.abc import Mapping
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from types import MappingProxyType

__all__ = [
    "DEFAULT_SPLIT",
    "GAP",
    "SUPPORTED_LANGUAGES",
    "Hand",
    "KeySlot",
    "KeyboardLayout",
    "LayoutError",
    "LayoutRegistry",
    "default_layouts_dir",
    "fold",
    "hand_of",
    "load_registry",
    "neighbors",
    "parse_layout",
]

SUPPORTED_LANGUAGES: tuple[str, ...] = (
    "ara_Arab",
    "ben_Beng",
    "deu_Latn",
    "ell_Grek",
    "eng_Latn",
    "fra_Latn",
    "heb_Hebr",
    "hin_Deva",
    "hye_Armn",
    "kat_Geor",
    "rus_Cyrl",
    "tam_Taml",
)

DEFAULT_SPLIT = 5
GAP = "_"
LAYOUT_SUFFIX = ".layout"

_HEADER_RE = re.compile(r"^language:\s*(\S+)\s*$")
_ROW_RE = re.compile(r"^row\s+(\d+)(?:\s+split\s+(\d+))?\s*:\s?(.*)$")


class LayoutError(ValueError):
    """A layout file or directory failed validation."""

    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}: "
        if line is not None:
            where += f"line {line}: "
        super().__init__(where + message)


class Hand(enum.Enum):
    LEFT = "left"
    RIGHT = "right"
    NEUTRAL = "neutral"
    UNKNOWN = "unknown"


def fold(ch: str) -> str:
    """Lowercase a single character, keeping it a single character."""
    lowered = ch.lower()
    return lowered if len(lowered) == 1 else ch


@dataclass(frozen=True)
class KeySlot:
    character: str
    row: int
    column: int
    hand: Hand


@dataclass(frozen=True)
class KeyboardLayout:
    language: str
    slots: Mapping[str, KeySlot]
    row_splits: Mapping[int, int]
    ordered_alphabet: tuple[str, ...] = field(repr=False)
    _grid: Mapping[tuple[int, int], str] = field(repr=False, compare=False)
    _neighbors: Mapping[str, tuple[str, ...]] = field(repr=False, compare=False)

    @property
    def alphabet(self) -> frozenset[str]:
        return frozenset(self.slots)

    def slot(self, ch: str) -> KeySlot | None:
        return self.slots.get(fold(ch))

    def neighbors(self, ch: str) -> tuple[str, ...]:
        return self._neighbors.get(fold(ch), ())

    def hand_of(self, ch: str) -> Hand:
        if ch == " ":
            return Hand.NEUTRAL
        slot = self.slots.get(fold(ch))
        return slot.hand if slot is not None else Hand.UNKNOWN

    def key_at(self, row: int, column: int) -> str | None:
        return self._grid.get((row, column))


def _build_layout(language: str, rows: dict[int, tuple[int, list[str]]]) -> KeyboardLayout:
    slots: dict[str, KeySlot] = {}
    grid: dict[tuple[int, int], str] = {}
    splits: dict[int, int] = {}
    for row, (split, keys) in rows.items():
        splits[row] = split
        for column, ch in enumerate(keys):
            if ch == GAP:
                continue
            hand = Hand.LEFT if column < split else Hand.RIGHT
            slots[ch] = KeySlot(ch, row, column, hand)
            grid[(row, column)] = ch
    adjacency = {
        ch: tuple(
            n
            for n in (grid.get((s.row, s.column - 1)), grid.get((s.row, s.column + 1)))
            if n is not None
        )
        for ch, s in slots.items()
    }
    return KeyboardLayout(
        language=language,
        slots=MappingProxyType(slots),
        row_splits=MappingProxyType(splits),
        ordered_alphabet=tuple(grid[key] for key in sorted(grid)),
        _grid=MappingProxyType(grid),
        _neighbors=MappingProxyType(adjacency),
    )


def parse_layout(source_text: str, source: str | None = None) -> KeyboardLayout:
    """Parse and validate the text of one layout file.

    Blank lines and ``#`` comments are skipped. Raises :class:`LayoutError`
    carrying the offending line number.
    """
    language: str | None = None
    rows: dict[int, tuple[int, list[str]]] = {}
    seen_chars: dict[str, int] = {}

    for lineno, raw in enumerate(source_text.splitlines(), start=1):
        line = raw.rstrip("\r")
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if language is None:
            m = _HEADER_RE.match(stripped)
            if m is None:
                raise LayoutError(
                    f"malformed header {stripped!r}, expected 'language: <id>'",
                    lineno,
                    source,
                )
            language = m.group(1)
            if language not in SUPPORTED_LANGUAGES:
                raise LayoutError(f"unknown language {language!r}", lineno, source)
            continue

        m = _ROW_RE.match(line.lstrip())
        if m is None:
            raise LayoutError(f"malformed row {stripped!r}", lineno, source)
        row = int(m.group(1))
        split = int(m.group(2)) if m.group(2) is not None else DEFAULT_SPLIT
        if row in rows:
            raise LayoutError(f"row {row} defined twice", lineno, source)
        body = m.group(3).strip()
        keys = body.split(" ") if body else []
        for ch in keys:
            if len(ch) != 1:
                raise LayoutError(
                    f"key {ch!r} is not a single character (keys are separated by single spaces)",
                    lineno,
                    source,
                )
            if ch == GAP:
                continue
            if ch.isspace() or ch.isdigit():
                raise LayoutError(f"key {ch!r} may not appear in a layout", lineno, source)
            if fold(ch) != ch:
                raise LayoutError(f"key {ch!r} must be lowercase", lineno, source)
            if ch in seen_chars:
                raise LayoutError(
                    f"duplicate character {ch!r} (first on line {seen_chars[ch]})",
                    lineno,
                    source,
                )
            seen_chars[ch] = lineno
        rows[row] = (split, keys)

    if language is None:
        raise LayoutError("missing 'language:' header", None, source)
    if not seen_chars:
        raise LayoutError("layout has no keys", None, source)
    return _build_layout(language, rows)


def neighbors(layout: KeyboardLayout, ch: str) -> list[str]:
    """Same-row keys immediately left and right of ``ch``, left first."""
    return list(layout.neighbors(ch))


def hand_of(layout: KeyboardLayout, ch: str) -> Hand:
    return layout.hand_of(ch)


@dataclass(frozen=True)
class LayoutRegistry:
    layouts: Mapping[str, KeyboardLayout]

    def __getitem__(self, language: str) -> KeyboardLayout:
        try:
            return self.layouts[language]
        except KeyError:
            raise LayoutError(f"unknown language {language!r}") from None

    def __contains__(self, language: object) -> bool:
        return language in self.layouts

    def __len__(self) -> int:
        return len(self.layouts)

    def languages(self) -> list[str]:
        return sorted(self.layouts)


def default_layouts_dir() -> Path:
    return Path(str(resources.files("multypo") / "data" / "layouts"))


def load_registry(layout_directory: str | Path | None = None) -> LayoutRegistry:
    """Load every ``<LanguageId>.layout`` file and require all languages."""
    directory = Path(layout_directory) if layout_directory else default_layouts_dir()
    if not directory.is_dir():
        raise LayoutError(f"layout directory {str(directory)!r} does not exist")
    files = sorted(directory.glob(f"*{LAYOUT_SUFFIX}"))
    if not files:
        raise LayoutError(f"no layouts found in {str(directory)!r}")

    layouts: dict[str, KeyboardLayout] = {}
    for path in files:
        layout = parse_layout(path.read_text(encoding="utf-8"), source=path.name)
        if path.name != f"{layout.language}{LAYOUT_SUFFIX}":
            raise LayoutError(
                f"file declares {layout.language!r} but is named {path.name!r}",
                source=path.name,
            )
        layouts[layout.language] = layout

    missing = [lang for lang in SUPPORTED_LANGUAGES if lang not in layouts]
    if missing:
        raise LayoutError(f"missing layouts for: {', '.join(missing)}")
    return LayoutRegistry(MappingProxyType(layouts))
