from __future__ import annotations

import pytest

from multypo.layouts import SUPPORTED_LANGUAGES, default_layouts_dir, load_registry
from multypo.lexicon import load_ignore_set, load_ignore_sets

# Acceptance outcomes, printed once at the end of the session.
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def registry():
    return load_registry()


@pytest.fixture(scope="session")
def qwerty(registry):
    return registry["eng_Latn"]


@pytest.fixture(scope="session")
def eng_ignore():
    return load_ignore_set("eng_Latn")


@pytest.fixture(scope="session")
def ignore_sets():
    return load_ignore_sets()


@pytest.fixture(scope="session")
def raw_layouts() -> dict[str, list[tuple[int, int, list[str]]]]:
    """Layout files split by hand, without the parser: (row, split, keys)."""
    out = {}
    for lang in SUPPORTED_LANGUAGES:
        text = (default_layouts_dir() / f"{lang}.layout").read_text(encoding="utf-8")
        rows = []
        for line in text.splitlines():
            if not line.startswith("row "):
                continue
            head, _, body = line.partition(":")
            parts = head.split()
            split = int(parts[3]) if len(parts) > 2 else 5
            rows.append((int(parts[1]), split, body.strip().split(" ")))
        out[lang] = rows
    return out


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
