"""Streaming corpus reading, per-document corruption and output writing."""

from __future__ import annotations

import hashlib
import json
import os
import sys
from collections import Counter
from collections.abc import Iterable, Iterator
from concurrent.futures import ProcessPoolExecutor
from contextlib import AbstractContextManager, nullcontext
from dataclasses import dataclass, field
from itertools import islice
from typing import IO

from multypo.engine import CorruptionConfig, CorruptionResult, Mode, corrupt
from multypo.layouts import LayoutRegistry, load_registry
from multypo.lexicon import IgnoreSet, load_ignore_set
from multypo.sampling import TypoOp

__all__ = [
    "DataError",
    "DocumentRecord",
    "RunReport",
    "derive_seed",
    "process_corpus",
    "read_documents",
]

FORMATS = ("plain", "records")

_decoder = json.JSONDecoder()
_scanstring = json.decoder.scanstring  # type: ignore[attr-defined]


class DataError(ValueError):
    """Input data is malformed."""


@dataclass(frozen=True)
class DocumentRecord:
    doc_id: str
    text: str
    raw: str = ""
    ending: str = "\n"
    span: tuple[int, int] | None = None


def derive_seed(run_seed: int, doc_id: str) -> int:
    """Stable 64-bit document seed from the run seed and document id."""
    digest = hashlib.blake2b(
        f"{run_seed}\x1f{doc_id}".encode(), digest_size=8, person=b"multypo-doc"
    ).digest()
    return int.from_bytes(digest, "big")


def _split_ending(line: str) -> tuple[str, str]:
    if line.endswith("\r\n"):
        return line[:-2], "\r\n"
    if line.endswith(("\n", "\r")):
        return line[:-1], line[-1]
    return line, ""


def _skip_ws(s: str, i: int) -> int:
    while i < len(s) and s[i] in " \t\r\n":
        i += 1
    return i


def locate_field(line: str, name: str) -> tuple[object, tuple[int, int]] | None:
    """Find a top-level key in a JSON object line.

    Returns the decoded value and its raw character span, or None when the key
    is absent. Duplicate keys resolve to the last occurrence, as in ``json``.
    """
    i = _skip_ws(line, 0)
    if i >= len(line) or line[i] != "{":
        raise ValueError("not a JSON object")
    i = _skip_ws(line, i + 1)
    found = None
    if i < len(line) and line[i] == "}":
        i += 1
    else:
        while True:
            if i >= len(line) or line[i] != '"':
                raise ValueError("expected a string key")
            key, i = _scanstring(line, i + 1)
            i = _skip_ws(line, i)
            if i >= len(line) or line[i] != ":":
                raise ValueError("expected ':'")
            i = _skip_ws(line, i + 1)
            value, end = _decoder.raw_decode(line, i)
            if key == name:
                found = (value, (i, end))
            i = _skip_ws(line, end)
            if i < len(line) and line[i] == ",":
                i = _skip_ws(line, i + 1)
                continue
            if i < len(line) and line[i] == "}":
                i += 1
                break
            raise ValueError("expected ',' or '}'")
    if _skip_ws(line, i) != len(line):
        raise ValueError("trailing data after object")
    return found


def read_documents(
    stream: Iterable[str], format: str = "plain", field: str | None = None
) -> Iterator[DocumentRecord]:
    """Yield one record per input line.

    ``plain`` treats each line as a document. ``records`` expects one JSON
    object per line and corrupts only ``field``; every other byte of the line
    is carried through. A string ``id`` attribute, when present, names the
    document; otherwise the 1-based line number does.
    """
    if format not in FORMATS:
        raise ValueError(f"unknown format {format!r}")
    if format == "records" and not field:
        raise ValueError("records format needs a field name")
    seen: set[str] = set()
    for lineno, line in enumerate(stream, start=1):
        body, ending = _split_ending(line)
        if format == "plain":
            yield DocumentRecord(str(lineno), body, body, ending)
            continue
        try:
            located = locate_field(body, field)  # type: ignore[arg-type]
            doc = json.loads(body)
        except ValueError as exc:
            raise DataError(f"line {lineno}: malformed record ({exc})") from None
        if located is None:
            raise DataError(f"line {lineno}: field {field!r} absent")
        value, span = located
        if not isinstance(value, str):
            raise DataError(f"line {lineno}: field {field!r} is not a string")
        doc_id = doc.get("id")
        doc_id = str(doc_id) if isinstance(doc_id, (str, int)) else str(lineno)
        if doc_id in seen:
            raise DataError(f"line {lineno}: duplicate document id {doc_id!r}")
        seen.add(doc_id)
        yield DocumentRecord(doc_id, value, body, ending, span)


def render_record(record: DocumentRecord, text: str) -> str:
    """Output line for a record whose document text became ``text``."""
    if record.span is None:
        return text + record.ending
    if text == record.text:
        return record.raw + record.ending
    start, end = record.span
    ascii_only = "\\u" in record.raw[start:end]
    encoded = json.dumps(text, ensure_ascii=ascii_only)
    return record.raw[:start] + encoded + record.raw[end:] + record.ending


@dataclass
class RunReport:
    language: str
    rate: float
    seed: int
    mode: str
    documents: int = 0
    requested_typos: int = 0
    applied_typos: int = 0
    shortfall_documents: int = 0
    op_histogram: Counter = field(default_factory=Counter)

    def add(self, result: CorruptionResult) -> None:
        self.documents += 1
        self.requested_typos += result.requested
        self.applied_typos += result.applied
        if result.shortfall > 0:
            self.shortfall_documents += 1
        self.op_histogram.update(e.op.value for e in result.events)

    def to_dict(self) -> dict:
        return {
            "language": self.language,
            "rate": self.rate,
            "seed": self.seed,
            "mode": self.mode,
            "documents": self.documents,
            "requested_typos": self.requested_typos,
            "applied_typos": self.applied_typos,
            "shortfall_documents": self.shortfall_documents,
            "op_histogram": {op.value: self.op_histogram.get(op.value, 0) for op in TypoOp},
        }


@dataclass(frozen=True)
class RunSettings:
    language: str
    rate: float
    seed: int
    mode: Mode = Mode.MULTYPO
    max_retries: int = 100
    layouts_dir: str | None = None
    ignore_dir: str | None = None


_worker: tuple[RunSettings, LayoutRegistry, IgnoreSet] | None = None


def _init_worker(settings: RunSettings) -> None:
    global _worker
    _worker = (
        settings,
        load_registry(settings.layouts_dir),
        load_ignore_set(settings.language, settings.ignore_dir),
    )


def _corrupt_one(record: DocumentRecord) -> tuple[DocumentRecord, CorruptionResult, int]:
    assert _worker is not None
    settings, registry, ignore = _worker
    seed = derive_seed(settings.seed, record.doc_id)
    config = CorruptionConfig(
        settings.language, settings.rate, seed, settings.mode, settings.max_retries
    )
    return record, corrupt(record.text, config, registry, ignore), seed


def _event_entry(
    settings: RunSettings, record: DocumentRecord, result: CorruptionResult, seed: int
) -> str:
    entry = {
        "doc_id": record.doc_id,
        "language": settings.language,
        "rate": settings.rate,
        "seed": seed,
        "mode": settings.mode.value,
        "events": [e.to_dict() for e in result.events],
    }
    return json.dumps(entry, ensure_ascii=False) + "\n"


def process_corpus(
    records: Iterable[DocumentRecord],
    settings: RunSettings,
    output: IO[str],
    events_out: IO[str] | None = None,
    workers: int = 1,
    batch_size: int = 256,
) -> RunReport:
    """Corrupt every record and write results in input order.

    Each document is seeded from ``(settings.seed, doc_id)`` alone, so the
    output does not depend on ``workers``. Records are consumed in batches,
    keeping memory bounded regardless of corpus size.
    """
    report = RunReport(settings.language, settings.rate, settings.seed, settings.mode.value)

    def emit(results: Iterable[tuple[DocumentRecord, CorruptionResult, int]]) -> None:
        for record, result, seed in results:
            output.write(render_record(record, result.text))
            if events_out is not None:
                events_out.write(_event_entry(settings, record, result, seed))
            report.add(result)

    it = iter(records)
    if workers <= 1:
        _init_worker(settings)
        emit(map(_corrupt_one, it))
        return report

    with ProcessPoolExecutor(
        max_workers=workers, initializer=_init_worker, initargs=(settings,)
    ) as pool:
        chunk = max(1, batch_size // workers)
        while batch := list(islice(it, batch_size * workers)):
            emit(pool.map(_corrupt_one, batch, chunksize=chunk))
    return report


def open_text(path: str, mode: str) -> AbstractContextManager[IO[str]]:
    """Open ``path`` as UTF-8 without newline translation; ``-`` is stdin/stdout."""
    if path == "-":
        stream = sys.stdin if "r" in mode else sys.stdout
        stream.reconfigure(encoding="utf-8", newline="")  # type: ignore[union-attr]
        return nullcontext(stream)
    return open(os.fspath(path), mode, encoding="utf-8", newline="")
