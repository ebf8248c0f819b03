"""Command-line entry point: ``multypo corrupt`` and ``multypo validate``.

Every flag can also come from an environment variable named ``MULTYPO_`` plus
the flag in upper case with dashes as underscores (``--events-out`` reads
``MULTYPO_EVENTS_OUT``). Flags given on the command line win.

Exit codes: 0 success, 1 usage, 2 data error (including failed validation),
3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from collections.abc import Sequence
from contextlib import ExitStack

from multypo.corpus import (
    FORMATS,
    DataError,
    RunSettings,
    open_text,
    process_corpus,
    read_documents,
)
from multypo.engine import DEFAULT_MAX_RETRIES, Mode
from multypo.layouts import SUPPORTED_LANGUAGES, LayoutError, load_registry
from multypo.lexicon import load_ignore_set

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_IO = 3

ENV_PREFIX = "MULTYPO_"

# Corruption levels used for benchmark sweeps, in percent.
LEVELS = {"0": 0.0, "10": 0.1, "40": 0.4, "70": 0.7}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _rate(value: str) -> float:
    try:
        rate = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid rate {value!r}") from None
    if not 0.0 <= rate <= 1.0:
        raise argparse.ArgumentTypeError(f"rate must be within [0, 1], got {value}")
    return rate


def _seed(value: str) -> int:
    try:
        seed = int(value, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {value!r}") from None
    if not 0 <= seed < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return seed


def _positive(value: str) -> int:
    try:
        n = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer {value!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {n}")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="multypo", description="Keyboard-aware multilingual typo injection.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("corrupt", help="inject typos into a corpus")
    c.add_argument("--lang", choices=SUPPORTED_LANGUAGES, required=True)
    rate = c.add_mutually_exclusive_group()
    rate.add_argument("--rate", type=_rate, help="fraction of words to corrupt, in [0, 1]")
    rate.add_argument("--level", choices=sorted(LEVELS, key=int), help="preset rate in percent")
    c.add_argument("--seed", type=_seed, default=0)
    c.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.MULTYPO.value)
    c.add_argument("--format", choices=FORMATS, default="plain")
    c.add_argument("--field", help="attribute to corrupt in records format")
    c.add_argument("--input", required=True, help="input path, or - for stdin")
    c.add_argument("--output", default="-", help="output path, or - for stdout")
    c.add_argument("--events-out", help="write a per-document event log here")
    c.add_argument("--report-out", help="write the run report here instead of stderr")
    c.add_argument("--layouts-dir")
    c.add_argument("--ignore-dir")
    c.add_argument("--max-retries", type=_positive, default=DEFAULT_MAX_RETRIES)
    c.add_argument("--workers", type=_positive, default=1)

    v = sub.add_parser("validate", help="check sampler distributions and audit event logs")
    v.add_argument("--samples", type=_positive, default=1_000_000)
    v.add_argument(
        "--trials", type=_positive, default=100_000, help="single-typo runs for the word bias check"
    )
    v.add_argument("--seed", type=_seed, default=0)
    v.add_argument("--lang", choices=SUPPORTED_LANGUAGES, default="eng_Latn")
    v.add_argument("--events-in", help="event log to audit")
    v.add_argument("--report-out", help="also write the report as JSON here")
    v.add_argument("--layouts-dir")
    v.add_argument("--ignore-dir")
    return parser


# Mutually exclusive flags are resolved in run_corrupt so either flag beats
# either variable.
_ENV_MANUAL = {"help", "rate", "level"}


def _apply_env(parser: argparse.ArgumentParser, environ: dict[str, str]) -> None:
    """Turn ``MULTYPO_*`` variables into parser defaults."""
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            for child in action.choices.values():
                _apply_env(child, environ)
            continue
        if not action.option_strings or action.dest in _ENV_MANUAL:
            continue
        name = ENV_PREFIX + action.dest.upper()
        if name in environ:
            # argparse runs string defaults through type=, not choices=.
            if action.choices is not None and environ[name] not in action.choices:
                raise UsageError(f"{name}={environ[name]!r} is not one of {list(action.choices)}")
            action.default = environ[name]
            action.required = False


def _write_report(payload: dict, path: str | None) -> None:
    text = json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stderr.write(text)


def _resolve_rate(args: argparse.Namespace, environ: dict[str, str]) -> float:
    if args.rate is not None:
        return args.rate
    if args.level is not None:
        return LEVELS[args.level]
    if ENV_PREFIX + "RATE" in environ:
        try:
            return _rate(environ[ENV_PREFIX + "RATE"])
        except argparse.ArgumentTypeError as exc:
            raise UsageError(f"{ENV_PREFIX}RATE: {exc}") from None
    level = environ.get(ENV_PREFIX + "LEVEL")
    if level is not None:
        if level not in LEVELS:
            raise UsageError(f"{ENV_PREFIX}LEVEL must be one of {sorted(LEVELS, key=int)}")
        return LEVELS[level]
    raise UsageError("one of --rate or --level is required")


def run_corrupt(args: argparse.Namespace, environ: dict[str, str]) -> int:
    rate = _resolve_rate(args, environ)
    if args.format == "records" and not args.field:
        raise UsageError("--field is required with --format records")

    settings = RunSettings(
        language=args.lang,
        rate=rate,
        seed=args.seed,
        mode=Mode(args.mode),
        max_retries=args.max_retries,
        layouts_dir=args.layouts_dir,
        ignore_dir=args.ignore_dir,
    )
    # Fail on bad data directories before touching any output.
    load_registry(args.layouts_dir)
    load_ignore_set(args.lang, args.ignore_dir)

    with ExitStack() as stack:
        src = stack.enter_context(open_text(args.input, "r"))
        out = stack.enter_context(open_text(args.output, "w"))
        events = stack.enter_context(open_text(args.events_out, "w")) if args.events_out else None
        records = read_documents(src, args.format, args.field)
        report = process_corpus(records, settings, out, events, workers=args.workers)
    _write_report(report.to_dict(), args.report_out)
    return EXIT_OK


def run_validate(args: argparse.Namespace) -> int:
    from multypo.validation import run_validation

    try:
        report = run_validation(
            samples=args.samples,
            seed=args.seed,
            language=args.lang,
            trials=args.trials,
            events_in=args.events_in,
            layouts_dir=args.layouts_dir,
            ignore_dir=args.ignore_dir,
        )
    except ValueError as exc:
        if isinstance(exc, (LayoutError, DataError)):
            raise
        raise UsageError(str(exc)) from None
    print(report.format_text())
    if args.report_out:
        _write_report(report.to_dict(), args.report_out)
    return EXIT_OK if report.passed else EXIT_DATA


def main(argv: Sequence[str] | None = None, environ: dict[str, str] | None = None) -> int:
    parser = build_parser()
    environ = dict(os.environ) if environ is None else environ
    try:
        _apply_env(parser, environ)
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:  # --help, or a usage error already reported
            return exc.code if isinstance(exc.code, int) else EXIT_USAGE
        if args.command == "corrupt":
            return run_corrupt(args, environ)
        return run_validate(args)
    except UsageError as exc:
        print(f"multypo: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, LayoutError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        print(f"multypo: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"multypo: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
