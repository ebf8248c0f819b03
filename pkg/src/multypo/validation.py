"""Empirical checks of the samplers and post-hoc audits of event logs."""

from __future__ import annotations

import json
import math
from collections import Counter
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from pathlib import Path

from multypo.corpus import DataError, derive_seed
from multypo.engine import CorruptionConfig, TypoEvent, corrupt, crosses_hands
from multypo.layouts import KeyboardLayout, LayoutRegistry, fold, load_registry
from multypo.lexicon import IgnoreSet, is_eligible, load_ignore_set, load_ignore_sets, tokenize
from multypo.sampling import (
    OP_PROBABILITIES,
    RandomSource,
    TypoOp,
    position_weights,
    sample_op,
    sample_position,
    word_weights,
)

__all__ = [
    "MIN_SAMPLES",
    "AuditStats",
    "CheckResult",
    "ValidationReport",
    "audit_events",
    "binomial_tolerance",
    "expected_neighbor_fraction",
    "validate_constraints",
    "validate_operation_mix",
    "validate_position_distribution",
    "validate_word_length_bias",
]

MIN_SAMPLES = 100_000
SIGMAS = 6.0

OP_MIX_TOLERANCE = 0.003
POSITION_TOLERANCE = 0.005
WORD_BIAS_TOLERANCE = 0.01


@dataclass
class CheckResult:
    name: str
    expected: dict[str, float]
    observed: dict[str, float]
    tolerance: float
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "expected": self.expected,
            "observed": self.observed,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "detail": self.detail,
        }


@dataclass
class ValidationReport:
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checks": [c.to_dict() for c in self.checks]}

    def format_text(self) -> str:
        lines = []
        width = max((len(c.name) for c in self.checks), default=0)
        for c in self.checks:
            worst = max(
                (abs(c.observed.get(k, 0.0) - v) for k, v in c.expected.items()), default=0.0
            )
            verdict = "PASS" if c.passed else "FAIL"
            line = f"{verdict}  {c.name:<{width}}  max|dev|={worst:.5f}  tol={c.tolerance:.5f}"
            if c.detail:
                line += f"  {c.detail}"
            lines.append(line)
        lines.append("overall: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)


def binomial_tolerance(p: float, n: int, sigmas: float = SIGMAS) -> float:
    return sigmas * math.sqrt(p * (1.0 - p) / n)


def _tolerance(fixed: float, probabilities: Iterable[float], n: int) -> float:
    # The fixed bound covers 6 sigma at the nominal sample size; widen it only
    # when fewer samples are drawn.
    return max(fixed, max(binomial_tolerance(p, n) for p in probabilities))


def _compare(
    name: str,
    expected: dict[str, float],
    counts: Counter,
    n: int,
    fixed: float,
) -> CheckResult:
    observed = {k: counts.get(k, 0) / n for k in expected}
    tol = _tolerance(fixed, expected.values(), n)
    bad = [k for k in expected if abs(observed[k] - expected[k]) > tol]
    detail = f"out of tolerance: {', '.join(bad)}" if bad else ""
    return CheckResult(name, expected, observed, tol, not bad, detail)


def _require_samples(samples: int) -> None:
    if samples < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, got {samples}")


def validate_operation_mix(
    samples: int,
    seed: int = 0,
    sampler: Callable[[RandomSource], TypoOp] = sample_op,
) -> CheckResult:
    _require_samples(samples)
    rng = RandomSource(seed)
    counts = Counter(sampler(rng).value for _ in range(samples))
    expected = {op.value: p for op, p in OP_PROBABILITIES.items()}
    return _compare("operation_mix", expected, counts, samples, OP_MIX_TOLERANCE)


def validate_position_distribution(
    word_length: int,
    samples: int,
    seed: int = 0,
    sampler: Callable[[int, RandomSource], int] = sample_position,
) -> CheckResult:
    _require_samples(samples)
    rng = RandomSource(seed)
    counts = Counter(str(sampler(word_length, rng)) for _ in range(samples))
    expected = {str(i): w for i, w in enumerate(position_weights(word_length))}
    result = _compare(
        f"position_distribution[len={word_length}]", expected, counts, samples, POSITION_TOLERANCE
    )
    first_hits = counts.get("0", 0)
    stray = sum(v for k, v in counts.items() if k not in expected)
    if first_hits or stray:
        result.passed = False
        result.detail = f"index 0 drawn {first_hits} times; {stray} draws out of range"
    return result


def validate_word_length_bias(
    sentence: str,
    trials: int,
    seed: int = 0,
    language: str = "eng_Latn",
    registry: LayoutRegistry | None = None,
    ignore: IgnoreSet | None = None,
) -> CheckResult:
    """Run single-typo corruptions and compare per-word hit rates to sqrt weights."""
    _require_samples(trials)
    registry = registry or load_registry()
    ignore = ignore or load_ignore_set(language)
    words = tokenize(sentence).words
    eligible = [is_eligible(w, ignore) for w in words]
    if sum(eligible) < 2:
        raise ValueError("sentence needs at least two eligible words")
    weights = word_weights(words, eligible)
    total = math.fsum(weights)
    expected = {str(i): w / total for i, w in enumerate(weights)}

    rate = 1.0 / len(words)
    counts: Counter = Counter()
    misses = 0
    for t in range(trials):
        config = CorruptionConfig(language, rate, derive_seed(seed, str(t)))
        result = corrupt(sentence, config, registry, ignore)
        if result.events:
            counts[str(result.events[0].word_index)] += 1
        else:
            misses += 1
    check = _compare("word_length_bias", expected, counts, trials, WORD_BIAS_TOLERANCE)
    if misses:
        check.passed = False
        check.detail = (check.detail + f"; {misses} trials applied no typo").lstrip("; ")
    return check


def expected_neighbor_fraction(layout: KeyboardLayout, op: TypoOp = TypoOp.REPLACE) -> float:
    """Chance that a uniform naive pick lands on a neighbor, averaged over the alphabet."""
    alphabet = layout.ordered_alphabet
    if op is TypoOp.REPLACE:
        return sum(len(layout.neighbors(c)) / (len(alphabet) - 1) for c in alphabet) / len(alphabet)
    return sum(len(layout.neighbors(c)) / len(alphabet) for c in alphabet) / len(alphabet)


def _coincidence_chance(layout: KeyboardLayout, op: TypoOp, reference: str) -> float:
    ref = fold(reference)
    alphabet = layout.ordered_alphabet
    pool = [c for c in alphabet if c != ref] if op is TypoOp.REPLACE else list(alphabet)
    if not pool:
        return 0.0
    near = set(layout.neighbors(ref))
    return sum(1 for c in pool if c in near) / len(pool)


@dataclass
class AuditStats:
    events: int = 0
    violations: Counter = field(default_factory=Counter)
    first_violation: str = ""
    neighbor_events: int = 0
    neighbor_hits: int = 0
    neighbor_expected: float = 0.0
    transposes: int = 0
    cross_hand: int = 0

    @property
    def clean(self) -> bool:
        return not self.violations

    @property
    def neighbor_fraction(self) -> float:
        return self.neighbor_hits / self.neighbor_events if self.neighbor_events else 1.0

    @property
    def expected_naive_fraction(self) -> float:
        return self.neighbor_expected / self.neighbor_events if self.neighbor_events else 0.0

    def flag(self, kind: str, where: str) -> None:
        if not self.violations:
            self.first_violation = f"{kind} at {where}"
        self.violations[kind] += 1


def _structure_ok(event: TypoEvent) -> bool:
    b, a, p = event.before, event.after, event.position
    if not 1 <= p < len(b):
        return False
    if event.op is TypoOp.REPLACE:
        return len(a) == len(b) and a[:p] == b[:p] and a[p + 1 :] == b[p + 1 :] and a[p] != b[p]
    if event.op is TypoOp.INSERT:
        return len(a) == len(b) + 1 and a[: p + 1] == b[: p + 1] and a[p + 2 :] == b[p + 1 :]
    if event.op is TypoOp.DELETE:
        return a == b[:p] + b[p + 1 :]
    return p + 1 < len(b) and a == b[:p] + b[p + 1] + b[p] + b[p + 2 :]


def _original_word(event: TypoEvent) -> str:
    # A transpose at the last letter records the borrowed separator character.
    b = event.before
    if event.op is TypoOp.TRANSPOSE and event.position == len(b) - 2 and b[-1].isspace():
        return b[:-1]
    return b


def audit_events(
    events: Iterable[TypoEvent],
    layout: KeyboardLayout,
    ignore: IgnoreSet | None = None,
    label: str = "",
) -> AuditStats:
    """Check layout conformance of one document's events, in order."""
    stats = AuditStats()
    return _audit_into(stats, events, layout, ignore, label)


def _audit_into(
    stats: AuditStats,
    events: Iterable[TypoEvent],
    layout: KeyboardLayout,
    ignore: IgnoreSet | None,
    label: str,
) -> AuditStats:
    last_state: dict[int, str] = {}
    for k, event in enumerate(events):
        stats.events += 1
        where = f"{label}event {k} (word {event.word_index}, {event.op.value})"
        b, a, p = event.before, event.after, event.position
        if p < 1:
            stats.flag("position", where)
            continue
        if not _structure_ok(event):
            stats.flag("structure", where)
            continue
        prev = last_state.get(event.word_index)
        if prev is None:
            if ignore is not None and not is_eligible(_original_word(event), ignore):
                stats.flag("protection", where)
        elif not (b == prev or (b[:-1] == prev and b[-1].isspace())):
            stats.flag("chain", where)
        last_state[event.word_index] = a

        if event.op in (TypoOp.REPLACE, TypoOp.INSERT):
            reference = b[p]
            introduced = a[p] if event.op is TypoOp.REPLACE else a[p + 1]
            stats.neighbor_events += 1
            stats.neighbor_expected += _coincidence_chance(layout, event.op, reference)
            if fold(introduced) in layout.neighbors(reference):
                stats.neighbor_hits += 1
            else:
                stats.flag("neighbor", where)
        elif event.op is TypoOp.TRANSPOSE:
            stats.transposes += 1
            if crosses_hands(layout, b[p], b[p + 1]):
                stats.cross_hand += 1
            else:
                stats.flag("hand", where)
    return stats


def audit_log(
    lines: Iterable[str],
    registry: LayoutRegistry,
    ignore_sets: dict[str, IgnoreSet] | None = None,
) -> dict[str, AuditStats]:
    """Audit an event log, grouped by language."""
    per_language: dict[str, AuditStats] = {}
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            entry = json.loads(line)
            language = entry["language"]
            events = [TypoEvent.from_dict(e) for e in entry["events"]]
            label = f"doc {entry['doc_id']} "
        except (ValueError, KeyError, TypeError) as exc:
            raise DataError(f"event log line {lineno}: unreadable entry ({exc})") from None
        stats = per_language.setdefault(language, AuditStats())
        ignore = ignore_sets.get(language) if ignore_sets else None
        _audit_into(stats, events, registry[language], ignore, label)
    return per_language


def validate_constraints(
    event_log_path: str | Path,
    layouts_dir: str | Path | None = None,
    ignore_dir: str | Path | None = None,
) -> CheckResult:
    """Audit every event in a log against the layout constraints."""
    registry = load_registry(layouts_dir)
    with open(event_log_path, encoding="utf-8") as fh:
        lines = fh.readlines()
    ignore_sets = load_ignore_sets(ignore_dir)
    per_language = audit_log(lines, registry, ignore_sets)

    total = sum(s.events for s in per_language.values())
    bad = Counter()
    first = ""
    for lang in sorted(per_language):
        stats = per_language[lang]
        bad.update(stats.violations)
        if stats.violations and not first:
            first = stats.first_violation
    observed = {"conforming": (total - sum(bad.values())) / total if total else 1.0}
    detail = f"{total} events"
    if bad:
        detail += "; " + ", ".join(f"{k}={v}" for k, v in sorted(bad.items()))
        detail += f"; first: {first}"
    return CheckResult("constraints", {"conforming": 1.0}, observed, 0.0, not bad, detail)


def run_validation(
    samples: int,
    seed: int = 0,
    language: str = "eng_Latn",
    trials: int = MIN_SAMPLES,
    lengths: Iterable[int] = (2, 3, 4, 10),
    sentence: str = "hi there",
    events_in: str | Path | None = None,
    layouts_dir: str | Path | None = None,
    ignore_dir: str | Path | None = None,
) -> ValidationReport:
    """The checks behind ``multypo validate``, in a fixed order."""
    registry = load_registry(layouts_dir)
    ignore = load_ignore_set(language, ignore_dir)
    report = ValidationReport()
    report.checks.append(validate_operation_mix(samples, seed))
    for n in lengths:
        report.checks.append(validate_position_distribution(n, samples, seed))
    report.checks.append(
        validate_word_length_bias(sentence, trials, seed, language, registry, ignore)
    )
    if events_in is not None:
        report.checks.append(validate_constraints(events_in, layouts_dir, ignore_dir))
    return report
