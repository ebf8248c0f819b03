from __future__ import annotations

import json
from fractions import Fraction

import pytest

from multypo.corpus import DataError
from multypo.engine import CorruptionConfig, Mode, TypoEvent, corrupt
from multypo.sampling import RandomSource, TypoOp
from multypo.validation import (
    MIN_SAMPLES,
    audit_events,
    audit_log,
    binomial_tolerance,
    expected_neighbor_fraction,
    validate_constraints,
    validate_operation_mix,
    validate_position_distribution,
    validate_word_length_bias,
)


def _brute_force_fraction(layout, op) -> Fraction:
    """Enumerate every (original, pick) pair a uniform naive edit could make."""
    alphabet = sorted(layout.alphabet)
    hits = total = Fraction(0)
    for ch in alphabet:
        picks = [c for c in alphabet if c != ch] if op is TypoOp.REPLACE else alphabet
        near = {c for c in alphabet if c in layout.neighbors(ch)}
        hits += Fraction(sum(c in near for c in picks), len(picks))
        total += 1
    return hits / total


def test_operation_mix_passes():
    check = validate_operation_mix(MIN_SAMPLES, seed=1)
    assert check.passed, check.detail
    assert check.tolerance == pytest.approx(max(0.003, binomial_tolerance(0.2825, MIN_SAMPLES)))


def test_uniform_op_sampler_is_caught():
    def uniform(rng: RandomSource) -> TypoOp:
        return list(TypoOp)[rng.below(4)]

    check = validate_operation_mix(MIN_SAMPLES, seed=1, sampler=uniform)
    assert not check.passed
    assert "insert" in check.detail


@pytest.mark.parametrize("length", [2, 3, 4, 10])
def test_position_distribution_passes(length):
    assert validate_position_distribution(length, MIN_SAMPLES, seed=2).passed


def test_uniform_position_sampler_is_caught():
    def uniform(length: int, rng: RandomSource) -> int:
        return rng.below(length)

    check = validate_position_distribution(4, MIN_SAMPLES, seed=2, sampler=uniform)
    assert not check.passed
    assert "index 0" in check.detail


def test_rare_first_index_draw_fails():
    calls = iter(range(10**9))

    def leaky(length: int, rng: RandomSource) -> int:
        return 0 if next(calls) == 7 else 1

    assert not validate_position_distribution(2, MIN_SAMPLES, sampler=leaky).passed


def test_too_few_samples():
    with pytest.raises(ValueError, match="at least"):
        validate_operation_mix(10)
    with pytest.raises(ValueError, match="at least"):
        validate_word_length_bias("hi there", 10)


def test_word_bias_needs_two_eligible_words():
    with pytest.raises(ValueError, match="two eligible"):
        validate_word_length_bias("1 2 3", MIN_SAMPLES)


def test_word_bias_passes(registry, eng_ignore):
    check = validate_word_length_bias("hi there", MIN_SAMPLES, 3, "eng_Latn", registry, eng_ignore)
    assert check.passed, check.detail
    assert check.expected["0"] == pytest.approx(0.387, abs=5e-4)


@pytest.mark.parametrize("lang", ["eng_Latn", "fra_Latn", "rus_Cyrl", "hin_Deva", "kat_Geor"])
def test_expected_neighbor_fraction_matches_enumeration(registry, lang):
    layout = registry[lang]
    for op in (TypoOp.REPLACE, TypoOp.INSERT):
        assert expected_neighbor_fraction(layout, op) == pytest.approx(
            float(_brute_force_fraction(layout, op)), abs=1e-12
        )


def test_audit_accepts_engine_output(registry, eng_ignore):
    text = "the quick brown fox jumps over the lazy dog"
    for seed in range(200):
        result = corrupt(text, CorruptionConfig("eng_Latn", 1.0, seed), registry, eng_ignore)
        stats = audit_events(result.events, registry["eng_Latn"], eng_ignore)
        assert stats.clean, stats.first_violation


@pytest.mark.parametrize(
    "event, kind",
    [
        (TypoEvent(0, 1, TypoOp.TRANSPOSE, "asdf", "adsf"), "hand"),
        (TypoEvent(0, 1, TypoOp.REPLACE, "cat", "cxt"), "neighbor"),
        (TypoEvent(0, 1, TypoOp.INSERT, "cat", "camt"), "neighbor"),
        (TypoEvent(0, 0, TypoOp.DELETE, "cat", "at"), "position"),
        (TypoEvent(0, 1, TypoOp.DELETE, "cat", "cta"), "structure"),
        (TypoEvent(0, 1, TypoOp.DELETE, "500kg", "50kg"), "protection"),
    ],
)
def test_audit_flags_hand_edited_events(qwerty, eng_ignore, event, kind):
    stats = audit_events([event], qwerty, eng_ignore)
    assert list(stats.violations) == [kind]


def test_audit_flags_broken_chain(qwerty):
    events = [
        TypoEvent(0, 1, TypoOp.DELETE, "cart", "crt"),
        TypoEvent(0, 1, TypoOp.DELETE, "cart", "crt"),
    ]
    assert list(audit_events(events, qwerty).violations) == ["chain"]


def test_audit_accepts_padded_transpose(qwerty, eng_ignore):
    events = [
        TypoEvent(0, 2, TypoOp.TRANSPOSE, "the ", "th e"),
        TypoEvent(0, 1, TypoOp.DELETE, "th e", "t e"),
    ]
    assert audit_events(events, qwerty, eng_ignore).clean


def _log(tmp_path, entries):
    path = tmp_path / "events.jsonl"
    path.write_text("".join(json.dumps(e) + "\n" for e in entries), encoding="utf-8")
    return path


def test_constraints_check_on_logs(tmp_path, registry, eng_ignore):
    text = "the quick brown fox jumps over the lazy dog"
    entries = {Mode.MULTYPO: [], Mode.NAIVE: []}
    for mode, bucket in entries.items():
        for seed in range(100):
            config = CorruptionConfig("eng_Latn", 0.7, seed, mode)
            result = corrupt(text, config, registry, eng_ignore)
            bucket.append(
                {
                    "doc_id": str(seed),
                    "language": "eng_Latn",
                    "events": [e.to_dict() for e in result.events],
                }
            )
    good = validate_constraints(_log(tmp_path, entries[Mode.MULTYPO]))
    assert good.passed, good.detail
    bad = validate_constraints(_log(tmp_path, entries[Mode.NAIVE]))
    assert not bad.passed
    assert "neighbor=" in bad.detail


def test_hand_edited_log_fails(tmp_path):
    entry = {
        "doc_id": "1",
        "language": "eng_Latn",
        "events": [TypoEvent(1, 1, TypoOp.TRANSPOSE, "asdf", "adsf").to_dict()],
    }
    check = validate_constraints(_log(tmp_path, [entry]))
    assert not check.passed
    assert "hand=1" in check.detail


def test_unreadable_log_line(registry):
    with pytest.raises(DataError, match="line 2"):
        audit_log(['{"doc_id": "1", "language": "eng_Latn", "events": []}', '{"x": 1}'], registry)
