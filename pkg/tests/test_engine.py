from __future__ import annotations

from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multypo.engine import (
    CorruptionConfig,
    Mode,
    TypoEvent,
    TypoFailure,
    apply_delete,
    apply_insert,
    apply_replace,
    apply_transpose,
    corrupt,
    is_valid,
    naive_insert,
    naive_replace,
    naive_transpose,
    target_typo_count,
)
from multypo.layouts import load_registry
from multypo.lexicon import is_eligible, load_ignore_set, tokenize
from multypo.sampling import RandomSource, TypoOp

SENTENCE = "Colorless green ideas smell furiously."


def _run(text, rate, seed=0, lang="eng_Latn", mode=Mode.MULTYPO, registry=None, ignore=None):
    registry = registry or _REGISTRY
    ignore = ignore or load_ignore_set(lang)
    return corrupt(text, CorruptionConfig(lang, rate, seed, mode), registry, ignore)


def _whitespace(text: str) -> Counter:
    return Counter(c for c in text if c.isspace())


# Operations


def test_replace_uses_only_neighbor(qwerty):
    assert apply_replace("qq", 1, qwerty, RandomSource(0)) == "qw"


def test_replace_picks_each_neighbor(qwerty):
    rng = RandomSource(1)
    assert {apply_replace("as", 1, qwerty, rng) for _ in range(200)} == {"aa", "ad"}


def test_replace_keeps_case(qwerty):
    assert apply_replace("QQ", 1, qwerty, RandomSource(0)) == "QW"


def test_replace_fails_without_neighbors(qwerty):
    with pytest.raises(TypoFailure):
        apply_replace("a1b", 1, qwerty, RandomSource(0))


def test_insert_after_position(qwerty):
    rng = RandomSource(2)
    assert {apply_insert("hi", 1, qwerty, rng) for _ in range(200)} == {"hiu", "hio"}


def test_insert_fails_without_neighbors(qwerty):
    with pytest.raises(TypoFailure):
        apply_insert("x9", 1, qwerty, RandomSource(0))


def test_delete():
    assert apply_delete("cat", 1) == "ct"
    assert apply_delete("ab", 1) == "a"
    with pytest.raises(TypoFailure):
        apply_delete("a ", 1)


@pytest.mark.parametrize("op", [apply_delete, naive_transpose])
def test_position_zero_is_rejected(op):
    with pytest.raises(ValueError):
        op("cat", 0) if op is apply_delete else op("cat", 0, False)


def test_transpose_cross_hand(qwerty):
    assert apply_transpose("the", 1, qwerty, is_final_word=False) == "teh"


def test_transpose_same_hand_fails(qwerty):
    with pytest.raises(TypoFailure):
        apply_transpose("asdf", 1, qwerty, is_final_word=False)


def test_transpose_last_char_of_final_word_fails(qwerty):
    with pytest.raises(TypoFailure):
        apply_transpose("as", 1, qwerty, is_final_word=True)


def test_transpose_borrows_following_space(qwerty):
    assert apply_transpose("the", 2, qwerty, is_final_word=False) == "th e"
    assert naive_transpose("as", 1, False, pad="\t") == "a\ts"
    # Only the space bar is a neutral key; a tab is not on the layout.
    with pytest.raises(TypoFailure):
        apply_transpose("as", 1, qwerty, is_final_word=False, pad="\t")


def test_transpose_unknown_key_never_crosses(qwerty):
    with pytest.raises(TypoFailure):
        apply_transpose("aßk", 1, qwerty, is_final_word=True)


def test_naive_ops_ignore_geometry(qwerty):
    rng = RandomSource(4)
    replaced = {naive_replace("ab", 1, qwerty, rng)[1] for _ in range(2000)}
    assert replaced == set(qwerty.alphabet) - {"b"}
    inserted = {naive_insert("ab", 1, qwerty, rng)[2] for _ in range(2000)}
    assert inserted == set(qwerty.alphabet)
    assert naive_transpose("asdf", 1, False) == "adsf"


def test_is_valid():
    assert not is_valid("cat", ["cat"])
    assert not is_valid("cat", ["cat", "cta"])
    assert is_valid("ca", ["cat", "cta"])


@pytest.mark.parametrize(
    "rate, n, expected",
    [
        (0.1, 5, 1),
        (0.1, 4, 0),
        (0.1, 15, 2),
        (0.1, 25, 3),
        (0.4, 5, 2),
        (0.7, 5, 4),
        (0.0, 100, 0),
        (1.0, 3, 3),
        (0.2, 5, 1),
    ],
)
def test_target_typo_count(rate, n, expected):
    assert target_typo_count(rate, n) == expected


def test_target_typo_count_rejects_bad_rate():
    with pytest.raises(ValueError):
        target_typo_count(1.5, 3)


# Corruption loop


def test_zero_rate_is_identity():
    result = _run(SENTENCE, 0.0, seed=123)
    assert result.text == SENTENCE
    assert result.events == ()


def test_five_word_sentence_gets_one_typo():
    for seed in range(50):
        result = _run(SENTENCE, 0.2, seed=seed)
        assert result.applied == 1
        assert result.text != SENTENCE
        assert len(result.text.split()) in (4, 5)


@pytest.mark.parametrize(
    "seed, word, expected, op",
    [
        (48, 2, "ideaa", TypoOp.REPLACE),
        (403, 1, "greenm", TypoOp.INSERT),
        (8, 0, "Coorless", TypoOp.DELETE),
        (6, 4, "furioulsy.", TypoOp.TRANSPOSE),
    ],
)
def test_pinned_seeds(seed, word, expected, op):
    result = _run(SENTENCE, 0.2, seed=seed)
    (event,) = result.events
    assert (event.word_index, event.op, event.after) == (word, op, expected)


def test_same_seed_same_output():
    a = _run(SENTENCE * 3, 0.4, seed=77)
    b = _run(SENTENCE * 3, 0.4, seed=77)
    assert a == b


def test_numbers_are_never_touched():
    deu = load_ignore_set("deu_Latn")
    text = "Ich kaufe 500 Äpfel und dreihundert Birnen"
    for seed in range(100):
        result = _run(text, 0.7, seed=seed, lang="deu_Latn", ignore=deu)
        assert "500" in result.final_words
        assert "dreihundert" in result.final_words


def test_all_ineligible_gives_shortfall():
    result = _run("  a  b ", 1.0, seed=1)
    assert (result.requested, result.applied, result.shortfall) == (2, 0, 2)
    assert result.text == "  a  b "


def test_language_mismatch_is_rejected():
    with pytest.raises(ValueError, match="ignore set"):
        _run(SENTENCE, 0.2, ignore=load_ignore_set("deu_Latn"))


@pytest.mark.parametrize(
    "kwargs",
    [
        {"rate": -0.1},
        {"rate": 1.1},
        {"rate": 0.1, "max_retries": 0},
        {"rate": 0.1, "seed": -1},
        {"rate": 0.1, "mode": "wild"},
    ],
)
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        CorruptionConfig("eng_Latn", **kwargs)


def test_event_round_trip():
    event = TypoEvent(2, 3, TypoOp.INSERT, "ideas", "ideass")
    assert TypoEvent.from_dict(event.to_dict()) == event


def test_two_letter_word_with_single_retry():
    for seed in range(200):
        result = corrupt(
            "qp", CorruptionConfig("eng_Latn", 1.0, seed, max_retries=1), _REGISTRY, _IGNORE
        )
        assert result.applied == 1
        assert result.text[0] == "q" and result.text != "qp"


def test_borrowed_space_moves_into_word():
    for seed in range(2000):
        result = _run("the cat sat", 1.0, seed=seed)
        padded = [e for e in result.events if e.before.endswith(" ")]
        if padded:
            assert " " not in result.words[padded[0].word_index]
            assert result.text.count(" ") == 2
            return
    pytest.fail("no padded transpose in 2000 seeds")


_REGISTRY = load_registry()
_IGNORE = load_ignore_set("eng_Latn")

_letters = st.sampled_from(sorted(_REGISTRY["eng_Latn"].alphabet) + list("AEZ.,'"))
_words = st.text(_letters, min_size=1, max_size=9) | st.sampled_from(["500", "one", "x"])
_seps = st.sampled_from([" ", "  ", "\t", " \n"])


@st.composite
def _sentences(draw):
    words = draw(st.lists(_words, min_size=1, max_size=12))
    seps = draw(st.lists(_seps, min_size=len(words), max_size=len(words)))
    return "".join(w + s for w, s in zip(words, seps)).rstrip()


@settings(max_examples=300, deadline=None)
@given(
    _sentences(),
    st.sampled_from([0.1, 0.4, 0.7, 1.0]),
    st.integers(0, 2**32),
    st.sampled_from(list(Mode)),
)
def test_invariants(text, rate, seed, mode):
    result = _run(text, rate, seed=seed, mode=mode, ignore=_IGNORE)
    words = tokenize(text).words
    assert result.requested == target_typo_count(rate, len(words))
    assert result.applied <= result.requested
    assert _whitespace(result.text) == _whitespace(text)
    seen: dict[int, str] = {}
    for event in result.events:
        assert event.position >= 1
        assert is_eligible(words[event.word_index], _IGNORE)
        prior = seen.get(event.word_index, words[event.word_index])
        assert event.before.rstrip() == prior.rstrip()
        seen[event.word_index] = event.after
    for original, final in zip(words, result.final_words):
        assert final[0] == original[0]
        if not is_eligible(original, _IGNORE):
            assert final == original
