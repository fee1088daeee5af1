import warnings
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dominogames.core import InputError
from dominogames.words import (BalanceWarning, Case, ClassificationError, EventuallyPeriodic, Mechanical, TurnWord,
                               budget_sequence, classify, frequency, gap_bound, is_balanced_up_to, parse_word,
                               s2_block, s2_word, v)
from oracles import brute_balanced, brute_v


def ep(prefix, period):
    return EventuallyPeriodic(prefix, period)


def test_parse_syntax():
    assert parse_word("(AB)*") == ep("", "AB")
    assert parse_word("B|(AB)*") == ep("B", "AB")
    m = parse_word("sturmian:13/21:0/1")
    assert isinstance(m, Mechanical) and m.slope == Fraction(13, 21) and m.intercept == 0
    with pytest.raises(InputError, match="column 2"):
        parse_word("AxB")
    assert str(ep("B", "AB")) == "B|(AB)*"


def test_balanced_examples():
    assert is_balanced_up_to(ep("", "AB"), 30)
    assert not is_balanced_up_to(ep("AABB", "AABB"), 20)
    assert is_balanced_up_to(Mechanical(Fraction(13, 21)), 40)
    assert brute_balanced(Mechanical(Fraction(13, 21)).prefix(41), 40)


@settings(max_examples=150, deadline=None)
@given(st.text("AB", max_size=4), st.text("AB", min_size=1, max_size=6), st.integers(1, 25))
def test_balanced_matches_window_bruteforce(prefix, period, n):
    w = ep(prefix, period)
    assert is_balanced_up_to(w, n) == brute_balanced(w.prefix(n + 1), n)


@settings(max_examples=150, deadline=None)
@given(st.text("AB", max_size=4), st.text("AB", min_size=1, max_size=6))
def test_balance_stable_beyond_default_depth(prefix, period):
    w = ep(prefix, period)
    n = 3 * (len(prefix) + len(period))
    if is_balanced_up_to(w, n):
        assert is_balanced_up_to(w, n + 10)


def test_frequency_examples():
    assert frequency(ep("", "AB")) == Fraction(1, 2)
    assert frequency(ep("", "ABB")) == Fraction(1, 3)
    assert frequency(ep("", "B")) == 0
    with pytest.warns(BalanceWarning):
        assert frequency(ep("", "AABB")) == Fraction(1, 2)


def test_classify_examples():
    assert classify(ep("", "AB")).tag is Case.MID_NO_AA
    assert classify(ep("", "ABB")).tag is Case.AT_MOST_THIRD_NO_ABA
    c = classify(ep("", "AAB"))
    assert c.tag is Case.ABOVE_HALF and c.gap_k == 1
    assert classify(ep("B", "B")).tag is Case.FREQ_ZERO
    assert classify(ep("A", "B")).tag is Case.FREQ_ZERO
    assert classify(ep("BA", "AB")).tag is Case.MID_ONE_AA
    assert is_balanced_up_to(ep("BABA", "BBA"), 60)
    assert classify(ep("BABA", "BBA")).tag is Case.AT_MOST_THIRD_ONE_ABA


def test_classify_inconsistent_census():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BalanceWarning)
        with pytest.raises(ClassificationError):
            classify(ep("AA", "ABB"))
        with pytest.raises(ClassificationError):
            classify(ep("ABA", "B"))


def test_gap_bound_examples():
    assert gap_bound(ep("", "AAB"), "AA", 30) == 1
    # consecutive AA are 5 apart in (ABAAB)^w; 5 <= 2k+1 first holds at k=2
    assert gap_bound(ep("", "ABAAB"), "AA", 30) == 2
    with pytest.raises(ClassificationError):
        gap_bound(ep("", "AB"), "AA", 30)
    with pytest.raises(InputError):
        gap_bound(ep("", "AB"), "BB", 30)


def test_gap_bound_definition_scan():
    for period in ["AAB", "ABAAB", "AABAB", "AAAB", "AABABAB"]:
        s = ep("", period).prefix(60)
        occ = [i for i in range(len(s) - 1) if s[i:i + 2] == "AA"]
        dist = max(b - a for a, b in zip(occ, occ[1:]))
        k = gap_bound(ep("", period), "AA", 60)
        assert dist <= 2 * k + 1 and (k == 1 or dist > 2 * (k - 1) + 1)


def test_v_examples_and_recursion():
    assert v(0, 7, 3) == 0
    assert v(1, 1, 1) == 3
    assert v(2, 1, 2) == 20
    with pytest.raises(InputError):
        v(1, 1, 0)
    for n in range(6):
        for c in range(1, 4):
            for k in range(1, 5):
                assert v(n, c, k) == brute_v(n, c, k)


def test_budget_examples():
    assert [p for _, p in budget_sequence(Fraction(1, 2), 6)] == [1] * 6
    assert [p for _, p in budget_sequence(Fraction(2, 3), 6)] == [2] * 6
    seq = budget_sequence(Fraction(2, 5), 5)
    assert [p for _, p in seq] == [0, 1, 1, 0, 1]
    assert seq[0][0] == Fraction(2, 3)
    with pytest.raises(InputError):
        budget_sequence(Fraction(1), 3)


@settings(max_examples=60, deadline=None)
@given(st.fractions(min_value=0, max_value=Fraction(9, 10), max_denominator=12), st.integers(1, 40))
def test_budget_plays_follow_floor_differences(f, steps):
    r = f / (1 - f)
    plays = [p for _, p in budget_sequence(f, steps)]
    assert plays == [int((i + 1) * r) - int(i * r) for i in range(steps)]


@pytest.mark.parametrize("slope", [Fraction(13, 21), Fraction(2, 5), Fraction(1, 7), Fraction(0), Fraction(1)])
def test_mechanical_prefix_counts(slope):
    w = Mechanical(slope, Fraction(1, 3) if slope.denominator > 1 else 0)
    s = w.prefix(10_000)
    count = 0
    for n, ch in enumerate(s, 1):
        count += ch == "A"
        assert abs(count - n * slope) < 1


def test_mechanical_finite_state_matches_letters():
    w = Mechanical(Fraction(5, 8), Fraction(1, 4))
    fs = w.finite_state()
    assert fs.prefix(200) == w.prefix(200)


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(["AB", "ABB", "AAB", "ABAAB", "ABABB", "B", "AABAB", "ABBABB", "ABBB"]),
       st.text("AB", max_size=3), st.integers(0, 6))
def test_classify_rotation_stable(period, prefix, rot):
    w = ep(prefix, period)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BalanceWarning)
        if not is_balanced_up_to(w, 3 * (len(prefix) + len(period))):
            return
        try:
            base = classify(w).tag
        except ClassificationError:
            return
    r = rot % len(period)
    rotated = classify(ep("", period[r:] + period[:r])).tag
    degrade = {Case.MID_ONE_AA: Case.MID_NO_AA, Case.AT_MOST_THIRD_ONE_ABA: Case.AT_MOST_THIRD_NO_ABA}
    assert rotated in (base, degrade.get(base))


def test_generated_words():
    s2 = s2_word()
    assert s2.prefix(3 + 5 + 7) == "AAB" + "AABAB" + "AABABAB"
    assert [s2_block(i) for i in (0, 2, 3, 7, 8)] == [1, 1, 2, 2, 3]
    assert not s2.is_finite_state()
    s1 = parse_word("s1")
    assert s1.prefix(9) == "AAB" * 3  # v(1,1,1)=3 copies of the first block
    assert isinstance(parse_word(" (ABB)* "), TurnWord)
